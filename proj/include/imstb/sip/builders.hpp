#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "imstb/net/address.hpp"
#include "imstb/sip/message.hpp"

namespace imstb::sip {

/// Prefix every RFC 3261 branch token carries.
inline constexpr std::string_view kBranchMagic = "z9hG4bK";

/// Deterministic source of branch tokens, tags and Call-IDs for one node.
/// Tokens are unique per (scope, counter), so runs replay byte-identically.
class IdGenerator {
 public:
  explicit IdGenerator(std::string scope) : scope_(std::move(scope)) {}

  std::string next_branch();
  std::string next_tag();
  std::string next_call_id();

 private:
  std::string scope_;
  std::uint64_t counter_ = 0;
};

class NotARequest : public std::logic_error {
 public:
  NotARequest() : std::logic_error("make_response requires a request") {}
};

/// Request with one Via for `sent_by`, a fresh branch, a From tag and Max-Forwards 70.
SipMessage make_request(Method method, const SipUri& target, const SipUri& from, const SipUri& to,
                        std::string call_id, std::uint32_t cseq, const net::NetAddress& sent_by,
                        IdGenerator& ids);

/// Response copying the request's Via stack, From, To, Call-ID and CSeq. Final
/// responses gain a To tag (derived from the request) when the request had none.
SipMessage make_response(const SipMessage& req, StatusCode status, std::string body = {});

/// Pushes a Via for `self` with a fresh branch onto the top of the stack.
void push_via(SipMessage& msg, const net::NetAddress& self, IdGenerator& ids);

/// Deterministic To tag for a request; retransmissions map to the same tag.
std::string derive_tag(const SipMessage& req);

}  // namespace imstb::sip
