#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imstb/sip/uri.hpp"

namespace imstb::sip {

enum class Method { Register, Subscribe, Notify, Message, Invite, Ack, Bye };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

/// The closed set of response codes the testbed emits and accepts.
enum class StatusCode : int {
  Trying = 100,
  Ringing = 180,
  Ok = 200,
  Accepted = 202,
  MovedTemporarily = 302,
  BadRequest = 400,
  Unauthorized = 401,
  Forbidden = 403,
  NotFound = 404,
  RequestTimeout = 408,
  TemporarilyUnavailable = 480,
  ServerInternalError = 500,
};

std::optional<StatusCode> status_from_int(int code);
std::string_view reason_phrase(StatusCode code);
inline int code_of(StatusCode s) { return static_cast<int>(s); }
inline int status_class(StatusCode s) { return code_of(s) / 100; }

struct Via {
  std::string protocol = "UDP";
  std::string host;
  std::optional<std::uint16_t> port;
  Params params;

  bool operator==(const Via&) const = default;

  std::string branch() const { return std::string(find_param(params, "branch").value_or("")); }
  net::NetAddress sent_by() const { return {host, port.value_or(5060)}; }
  std::string to_string() const;
  static Via parse(std::string_view text);
};

struct CSeq {
  std::uint32_t number = 1;
  Method method = Method::Register;
  bool operator==(const CSeq&) const = default;
};

struct Header {
  std::string name;
  std::string value;
  bool operator==(const Header&) const = default;
};

enum class MessageKind { Request, Response };

/// A parsed SIP request or response. Headers outside the modelled set are
/// kept in `extra_headers` in arrival order.
struct SipMessage {
  MessageKind kind = MessageKind::Request;
  Method method = Method::Register;  // responses: the CSeq method
  SipUri request_uri;                // requests only
  StatusCode status = StatusCode::Ok;  // responses only
  std::string reason;

  std::vector<Via> vias;
  std::optional<int> max_forwards;
  std::vector<NameAddr> routes;
  std::vector<NameAddr> record_routes;
  NameAddr from;
  NameAddr to;
  std::string call_id;
  CSeq cseq;
  std::optional<NameAddr> contact;
  std::optional<std::uint32_t> expires;
  std::optional<std::string> event;
  std::optional<std::string> content_type;
  std::vector<Header> extra_headers;
  std::string body;

  bool operator==(const SipMessage&) const = default;

  bool is_request() const { return kind == MessageKind::Request; }
  bool is_response() const { return kind == MessageKind::Response; }

  /// Lookup among the opaque headers, case-insensitive.
  std::optional<std::string_view> header(std::string_view name) const;
  void set_header(std::string_view name, std::string_view value);
  void remove_header(std::string_view name);

  /// Short label such as "REGISTER" or "200 REGISTER" for logs and ladders.
  std::string summary() const;
};

enum class ParseErrc {
  MalformedStartLine,
  MissingMandatoryHeader,
  MalformedHeader,
  BodyLengthMismatch,
  UnknownMethod,
};

std::string_view to_string(ParseErrc e);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrc code, std::string detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(std::move(detail)) {}

  ParseErrc code() const { return code_; }
  /// Header name for MissingMandatoryHeader / MalformedHeader.
  const std::string& detail() const { return detail_; }

 private:
  ParseErrc code_;
  std::string detail_;
};

/// Throws ParseError.
SipMessage parse_message(std::string_view raw);

/// Canonical wire form: CRLF lines, canonical header names, computed Content-Length.
std::string serialize_message(const SipMessage& msg);

}  // namespace imstb::sip
