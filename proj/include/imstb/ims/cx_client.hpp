#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "imstb/hss/cx.hpp"
#include "imstb/net/runtime.hpp"

namespace imstb::ims {

/// Cx-lite requester with correlation and a reply deadline. The callback gets
/// nullopt when the HSS is unknown or silent past the deadline.
class CxClient {
 public:
  using Callback = std::function<void(const std::optional<hss::CxMessage>&)>;

  CxClient(net::Runtime& runtime, net::NetAddress self, net::NetAddress hss,
           net::Duration timeout = net::Duration{2000})
      : runtime_(runtime), self_(std::move(self)), hss_(std::move(hss)), timeout_(timeout) {}

  void request(hss::CxMessage msg, Callback cb);
  /// Returns false for answers nobody is waiting for.
  bool on_answer(const hss::CxMessage& answer);
  std::size_t pending() const { return pending_.size(); }
  const net::NetAddress& hss() const { return hss_; }

 private:
  struct Pending {
    Callback cb;
    net::Runtime::TimerId timer = 0;
  };

  net::Runtime& runtime_;
  net::NetAddress self_;
  net::NetAddress hss_;
  net::Duration timeout_;
  std::uint64_t next_id_ = 0;
  std::map<std::uint64_t, Pending> pending_;
};

}  // namespace imstb::ims
