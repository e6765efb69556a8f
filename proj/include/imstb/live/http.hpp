#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

#include "imstb/net/address.hpp"
#include "imstb/util/http.hpp"
#include "imstb/xdms/store.hpp"

namespace httplib {
class Server;
}

namespace imstb::live {

using Handler = std::function<util::HttpResponse(const util::HttpRequest&)>;

/// "host:port"; a bare host takes `default_port`. Throws std::invalid_argument.
net::NetAddress parse_hostport(std::string_view text, std::uint16_t default_port);

/// Routes every method and path to `handler` with `mu` held, so handlers can
/// touch nodes owned by a LiveRuntime loop. Uncaught exceptions become 500.
void route_all(httplib::Server& server, std::mutex& mu, Handler handler);

/// Blocking client, one connection per call. Connection failures come back as
/// 503 "Unavailable" rather than throwing.
class HttpClient {
 public:
  HttpClient(std::string host, std::uint16_t port, std::chrono::milliseconds timeout = std::chrono::seconds{5});
  util::HttpResponse operator()(const util::HttpRequest& req) const;

 private:
  std::string host_;
  std::uint16_t port_;
  std::chrono::milliseconds timeout_;
};

/// DocumentStore over the XDMS XCAP interface. Error bodies map back onto
/// XdmError codes; an unreachable XDMS throws std::runtime_error.
class XcapClient final : public xdms::DocumentStore {
 public:
  explicit XcapClient(HttpClient http) : http_(std::move(http)) {}

  std::string put_document(xdms::XdmDocument doc, const std::optional<std::string>& if_etag) override;
  xdms::XdmDocument get_document(const std::string& auid, const std::string& owner,
                                 const std::string& doc_name) override;
  std::vector<sip::SipUri> resolve_group(const sip::SipUri& group_uri) override;

 private:
  HttpClient http_;
};

}  // namespace imstb::live
