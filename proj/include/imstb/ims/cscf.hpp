#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "imstb/hss/profile.hpp"
#include "imstb/ims/cx_client.hpp"
#include "imstb/ims/proxy.hpp"

namespace imstb::ims {

inline constexpr std::string_view kPasskeyHeader = "X-Passkey";
inline constexpr std::uint32_t kMaxRegistrationSeconds = 3600;

/// Edge proxy: the first and last IMS hop for every UA message.
class Pcscf : public ProxyNode {
 public:
  struct UaRoute {
    net::NetAddress ua;
    net::NetAddress scscf;  // learned from Service-Route
    net::Instant expires_at{0};
  };

  /// `core` lists the I-CSCF and S-CSCF addresses; requests from them travel downstream.
  Pcscf(net::Runtime& runtime, net::NetAddress self, net::NetAddress home_icscf, std::set<net::NetAddress> core,
        net::TimerConfig timers = {});

  /// Unexpired routes only.
  std::optional<UaRoute> route_for(std::string_view aor) const;
  const std::map<std::string, UaRoute>& ua_routes() const { return routes_; }

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  void upstream(const sip::SipMessage& req, const net::NetAddress& from);
  void downstream(const sip::SipMessage& req);
  void learn_registration(const sip::SipMessage& req, const net::NetAddress& from, const sip::SipMessage& resp);

  net::NetAddress home_icscf_;
  std::set<net::NetAddress> core_;
  std::map<std::string, UaRoute> routes_;
};

/// Interrogating CSCF: asks the HSS which S-CSCF serves an identity and hides
/// that S-CSCF behind its own Via.
class Icscf : public ProxyNode {
 public:
  Icscf(net::Runtime& runtime, net::NetAddress self, net::NetAddress hss,
        std::map<std::string, net::NetAddress> scscf_directory, net::TimerConfig timers = {});

  const CxClient& cx() const { return cx_; }

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;
  void on_cx(const hss::CxMessage& msg, const net::NetAddress& from) override;

 private:
  void route_to_named(const sip::SipMessage& req, const std::optional<hss::CxMessage>& answer);

  CxClient cx_;
  std::map<std::string, net::NetAddress> directory_;
};

/// Serving CSCF: registrar, iFC evaluation and terminating routing.
class Scscf : public ProxyNode {
 public:
  struct Config {
    std::string name = "scscf-1";
    net::NetAddress hss;
    std::string home_domain = "ims.kau.test";
    std::optional<net::NetAddress> xdms;
    /// Application servers and the XDMS: their requests skip iFC.
    std::set<net::NetAddress> service_origins;
  };

  struct Binding {
    net::NetAddress contact;
    net::NetAddress pcscf;
    net::Instant created_at{0};
    net::Instant expires_at{0};
    bool pending_removal = false;
  };

  Scscf(net::Runtime& runtime, net::NetAddress self, Config config, net::TimerConfig timers = {});

  /// Live bindings as seen by routing: unexpired and not being removed.
  std::map<std::string, Binding> bindings() const;
  const Binding* binding_for(std::string_view aor) const;
  const Config& config() const { return config_; }
  const CxClient& cx() const { return cx_; }

  /// Drops expired bindings and tells the HSS. Runs on every handled event.
  void sweep();

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;
  void on_cx(const hss::CxMessage& msg, const net::NetAddress& from) override;

 private:
  void handle_register(const sip::SipMessage& req, const net::NetAddress& from);
  void deregister(const sip::SipMessage& req, const std::string& aor);
  void route(const sip::SipMessage& req, const net::NetAddress& from);
  void terminate(const sip::SipMessage& req);
  bool live(const Binding& b) const { return !b.pending_removal && b.expires_at > now(); }

  Config config_;
  CxClient cx_;
  std::map<std::string, Binding> bindings_;
  std::map<std::string, hss::SubscriberProfile> profiles_;
};

}  // namespace imstb::ims
