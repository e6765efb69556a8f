#include "imstb/ims/cscf.hpp"

#include <algorithm>

#include "imstb/ims/ifc.hpp"
#include "imstb/net/subscription.hpp"

namespace imstb::ims {

namespace {

hss::CxMessage cx_request(hss::CxOp op, const std::string& aor) {
  hss::CxMessage m;
  m.op = op;
  m.impu = aor;
  m.impi = aor;
  return m;
}

std::optional<std::string> passkey_of(const sip::SipMessage& req) {
  const auto v = req.header(kPasskeyHeader);
  if (!v) return std::nullopt;
  return std::string(*v);
}

}  // namespace

// ---------------------------------------------------------------- P-CSCF

Pcscf::Pcscf(net::Runtime& runtime, net::NetAddress self, net::NetAddress home_icscf,
             std::set<net::NetAddress> core, net::TimerConfig timers)
    : ProxyNode(runtime, std::move(self), "pcscf", timers),
      home_icscf_(std::move(home_icscf)),
      core_(std::move(core)) {
  core_.insert(home_icscf_);
}

std::optional<Pcscf::UaRoute> Pcscf::route_for(std::string_view aor) const {
  const auto it = routes_.find(std::string(aor));
  if (it == routes_.end() || it->second.expires_at <= now()) return std::nullopt;
  return it->second;
}

void Pcscf::on_request(const sip::SipMessage& req, const net::NetAddress& from) {
  std::erase_if(routes_, [this](const auto& kv) { return kv.second.expires_at <= now(); });
  if (reject_if_exhausted(req)) return;
  if (core_.contains(from)) downstream(req);
  else upstream(req, from);
}

void Pcscf::upstream(const sip::SipMessage& req, const net::NetAddress& from) {
  if (req.method == sip::Method::Register) {
    auto out = req;
    out.set_header("Path", route_header("pcscf"));
    forward(out, home_icscf_, [this, req, from](const sip::SipMessage& resp) { learn_registration(req, from, resp); });
    return;
  }
  const auto route = route_for(req.from.uri.aor());
  if (!route) {
    if (req.method != sip::Method::Ack) respond(req, sip::StatusCode::Forbidden);
    return;
  }
  forward(req, route->scscf);
}

void Pcscf::downstream(const sip::SipMessage& req) {
  const auto route = route_for(req.request_uri.aor());
  if (!route) {
    if (req.method != sip::Method::Ack) respond(req, sip::StatusCode::NotFound);
    return;
  }
  forward(req, route->ua);
}

void Pcscf::learn_registration(const sip::SipMessage& req, const net::NetAddress& from,
                               const sip::SipMessage& resp) {
  if (resp.status != sip::StatusCode::Ok) return;
  const auto aor = req.to.uri.aor();
  const auto granted = resp.expires.value_or(0);
  const auto scscf = resp.header("Service-Route") ? route_target(*resp.header("Service-Route")) : std::nullopt;
  if (granted == 0 || !scscf) {
    routes_.erase(aor);
    return;
  }
  routes_[aor] = {req.contact ? req.contact->uri.address() : from, *scscf,
                  now() + std::chrono::seconds(granted)};
}

// ---------------------------------------------------------------- I-CSCF

Icscf::Icscf(net::Runtime& runtime, net::NetAddress self, net::NetAddress hss,
             std::map<std::string, net::NetAddress> scscf_directory, net::TimerConfig timers)
    : ProxyNode(runtime, self, "icscf", timers), cx_(runtime, self, std::move(hss)),
      directory_(std::move(scscf_directory)) {}

void Icscf::on_request(const sip::SipMessage& req, const net::NetAddress&) {
  if (reject_if_exhausted(req)) return;
  if (req.method == sip::Method::Ack) return;
  const bool reg = req.method == sip::Method::Register;
  const auto aor = reg ? req.to.uri.aor() : req.request_uri.aor();
  cx_.request(cx_request(reg ? hss::CxOp::UAR : hss::CxOp::LIR, aor),
              [this, req](const std::optional<hss::CxMessage>& answer) { route_to_named(req, answer); });
}

void Icscf::route_to_named(const sip::SipMessage& req, const std::optional<hss::CxMessage>& answer) {
  if (!answer) {
    respond(req, sip::StatusCode::ServerInternalError);
    return;
  }
  if (answer->result != hss::CxResult::Success) {
    respond(req, sip::StatusCode::NotFound);
    return;
  }
  const auto it = answer->scscf_name ? directory_.find(*answer->scscf_name) : directory_.end();
  if (it == directory_.end()) {
    respond(req, sip::StatusCode::ServerInternalError);
    return;
  }
  forward(req, it->second);
}

void Icscf::on_cx(const hss::CxMessage& msg, const net::NetAddress&) { cx_.on_answer(msg); }

// ---------------------------------------------------------------- S-CSCF

Scscf::Scscf(net::Runtime& runtime, net::NetAddress self, Config config, net::TimerConfig timers)
    : ProxyNode(runtime, self, "scscf", timers), config_(std::move(config)), cx_(runtime, self, config_.hss) {
  if (config_.xdms) config_.service_origins.insert(*config_.xdms);
}

std::map<std::string, Scscf::Binding> Scscf::bindings() const {
  std::map<std::string, Binding> out;
  for (const auto& [aor, b] : bindings_)
    if (live(b)) out.emplace(aor, b);
  return out;
}

const Scscf::Binding* Scscf::binding_for(std::string_view aor) const {
  const auto it = bindings_.find(std::string(aor));
  return it != bindings_.end() && live(it->second) ? &it->second : nullptr;
}

void Scscf::sweep() {
  for (auto it = bindings_.begin(); it != bindings_.end();) {
    if (it->second.pending_removal || it->second.expires_at > now()) {
      ++it;
      continue;
    }
    const auto aor = it->first;
    it = bindings_.erase(it);
    profiles_.erase(aor);
    transition("Registered", "Unregistered", "expired " + aor);
    auto sar = cx_request(hss::CxOp::SAR, aor);
    sar.scscf_name = config_.name;
    sar.assignment = hss::Assignment::Deregister;
    cx_.request(std::move(sar), [](const std::optional<hss::CxMessage>&) {});
  }
}

void Scscf::on_request(const sip::SipMessage& req, const net::NetAddress& from) {
  sweep();
  if (reject_if_exhausted(req)) return;
  if (req.method == sip::Method::Register) handle_register(req, from);
  else route(req, from);
}

void Scscf::handle_register(const sip::SipMessage& req, const net::NetAddress& from) {
  const auto aor = req.to.uri.aor();
  const auto expires = std::min(req.expires.value_or(kMaxRegistrationSeconds), kMaxRegistrationSeconds);
  if (expires == 0) {
    deregister(req, aor);
    return;
  }
  if (!req.contact) {
    respond(req, sip::StatusCode::TemporarilyUnavailable);
    return;
  }
  auto sar = cx_request(hss::CxOp::SAR, aor);
  sar.scscf_name = config_.name;
  sar.assignment = hss::Assignment::Register;
  sar.passkey_offer = passkey_of(req);
  const auto path = req.header("Path");
  const auto pcscf = (path ? route_target(*path) : std::nullopt).value_or(from);
  const auto contact = req.contact->uri.address();

  cx_.request(std::move(sar), [this, req, aor, expires, pcscf, contact](const std::optional<hss::CxMessage>& ans) {
    if (!ans) {
      respond(req, sip::StatusCode::ServerInternalError);
      return;
    }
    if (ans->result == hss::CxResult::UserUnknown) {
      respond(req, sip::StatusCode::NotFound);
      return;
    }
    if (ans->result != hss::CxResult::Success) {
      respond(req, sip::StatusCode::Forbidden);
      return;
    }
    if (ans->profile) {
      try {
        profiles_[aor] = ans->profile->get<hss::SubscriberProfile>();
      } catch (const std::exception&) {
        profiles_.erase(aor);
      }
    }
    const bool existed = binding_for(aor) != nullptr;
    bindings_[aor] = {contact, pcscf, now(), now() + std::chrono::seconds(expires), false};
    transition(existed ? "Registered" : "Unregistered", "Registered", "register " + aor);
    auto resp = sip::make_response(req, sip::StatusCode::Ok);
    resp.expires = expires;
    resp.contact = req.contact;
    resp.set_header("Service-Route", route_header("orig"));
    endpoint().send_response(resp);
  });
}

void Scscf::deregister(const sip::SipMessage& req, const std::string& aor) {
  const auto passkey = passkey_of(req);
  if (!passkey) {
    respond(req, sip::StatusCode::Forbidden);
    return;
  }
  if (const auto it = bindings_.find(aor); it != bindings_.end()) it->second.pending_removal = true;
  auto sar = cx_request(hss::CxOp::SAR, aor);
  sar.scscf_name = config_.name;
  sar.assignment = hss::Assignment::Deregister;
  sar.passkey_offer = passkey;
  cx_.request(std::move(sar), [this, req, aor](const std::optional<hss::CxMessage>& ans) {
    const auto it = bindings_.find(aor);
    if (!ans || ans->result != hss::CxResult::Success) {
      if (it != bindings_.end()) it->second.pending_removal = false;
      if (!ans) respond(req, sip::StatusCode::ServerInternalError);
      else if (ans->result == hss::CxResult::UserUnknown) respond(req, sip::StatusCode::NotFound);
      else respond(req, sip::StatusCode::Forbidden);
      return;
    }
    if (it != bindings_.end()) {
      bindings_.erase(it);
      transition("Registered", "Unregistered", "deregister " + aor);
    }
    profiles_.erase(aor);
    auto resp = sip::make_response(req, sip::StatusCode::Ok);
    resp.expires = 0;
    endpoint().send_response(resp);
  });
}

void Scscf::route(const sip::SipMessage& req, const net::NetAddress& from) {
  if (config_.service_origins.contains(from)) {
    terminate(req);
    return;
  }
  const auto originator = req.from.uri.aor();
  if (!binding_for(originator)) {
    if (req.method != sip::Method::Ack) respond(req, sip::StatusCode::Forbidden);
    return;
  }
  if (const auto it = profiles_.find(originator); it != profiles_.end()) {
    const auto targets = evaluate_ifc(it->second.trigger_rules, req);
    if (!targets.empty()) {
      forward(req, targets.front());
      return;
    }
  }
  if (req.method == sip::Method::Subscribe && config_.xdms && req.event &&
      net::event_package(*req.event) == "exam-service") {
    forward(req, *config_.xdms);
    return;
  }
  terminate(req);
}

void Scscf::terminate(const sip::SipMessage& req) {
  const bool ack = req.method == sip::Method::Ack;
  if (req.request_uri.host != config_.home_domain) {
    if (!ack) respond(req, sip::StatusCode::NotFound);
    return;
  }
  const auto* b = binding_for(req.request_uri.aor());
  if (!b) {
    if (!ack) respond(req, sip::StatusCode::TemporarilyUnavailable);
    return;
  }
  forward(req, b->pcscf);
}

void Scscf::on_cx(const hss::CxMessage& msg, const net::NetAddress&) { cx_.on_answer(msg); }

}  // namespace imstb::ims
