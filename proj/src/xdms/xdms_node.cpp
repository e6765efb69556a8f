#include "imstb/xdms/xdms_node.hpp"

#include <algorithm>

namespace imstb::xdms {

XdmsNode::XdmsNode(net::Runtime& runtime, net::NetAddress self, XdmStore& store, net::TimerConfig timers)
    : SipNode(runtime, std::move(self), "xdms", timers), store_(store) {
  store_.set_change_listener([this](const XdmDocument& doc) { on_store_change(doc); });
}

std::vector<const ExamSubscription*> XdmsNode::active_subscriptions() const {
  std::vector<const ExamSubscription*> out;
  for (const auto& [aor, sub] : subs_)
    if (live(sub)) out.push_back(&sub);
  return out;
}

void XdmsNode::on_request(const sip::SipMessage& req, const net::NetAddress& from) {
  if (req.method == sip::Method::Ack) return;
  if (req.method != sip::Method::Subscribe) {
    respond(req, sip::StatusCode::NotFound);
    return;
  }
  handle_subscribe(req, from);
}

void XdmsNode::handle_subscribe(const sip::SipMessage& req, const net::NetAddress& from) {
  if (!req.event || net::event_package(*req.event) != kExamServiceEvent) {
    respond(req, sip::StatusCode::TemporarilyUnavailable);
    return;
  }
  const auto subscriber = req.from.uri.aor();
  const auto granted = std::min(req.expires.value_or(kMaxSubscriptionSeconds), kMaxSubscriptionSeconds);

  if (granted > 0 && !store_.is_group_member(subscriber)) {
    respond(req, sip::StatusCode::Forbidden);
    return;
  }

  auto resp = sip::make_response(req, sip::StatusCode::Accepted);
  resp.expires = granted;
  endpoint().send_response(resp);

  ExamSubscription fresh;
  fresh.subscriber = subscriber;
  fresh.local = req.to;
  fresh.local.set_tag(resp.to.tag().value_or(""));
  fresh.remote = req.from;
  fresh.dialog = {req.call_id, std::string(fresh.local.tag().value_or("")),
                  std::string(req.from.tag().value_or(""))};
  fresh.next_hop = from;
  fresh.expires_at = now() + std::chrono::seconds(granted);

  auto it = subs_.find(subscriber);
  const auto same_dialog = [&](const ExamSubscription& s) {
    return s.dialog.call_id == fresh.dialog.call_id && s.dialog.remote_tag == fresh.dialog.remote_tag;
  };
  if (granted == 0) {
    // Unsubscribe: the final NOTIFY goes on the dialog being ended.
    auto& ending = (it != subs_.end() && same_dialog(it->second)) ? it->second : fresh;
    notify(ending, "terminated;reason=timeout");
    if (it != subs_.end()) {
      transition("Active", "Terminated", "unsubscribe " + subscriber);
      subs_.erase(it);
    }
    return;
  }
  if (it != subs_.end() && same_dialog(it->second)) {
    it->second.expires_at = fresh.expires_at;
    it->second.next_hop = from;
  } else {
    subs_.insert_or_assign(subscriber, std::move(fresh));
    it = subs_.find(subscriber);
    transition("Idle", "Active", "subscribe " + subscriber);
  }
  notify(it->second, "active");
}

void XdmsNode::notify(ExamSubscription& sub, std::string_view state, std::string_view changed) {
  sip::SipMessage n;
  n.kind = sip::MessageKind::Request;
  n.method = sip::Method::Notify;
  n.request_uri = sub.remote.uri;
  sip::push_via(n, address(), endpoint().ids());
  n.max_forwards = 70;
  n.from = sub.local;
  n.to = sub.remote;
  n.call_id = sub.dialog.call_id;
  n.cseq = {++sub.cseq, sip::Method::Notify};
  n.event = std::string(kExamServiceEvent);
  std::string sub_state(state);
  if (state == "active") {
    const auto left = std::max<std::int64_t>(0, (sub.expires_at - now()).count() + 999) / 1000;
    sub_state += ";expires=" + std::to_string(left);
  }
  n.set_header("Subscription-State", sub_state);
  if (!changed.empty()) n.set_header("X-Xdm-Changed", changed);
  n.content_type = "text/plain";
  n.body = std::string(state.substr(0, state.find(';')));
  try {
    endpoint().send_request(std::move(n), sub.next_hop);
    ++notifies_sent_;
  } catch (const net::UnknownDestination&) {
    // The relaying S-CSCF left the topology; nothing to notify through.
  }
}

void XdmsNode::on_store_change(const XdmDocument& doc) {
  if (doc.auid == kExamDocs) {
    const auto path = doc.auid + "/users/" + doc.owner + "/" + doc.doc_name;
    for (auto& [aor, sub] : subs_)
      if (live(sub)) notify(sub, "active", path);
    return;
  }
  if (doc.auid != kResourceLists) return;
  // Keep Active subscriptions within the union of group members.
  for (auto it = subs_.begin(); it != subs_.end();) {
    if (live(it->second) && !store_.is_group_member(it->first)) {
      notify(it->second, "terminated;reason=deactivated");
      transition("Active", "Terminated", "group change " + it->first);
      it = subs_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace imstb::xdms
