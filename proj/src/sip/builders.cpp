#include "imstb/sip/builders.hpp"

#include "imstb/util/text.hpp"

namespace imstb::sip {

std::string IdGenerator::next_branch() {
  return std::string(kBranchMagic) + "-" + scope_ + "-" + std::to_string(++counter_);
}

std::string IdGenerator::next_tag() { return scope_ + "-t" + std::to_string(++counter_); }

std::string IdGenerator::next_call_id() { return scope_ + "-c" + std::to_string(++counter_); }

SipMessage make_request(Method method, const SipUri& target, const SipUri& from, const SipUri& to,
                        std::string call_id, std::uint32_t cseq, const net::NetAddress& sent_by,
                        IdGenerator& ids) {
  if (cseq < 1) throw std::invalid_argument("CSeq must be >= 1");
  SipMessage msg;
  msg.kind = MessageKind::Request;
  msg.method = method;
  msg.request_uri = target;
  msg.max_forwards = 70;
  msg.from.uri = from;
  msg.from.set_tag(ids.next_tag());
  msg.to.uri = to;
  msg.call_id = std::move(call_id);
  msg.cseq = CSeq{cseq, method};
  push_via(msg, sent_by, ids);
  return msg;
}

SipMessage make_response(const SipMessage& req, StatusCode status, std::string body) {
  if (!req.is_request()) throw NotARequest();
  SipMessage resp;
  resp.kind = MessageKind::Response;
  resp.method = req.method;
  resp.status = status;
  resp.reason = std::string(reason_phrase(status));
  resp.vias = req.vias;
  resp.from = req.from;
  resp.to = req.to;
  resp.call_id = req.call_id;
  resp.cseq = req.cseq;
  if (code_of(status) >= 200 && !resp.to.tag()) resp.to.set_tag(derive_tag(req));
  resp.body = std::move(body);
  return resp;
}

void push_via(SipMessage& msg, const net::NetAddress& self, IdGenerator& ids) {
  Via via;
  via.host = self.host;
  via.port = self.port;
  via.params.emplace_back("branch", ids.next_branch());
  msg.vias.insert(msg.vias.begin(), std::move(via));
}

std::string derive_tag(const SipMessage& req) {
  std::string key = req.call_id;
  key += '|';
  key += req.from.tag().value_or("");
  key += '|';
  key += std::to_string(req.cseq.number);
  key += '|';
  key += req.vias.empty() ? std::string() : req.vias.front().branch();
  return "r" + util::to_hex(util::fnv1a(key)).substr(0, 10);
}

}  // namespace imstb::sip
