#include <stdexcept>

#include "imstb/harness/runner.hpp"

namespace imstb::harness {

namespace {

// Kept as JSON so the exported scenarios/ files read the same as the source.

constexpr const char* kProxyInvite = R"({
  "name": "fig2_3_proxy_invite",
  "description": "INVITE through a stateful proxy; the 200 and the ACK retrace the proxy.",
  "topology": "sip-proxy",
  "timeline": [{"at": 0, "actor": "caller", "action": "invite", "args": {"target": "callee"}}],
  "expectations": [{
    "name": "proxy ladder",
    "mode": "Exact",
    "steps": [
      {"src": "caller", "dst": "proxy", "kind": "INVITE"},
      {"src": "proxy", "dst": "callee", "kind": "INVITE"},
      {"src": "callee", "dst": "proxy", "kind": "200"},
      {"src": "proxy", "dst": "caller", "kind": "200"},
      {"src": "caller", "dst": "proxy", "kind": "ACK"},
      {"src": "proxy", "dst": "callee", "kind": "ACK"}
    ]
  }]
})";

constexpr const char* kRedirectInvite = R"({
  "name": "fig5_6_redirect_invite",
  "description": "INVITE to a redirect server; the caller re-sends it to the Contact of the 302.",
  "topology": "sip-redirect",
  "timeline": [{"at": 0, "actor": "caller", "action": "invite", "args": {"target": "callee"}}],
  "expectations": [{
    "name": "redirect ladder",
    "mode": "Exact",
    "steps": [
      {"src": "caller", "dst": "redirect", "kind": "INVITE"},
      {"src": "redirect", "dst": "caller", "kind": "302"},
      {"src": "caller", "dst": "redirect", "kind": "ACK"},
      {"src": "caller", "dst": "callee", "kind": "INVITE"},
      {"src": "callee", "dst": "caller", "kind": "200"},
      {"src": "caller", "dst": "callee", "kind": "ACK"}
    ]
  }]
})";

constexpr const char* kRegisterSubscribe = R"({
  "name": "fig10_register_subscribe",
  "description": "A student registers through P-, I- and S-CSCF, then subscribes to the exam service.",
  "topology": "ims",
  "fixtures": {"teacher": true, "students": 1, "groups": {"sip:cs101@ims.kau.test": ["s1"]}},
  "timeline": [
    {"at": 0, "actor": "s1", "action": "register"},
    {"at": 1000, "actor": "s1", "action": "subscribe"}
  ],
  "expectations": [{
    "name": "register then subscribe",
    "mode": "Subsequence",
    "steps": [
      {"src": "s1", "dst": "P-CSCF", "kind": "REGISTER"},
      {"src": "P-CSCF", "dst": "I-CSCF", "kind": "REGISTER"},
      {"src": "I-CSCF", "dst": "HSS", "kind": "UAR"},
      {"src": "I-CSCF", "dst": "S-CSCF", "kind": "REGISTER"},
      {"src": "S-CSCF", "dst": "HSS", "kind": "SAR"},
      {"src": "P-CSCF", "dst": "s1", "kind": "200"},
      {"src": "s1", "dst": "P-CSCF", "kind": "SUBSCRIBE"},
      {"src": "S-CSCF", "dst": "XDMS", "kind": "SUBSCRIBE"},
      {"src": "XDMS", "dst": "S-CSCF", "kind": "202"},
      {"src": "P-CSCF", "dst": "s1", "kind": "NOTIFY", "headers": {"Subscription-State": "active"}}
    ]
  }]
})";

constexpr const char* kCscfChain = R"({
  "name": "fig11_cscf_chain",
  "description": "Registration walks UA, P-CSCF, I-CSCF, HSS and S-CSCF; the 200 retraces the chain.",
  "topology": "ims",
  "fixtures": {"students": 1},
  "timeline": [{"at": 0, "actor": "s1", "action": "register"}],
  "expectations": [{
    "name": "cscf chain",
    "mode": "Exact",
    "steps": [
      {"src": "s1", "dst": "P-CSCF", "kind": "REGISTER"},
      {"src": "P-CSCF", "dst": "I-CSCF", "kind": "REGISTER"},
      {"src": "I-CSCF", "dst": "HSS", "kind": "UAR"},
      {"src": "HSS", "dst": "I-CSCF", "kind": "UAA"},
      {"src": "I-CSCF", "dst": "S-CSCF", "kind": "REGISTER"},
      {"src": "S-CSCF", "dst": "HSS", "kind": "SAR"},
      {"src": "HSS", "dst": "S-CSCF", "kind": "SAA"},
      {"src": "S-CSCF", "dst": "I-CSCF", "kind": "200"},
      {"src": "I-CSCF", "dst": "P-CSCF", "kind": "200"},
      {"src": "P-CSCF", "dst": "s1", "kind": "200"}
    ]
  }]
})";

constexpr const char* kExamE2e = R"({
  "name": "fig8_exam_e2e",
  "description": "One teacher and ten students in cs101, eight of them registered. The exam opens at 5 s, scripted students answer, it closes and is graded at 65 s.",
  "topology": "ims",
  "fixtures": {
    "teacher": true,
    "students": 10,
    "groups": {"sip:cs101@ims.kau.test": ["s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10"]},
    "auto_answer": {
      "s1": {"q1": 1, "q2": 0, "q3": 2, "q4": 3},
      "s2": {"q1": 1, "q2": 0, "q3": 2, "q4": 0},
      "s3": {"q1": 0, "q2": 0, "q3": 2, "q4": 3},
      "s4": {"q1": 1, "q2": 1, "q3": 1},
      "s5": {"q1": 2, "q2": 2, "q3": 0, "q4": 0},
      "s6": {"q2": 0},
      "s7": {"q1": 1, "q2": 0, "q3": 0, "q4": 3},
      "s8": {"q1": 0, "q2": 1, "q3": 2, "q4": 2}
    },
    "channel": {"s7": "http", "s8": "http"}
  },
  "timeline": [
    {"at": 0, "actor": "teacher", "action": "register"},
    {"at": 0, "actor": "s1", "action": "register"},
    {"at": 0, "actor": "s2", "action": "register"},
    {"at": 0, "actor": "s3", "action": "register"},
    {"at": 0, "actor": "s4", "action": "register"},
    {"at": 0, "actor": "s5", "action": "register"},
    {"at": 0, "actor": "s6", "action": "register"},
    {"at": 0, "actor": "s7", "action": "register"},
    {"at": 0, "actor": "s8", "action": "register"},
    {"at": 1000, "actor": "s1", "action": "subscribe"},
    {"at": 2000, "actor": "teacher", "action": "provision_exam", "args": {"exam": {
      "exam_id": "exam-cs101",
      "title": "CS101 quiz",
      "group_uri": "sip:cs101@ims.kau.test",
      "open_at": 5000,
      "close_at": 65000,
      "questions": [
        {"qid": "q1", "prompt": "Which node is the first contact point of a UE?",
         "choices": ["I-CSCF", "P-CSCF", "S-CSCF"], "correct_index": 1, "points": 1},
        {"qid": "q2", "prompt": "Which node stores subscriber profiles?",
         "choices": ["HSS", "XDMS", "AS"], "correct_index": 0, "points": 2},
        {"qid": "q3", "prompt": "Which method carries the exam to students?",
         "choices": ["INVITE", "NOTIFY", "MESSAGE"], "correct_index": 2, "points": 1},
        {"qid": "q4", "prompt": "Which response redirects a request?",
         "choices": ["200", "404", "100", "302"], "correct_index": 3, "points": 1}
      ]}}}
  ],
  "expectations": [
    {
      "name": "exam delivery, SIP submission and result",
      "mode": "Subsequence",
      "steps": [
        {"src": "s1", "dst": "P-CSCF", "kind": "REGISTER"},
        {"src": "P-CSCF", "dst": "s1", "kind": "200"},
        {"src": "s1", "dst": "P-CSCF", "kind": "SUBSCRIBE"},
        {"src": "P-CSCF", "dst": "s1", "kind": "NOTIFY", "headers": {"Subscription-State": "active"}},
        {"src": "AS", "dst": "S-CSCF", "kind": "MESSAGE", "content_type": "application/exam+json"},
        {"src": "P-CSCF", "dst": "s1", "kind": "MESSAGE", "content_type": "application/exam+json"},
        {"src": "s1", "dst": "P-CSCF", "kind": "200"},
        {"src": "s1", "dst": "P-CSCF", "kind": "MESSAGE", "content_type": "application/exam-answers+json"},
        {"src": "S-CSCF", "dst": "AS", "kind": "MESSAGE", "content_type": "application/exam-answers+json"},
        {"src": "P-CSCF", "dst": "s1", "kind": "MESSAGE", "content_type": "application/exam-receipt+json"},
        {"src": "P-CSCF", "dst": "s1", "kind": "MESSAGE", "content_type": "application/exam-result+json"}
      ]
    },
    {
      "name": "teacher summary",
      "mode": "Subsequence",
      "steps": [
        {"src": "AS", "dst": "S-CSCF", "kind": "MESSAGE", "content_type": "application/exam-result+json"},
        {"src": "P-CSCF", "dst": "teacher", "kind": "MESSAGE", "content_type": "application/exam-result+json"},
        {"src": "teacher", "dst": "P-CSCF", "kind": "200"}
      ]
    }
  ]
})";

constexpr const char* kLossyRegister = R"({
  "name": "lossy_register",
  "description": "Registration with 20% SIP datagram loss; transactions retransmit until it completes.",
  "topology": "ims",
  "loss": 0.2,
  "fixtures": {"students": 1},
  "timeline": [{"at": 0, "actor": "s1", "action": "register"}],
  "expectations": [{
    "name": "registration completes",
    "mode": "Subsequence",
    "steps": [
      {"src": "s1", "dst": "P-CSCF", "kind": "REGISTER"},
      {"src": "I-CSCF", "dst": "HSS", "kind": "UAR"},
      {"src": "S-CSCF", "dst": "HSS", "kind": "SAR"},
      {"src": "P-CSCF", "dst": "s1", "kind": "200"}
    ]
  }]
})";

}  // namespace

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const char* text :
       {kProxyInvite, kRedirectInvite, kRegisterSubscribe, kCscfChain, kExamE2e, kLossyRegister})
    out.push_back(parse_scenario(nlohmann::json::parse(text)));
  return out;
}

const Scenario& builtin(const std::string& name) {
  static const auto all = builtin_scenarios();
  for (const auto& s : all)
    if (s.name == name) return s;
  throw std::out_of_range("no builtin scenario " + name);
}

}  // namespace imstb::harness
