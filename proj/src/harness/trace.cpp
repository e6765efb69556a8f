#include "imstb/harness/trace.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "imstb/util/text.hpp"

namespace imstb::harness {

namespace {

using nlohmann::json;

std::string rtrim(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::optional<std::string> header_value(const sip::SipMessage& m, std::string_view name) {
  const auto n = util::to_lower(name);
  if (n == "event") return m.event;
  if (n == "content-type") return m.content_type;
  if (n == "expires") return m.expires ? std::optional(std::to_string(*m.expires)) : std::nullopt;
  if (n == "call-id") return m.call_id;
  if (const auto v = m.header(name)) return std::string(*v);
  return std::nullopt;
}

bool kind_matches(std::string_view kind, const TraceEvent& ev) {
  if (!ev.sip) return ev.label == kind;
  const auto& m = *ev.sip;
  if (kind.find(' ') != std::string_view::npos) return ev.label == kind;
  if (kind.size() == 3 && std::isdigit(static_cast<unsigned char>(kind[0]))) {
    if (!m.is_response()) return false;
    const auto code = std::to_string(sip::code_of(m.status));
    if (kind.substr(1) == "xx") return code[0] == kind[0];
    return code == kind;
  }
  return m.is_request() && sip::to_string(m.method) == kind;
}

std::string describe(const FlowStep& s) { return s.kind + " " + s.src + "->" + s.dst; }
std::string describe(const TraceEvent& e) {
  return e.label + " " + e.src + "->" + e.dst + " (seq " + std::to_string(e.seq) + ", t=" + std::to_string(e.time) +
         ")";
}

}  // namespace

TraceEvent make_trace_event(const net::WireEvent& ev, const std::map<net::NetAddress, std::string>& roles) {
  auto role = [&](const net::NetAddress& a) {
    const auto it = roles.find(a);
    return it == roles.end() ? a.to_string() : it->second;
  };
  TraceEvent out;
  out.seq = ev.seq;
  out.time = ev.time.count();
  out.src = role(ev.src);
  out.dst = role(ev.dst);
  out.label = ev.label();
  out.dropped = ev.disposition == net::Disposition::Dropped;
  if (const auto* m = ev.sip()) {
    out.payload = sip::serialize_message(*m);
    out.sip = *m;
  } else {
    out.payload = hss::encode_line(*ev.cx());
  }
  return out;
}

Trace capture_trace(const net::Network& net, const std::map<net::NetAddress, std::string>& roles) {
  Trace t;
  t.end_time = net.now().count();
  t.quiescent = net.quiescent();
  for (const auto& ev : net.wire_events()) t.wire_events.push_back(make_trace_event(ev, roles));
  for (const auto& tr : net.transitions())
    t.node_transitions.push_back({tr.time.count(), tr.node, tr.from, tr.to, tr.cause});
  return t;
}

json to_json(const Trace& t) {
  json events = json::array();
  for (const auto& e : t.wire_events)
    events.push_back({{"seq", e.seq},
                      {"time", e.time},
                      {"src", e.src},
                      {"dst", e.dst},
                      {"label", e.label},
                      {"dropped", e.dropped},
                      {"protocol", e.sip ? "sip" : "cx"},
                      {"payload", e.payload}});
  json transitions = json::array();
  for (const auto& tr : t.node_transitions)
    transitions.push_back(
        {{"time", tr.time}, {"node", tr.node}, {"from", tr.from}, {"to", tr.to}, {"cause", tr.cause}});
  return json{{"scenario", t.scenario},     {"seed", t.seed},           {"config_hash", t.config_hash},
              {"end_time", t.end_time},     {"quiescent", t.quiescent}, {"wire_events", events},
              {"node_transitions", transitions}};
}

Trace trace_from_json(const json& j) {
  Trace t;
  t.scenario = j.at("scenario").get<std::string>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.config_hash = j.at("config_hash").get<std::string>();
  t.end_time = j.at("end_time").get<std::int64_t>();
  t.quiescent = j.at("quiescent").get<bool>();
  for (const auto& e : j.at("wire_events")) {
    TraceEvent ev{e.at("seq").get<std::uint64_t>(), e.at("time").get<std::int64_t>(),
                  e.at("src").get<std::string>(),   e.at("dst").get<std::string>(),
                  e.at("label").get<std::string>(), e.at("dropped").get<bool>(),
                  e.at("payload").get<std::string>(), std::nullopt};
    if (e.at("protocol") == "sip") ev.sip = sip::parse_message(ev.payload);
    t.wire_events.push_back(std::move(ev));
  }
  for (const auto& tr : j.at("node_transitions"))
    t.node_transitions.push_back({tr.at("time").get<std::int64_t>(), tr.at("node").get<std::string>(),
                                  tr.at("from").get<std::string>(), tr.at("to").get<std::string>(),
                                  tr.at("cause").get<std::string>()});
  return t;
}

std::string canonical_json(const Trace& t) { return to_json(t).dump(1) + "\n"; }

bool step_matches(const FlowStep& step, const TraceEvent& ev) {
  if (ev.src != step.src || ev.dst != step.dst) return false;
  if (!kind_matches(step.kind, ev)) return false;
  if (!step.content_type && step.headers.empty()) return true;
  if (!ev.sip) return false;
  if (step.content_type && ev.sip->content_type != step.content_type) return false;
  for (const auto& [name, prefix] : step.headers) {
    const auto v = header_value(*ev.sip, name);
    if (!v || !v->starts_with(prefix)) return false;
  }
  return true;
}

FlowMatch assert_flow(const Trace& trace, const FlowPattern& pattern) {
  validate(pattern);
  const auto& steps = pattern.steps;

  if (pattern.mode == MatchMode::Subsequence) {
    std::size_t i = 0;
    const TraceEvent* last = nullptr;
    for (const auto& ev : trace.wire_events) {
      if (i == steps.size()) break;
      if (!ev.dropped && step_matches(steps[i], ev)) {
        last = &ev;
        ++i;
      }
    }
    if (i == steps.size()) return {true, i, "match"};
    return {false, i,
            "step " + std::to_string(i) + " (" + describe(steps[i]) + ") not found" +
                (last ? " after " + describe(*last) : std::string{})};
  }

  std::set<std::string> roles;
  for (const auto& s : steps) roles.insert({s.src, s.dst});
  std::vector<const TraceEvent*> seen;
  for (const auto& ev : trace.wire_events)
    if (!ev.dropped && roles.contains(ev.src) && roles.contains(ev.dst)) seen.push_back(&ev);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i == seen.size())
      return {false, i, "step " + std::to_string(i) + " (" + describe(steps[i]) + "): trace ended"};
    if (!step_matches(steps[i], *seen[i]))
      return {false, i,
              "step " + std::to_string(i) + ": expected " + describe(steps[i]) + ", got " + describe(*seen[i])};
  }
  if (seen.size() > steps.size())
    return {false, steps.size(), "unexpected extra event " + describe(*seen[steps.size()])};
  return {true, steps.size(), "match"};
}

std::string render_ladder(const Trace& trace, const std::vector<std::string>& roles) {
  constexpr std::size_t kWidth = 18;
  constexpr std::size_t kTime = 9;

  std::vector<std::string> cols = roles;
  if (cols.empty()) {
    for (const auto& e : trace.wire_events)
      for (const auto* r : {&e.src, &e.dst})
        if (std::find(cols.begin(), cols.end(), *r) == cols.end()) cols.push_back(*r);
  }
  auto index = [&](const std::string& r) -> std::optional<std::size_t> {
    const auto it = std::find(cols.begin(), cols.end(), r);
    if (it == cols.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cols.begin());
  };
  auto centre = [&](std::size_t c) { return c * kWidth + kWidth / 2; };

  std::string out = "time(ms) ";
  {
    std::string header(cols.size() * kWidth, ' ');
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto name = cols[c].substr(0, kWidth - 2);
      header.replace(centre(c) - name.size() / 2, name.size(), name);
    }
    out += header;
  }
  out = rtrim(out) + "\n";

  for (const auto& e : trace.wire_events) {
    const auto a = index(e.src);
    const auto b = index(e.dst);
    if (!a || !b) continue;
    std::string row(cols.size() * kWidth, ' ');
    for (std::size_t c = 0; c < cols.size(); ++c) row[centre(c)] = '|';
    std::string tail;
    if (*a != *b) {
      const auto lo = centre(std::min(*a, *b));
      const auto hi = centre(std::max(*a, *b));
      for (auto x = lo + 1; x < hi; ++x) row[x] = '-';
      if (*a < *b) row[hi - 1] = '>';
      else row[lo + 1] = '<';
      if (e.label.size() + 4 <= hi - lo) row.replace(lo + 3, e.label.size(), e.label);
      else tail = " " + e.label;
    } else {
      tail = " " + e.label;
    }
    auto line = pad_left(std::to_string(e.time), kTime - 1) + " " + row;
    line = rtrim(line) + tail;
    if (e.dropped) line += " ✗";
    out += line + "\n";
  }
  return out;
}

}  // namespace imstb::harness
