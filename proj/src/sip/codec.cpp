// Wire-format parser and canonical serializer.

#include <array>
#include <cctype>
#include <limits>

#include "imstb/sip/message.hpp"
#include "imstb/util/text.hpp"

namespace imstb::sip {

namespace {

enum class Known {
  Via, MaxForwards, Route, RecordRoute, From, To, CallId, CSeq,
  Contact, Expires, Event, ContentType, ContentLength, Other,
};

constexpr std::array<std::pair<Known, std::string_view>, 13> kCanonicalNames{{
    {Known::Via, "Via"},
    {Known::MaxForwards, "Max-Forwards"},
    {Known::Route, "Route"},
    {Known::RecordRoute, "Record-Route"},
    {Known::From, "From"},
    {Known::To, "To"},
    {Known::CallId, "Call-ID"},
    {Known::CSeq, "CSeq"},
    {Known::Contact, "Contact"},
    {Known::Expires, "Expires"},
    {Known::Event, "Event"},
    {Known::ContentType, "Content-Type"},
    {Known::ContentLength, "Content-Length"},
}};

// Compact forms of modelled headers; rejected rather than expanded.
constexpr std::string_view kCompactForms = "vftimlco";

Known classify(std::string_view name) {
  for (const auto& [k, canonical] : kCanonicalNames)
    if (util::iequals(name, canonical)) return k;
  return Known::Other;
}

[[noreturn]] void fail(ParseErrc code, std::string detail) { throw ParseError(code, std::move(detail)); }

bool is_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) &&
        std::string_view("-.!%*_+`'~").find(c) == std::string_view::npos)
      return false;
  return true;
}

std::vector<std::string_view> split_lines(std::string_view head) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= head.size()) {
    const auto nl = head.find('\n', start);
    auto line = head.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

template <typename Fn>
auto header_value(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument&) {
    fail(ParseErrc::MalformedHeader, std::string(name));
  }
}

void parse_start_line(std::string_view line, SipMessage& msg) {
  constexpr std::string_view version = "SIP/2.0";
  if (line.substr(0, version.size() + 1) == "SIP/2.0 ") {
    msg.kind = MessageKind::Response;
    auto rest = line.substr(version.size() + 1);
    if (rest.size() < 3 || !std::isdigit(static_cast<unsigned char>(rest[0])) ||
        !std::isdigit(static_cast<unsigned char>(rest[1])) ||
        !std::isdigit(static_cast<unsigned char>(rest[2])) || (rest.size() > 3 && rest[3] != ' '))
      fail(ParseErrc::MalformedStartLine, std::string(line));
    const auto status = status_from_int(static_cast<int>(*util::parse_int(rest.substr(0, 3))));
    if (!status) fail(ParseErrc::MalformedStartLine, "unsupported status " + std::string(rest.substr(0, 3)));
    msg.status = *status;
    msg.reason = rest.size() > 4 ? std::string(rest.substr(4)) : std::string(reason_phrase(*status));
    return;
  }

  msg.kind = MessageKind::Request;
  const auto sp1 = line.find(' ');
  const auto sp2 = sp1 == std::string_view::npos ? sp1 : line.find(' ', sp1 + 1);
  if (sp1 == std::string_view::npos || sp2 == std::string_view::npos ||
      line.find(' ', sp2 + 1) != std::string_view::npos)
    fail(ParseErrc::MalformedStartLine, std::string(line));
  const auto method_text = line.substr(0, sp1);
  const auto uri_text = line.substr(sp1 + 1, sp2 - sp1 - 1);
  if (line.substr(sp2 + 1) != version || method_text.empty() || uri_text.empty())
    fail(ParseErrc::MalformedStartLine, std::string(line));
  if (!is_token(method_text)) fail(ParseErrc::MalformedStartLine, std::string(line));
  const auto method = method_from_string(method_text);
  if (!method) fail(ParseErrc::UnknownMethod, std::string(method_text));
  msg.method = *method;
  const auto uri = SipUri::try_parse(uri_text);
  if (!uri) fail(ParseErrc::MalformedStartLine, std::string(line));
  msg.request_uri = *uri;
}

}  // namespace

SipMessage parse_message(std::string_view raw) {
  if (raw.empty()) fail(ParseErrc::MalformedStartLine, "empty message");

  std::string_view head = raw;
  std::string_view body;
  bool has_separator = false;
  if (const auto p = raw.find("\r\n\r\n"); p != std::string_view::npos) {
    head = raw.substr(0, p);
    body = raw.substr(p + 4);
    has_separator = true;
  } else if (const auto q = raw.find("\n\n"); q != std::string_view::npos) {
    head = raw.substr(0, q);
    body = raw.substr(q + 2);
    has_separator = true;
  }
  if (!has_separator) {
    while (!head.empty() && (head.back() == '\n' || head.back() == '\r')) head.remove_suffix(1);
  }

  auto lines = split_lines(head);
  SipMessage msg;
  parse_start_line(lines.front(), msg);

  // Unfold continuation lines.
  std::vector<std::string> fields;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      if (fields.empty()) fail(ParseErrc::MalformedHeader, "continuation without header");
      fields.back() += " ";
      fields.back() += util::trim(line);
      continue;
    }
    fields.emplace_back(line);
  }

  bool seen_from = false, seen_to = false, seen_call_id = false, seen_cseq = false;
  std::optional<std::int64_t> content_length;

  for (const auto& field : fields) {
    const auto colon = field.find(':');
    if (colon == std::string::npos) fail(ParseErrc::MalformedHeader, field);
    const std::string_view name = util::trim(std::string_view(field).substr(0, colon));
    const std::string_view value = util::trim(std::string_view(field).substr(colon + 1));
    if (!is_token(name)) fail(ParseErrc::MalformedHeader, field);
    if (name.size() == 1 &&
        kCompactForms.find(static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])))) !=
            std::string_view::npos)
      fail(ParseErrc::MalformedHeader, std::string(name));

    const Known kind = classify(name);
    const std::string canonical = [&] {
      for (const auto& [k, c] : kCanonicalNames)
        if (k == kind) return std::string(c);
      return std::string(name);
    }();
    if (kind != Known::Other && value.empty()) fail(ParseErrc::MalformedHeader, canonical);

    switch (kind) {
      case Known::Via:
        for (auto part : util::split_top_level(value, ','))
          msg.vias.push_back(header_value(canonical, [&] { return Via::parse(part); }));
        break;
      case Known::Route:
      case Known::RecordRoute: {
        auto& list = kind == Known::Route ? msg.routes : msg.record_routes;
        for (auto part : util::split_top_level(value, ','))
          list.push_back(header_value(canonical, [&] { return NameAddr::parse(part); }));
        break;
      }
      case Known::MaxForwards: {
        const auto v = util::parse_int(value);
        if (msg.max_forwards || !v || *v < 0 || *v > 70) fail(ParseErrc::MalformedHeader, canonical);
        msg.max_forwards = static_cast<int>(*v);
        break;
      }
      case Known::From:
      case Known::To: {
        bool& seen = kind == Known::From ? seen_from : seen_to;
        if (seen) fail(ParseErrc::MalformedHeader, canonical);
        seen = true;
        (kind == Known::From ? msg.from : msg.to) =
            header_value(canonical, [&] { return NameAddr::parse(value); });
        break;
      }
      case Known::CallId:
        if (seen_call_id || value.find_first_of(" \t") != std::string_view::npos)
          fail(ParseErrc::MalformedHeader, canonical);
        seen_call_id = true;
        msg.call_id = std::string(value);
        break;
      case Known::CSeq: {
        if (seen_cseq) fail(ParseErrc::MalformedHeader, canonical);
        seen_cseq = true;
        const auto sp = value.find_first_of(" \t");
        if (sp == std::string_view::npos) fail(ParseErrc::MalformedHeader, canonical);
        const auto number = util::parse_int(value.substr(0, sp));
        if (!number || *number < 1 || *number > std::numeric_limits<std::int32_t>::max())
          fail(ParseErrc::MalformedHeader, canonical);
        const auto method_text = util::trim(value.substr(sp));
        const auto method = method_from_string(method_text);
        if (!method) {
          if (!is_token(method_text)) fail(ParseErrc::MalformedHeader, canonical);
          fail(ParseErrc::UnknownMethod, std::string(method_text));
        }
        msg.cseq = CSeq{static_cast<std::uint32_t>(*number), *method};
        break;
      }
      case Known::Contact:
        if (msg.contact) fail(ParseErrc::MalformedHeader, canonical);
        msg.contact = header_value(canonical, [&] { return NameAddr::parse(value); });
        break;
      case Known::Expires: {
        const auto v = util::parse_int(value);
        if (msg.expires || !v || *v < 0 || *v > std::numeric_limits<std::uint32_t>::max())
          fail(ParseErrc::MalformedHeader, canonical);
        msg.expires = static_cast<std::uint32_t>(*v);
        break;
      }
      case Known::Event:
        if (msg.event) fail(ParseErrc::MalformedHeader, canonical);
        msg.event = std::string(value);
        break;
      case Known::ContentType:
        if (msg.content_type) fail(ParseErrc::MalformedHeader, canonical);
        msg.content_type = std::string(value);
        break;
      case Known::ContentLength: {
        const auto v = util::parse_int(value);
        if (content_length || !v || *v < 0) fail(ParseErrc::MalformedHeader, canonical);
        content_length = *v;
        break;
      }
      case Known::Other:
        msg.extra_headers.push_back({std::string(name), std::string(value)});
        break;
    }
  }

  if (msg.vias.empty()) fail(ParseErrc::MissingMandatoryHeader, "Via");
  if (!seen_from) fail(ParseErrc::MissingMandatoryHeader, "From");
  if (!seen_to) fail(ParseErrc::MissingMandatoryHeader, "To");
  if (!seen_call_id) fail(ParseErrc::MissingMandatoryHeader, "Call-ID");
  if (!seen_cseq) fail(ParseErrc::MissingMandatoryHeader, "CSeq");

  if (msg.is_request()) {
    if (msg.cseq.method != msg.method) fail(ParseErrc::MalformedHeader, "CSeq");
  } else {
    msg.method = msg.cseq.method;
  }

  if (content_length && static_cast<std::size_t>(*content_length) != body.size())
    fail(ParseErrc::BodyLengthMismatch,
         "declared " + std::to_string(*content_length) + ", got " + std::to_string(body.size()));
  msg.body = std::string(body);
  return msg;
}

std::string serialize_message(const SipMessage& msg) {
  std::string out;
  out.reserve(256 + msg.body.size());
  auto line = [&out](std::string_view name, std::string_view value) {
    out += name;
    out += ": ";
    out += value;
    out += "\r\n";
  };

  if (msg.is_request()) {
    out += std::string(to_string(msg.method)) + " " + msg.request_uri.to_string() + " SIP/2.0\r\n";
  } else {
    out += "SIP/2.0 " + std::to_string(code_of(msg.status)) + " " +
           (msg.reason.empty() ? std::string(reason_phrase(msg.status)) : msg.reason) + "\r\n";
  }
  for (const auto& via : msg.vias) line("Via", via.to_string());
  if (msg.max_forwards) line("Max-Forwards", std::to_string(*msg.max_forwards));
  for (const auto& r : msg.routes) line("Route", r.to_string());
  for (const auto& r : msg.record_routes) line("Record-Route", r.to_string());
  line("From", msg.from.to_string());
  line("To", msg.to.to_string());
  line("Call-ID", msg.call_id);
  line("CSeq", std::to_string(msg.cseq.number) + " " + std::string(to_string(msg.cseq.method)));
  if (msg.contact) line("Contact", msg.contact->to_string());
  if (msg.expires) line("Expires", std::to_string(*msg.expires));
  if (msg.event) line("Event", *msg.event);
  if (msg.content_type) line("Content-Type", *msg.content_type);
  for (const auto& h : msg.extra_headers) line(h.name, h.value);
  line("Content-Length", std::to_string(msg.body.size()));
  out += "\r\n";
  out += msg.body;
  return out;
}

}  // namespace imstb::sip
