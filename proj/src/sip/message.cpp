#include "imstb/sip/message.hpp"

#include <array>
#include <cctype>

#include "imstb/util/text.hpp"

namespace imstb::sip {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethods{{
    {Method::Register, "REGISTER"},
    {Method::Subscribe, "SUBSCRIBE"},
    {Method::Notify, "NOTIFY"},
    {Method::Message, "MESSAGE"},
    {Method::Invite, "INVITE"},
    {Method::Ack, "ACK"},
    {Method::Bye, "BYE"},
}};

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethods)
    if (method == m) return name;
  return "?";
}

std::optional<Method> method_from_string(std::string_view s) {
  for (const auto& [method, name] : kMethods)
    if (name == s) return method;
  return std::nullopt;
}

std::optional<StatusCode> status_from_int(int code) {
  switch (code) {
    case 100: case 180: case 200: case 202: case 302: case 400: case 401:
    case 403: case 404: case 408: case 480: case 500:
      return static_cast<StatusCode>(code);
    default:
      return std::nullopt;
  }
}

std::string_view reason_phrase(StatusCode code) {
  switch (code) {
    case StatusCode::Trying: return "Trying";
    case StatusCode::Ringing: return "Ringing";
    case StatusCode::Ok: return "OK";
    case StatusCode::Accepted: return "Accepted";
    case StatusCode::MovedTemporarily: return "Moved Temporarily";
    case StatusCode::BadRequest: return "Bad Request";
    case StatusCode::Unauthorized: return "Unauthorized";
    case StatusCode::Forbidden: return "Forbidden";
    case StatusCode::NotFound: return "Not Found";
    case StatusCode::RequestTimeout: return "Request Timeout";
    case StatusCode::TemporarilyUnavailable: return "Temporarily Unavailable";
    case StatusCode::ServerInternalError: return "Server Internal Error";
  }
  return "";
}

std::string_view to_string(ParseErrc e) {
  switch (e) {
    case ParseErrc::MalformedStartLine: return "MalformedStartLine";
    case ParseErrc::MissingMandatoryHeader: return "MissingMandatoryHeader";
    case ParseErrc::MalformedHeader: return "MalformedHeader";
    case ParseErrc::BodyLengthMismatch: return "BodyLengthMismatch";
    case ParseErrc::UnknownMethod: return "UnknownMethod";
  }
  return "?";
}

std::string Via::to_string() const {
  std::string out = "SIP/2.0/" + protocol + " " + host;
  if (port) out += ":" + std::to_string(*port);
  for (const auto& [name, value] : params) {
    out += ";" + name;
    if (!value.empty()) out += "=" + value;
  }
  return out;
}

Via Via::parse(std::string_view text) {
  text = util::trim(text);
  constexpr std::string_view prefix = "SIP/2.0/";
  if (text.size() <= prefix.size() || !util::iequals(text.substr(0, prefix.size()), prefix))
    throw std::invalid_argument("bad Via protocol");
  text.remove_prefix(prefix.size());
  const auto sp = text.find_first_of(" \t");
  if (sp == std::string_view::npos) throw std::invalid_argument("Via missing sent-by");
  Via via;
  via.protocol = std::string(text.substr(0, sp));
  for (auto& c : via.protocol) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (via.protocol.empty()) throw std::invalid_argument("empty Via transport");
  // Reuse the URI grammar for sent-by and its parameters.
  std::string sent_by;
  for (char c : util::trim(text.substr(sp)))
    if (c != ' ' && c != '\t') sent_by += c;
  const auto uri = SipUri::parse("sip:" + sent_by);
  if (uri.user) throw std::invalid_argument("user part in Via");
  via.host = uri.host;
  via.port = uri.port;
  via.params = uri.params;
  return via;
}

std::optional<std::string_view> SipMessage::header(std::string_view name) const {
  for (const auto& h : extra_headers)
    if (util::iequals(h.name, name)) return std::string_view(h.value);
  return std::nullopt;
}

void SipMessage::set_header(std::string_view name, std::string_view value) {
  for (auto& h : extra_headers) {
    if (util::iequals(h.name, name)) {
      h.value = std::string(value);
      return;
    }
  }
  extra_headers.push_back({std::string(name), std::string(value)});
}

void SipMessage::remove_header(std::string_view name) {
  std::erase_if(extra_headers, [&](const Header& h) { return util::iequals(h.name, name); });
}

std::string SipMessage::summary() const {
  if (is_request()) return std::string(to_string(method));
  return std::to_string(code_of(status)) + " " + std::string(to_string(method));
}

}  // namespace imstb::sip
