#include "imstb/sip/uri.hpp"

#include <cctype>
#include <stdexcept>

#include "imstb/util/text.hpp"

namespace imstb::sip {

namespace {

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) ||
         std::string_view("-.!%*_+`'~").find(c) != std::string_view::npos;
}

bool is_host_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

bool is_user_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) ||
         std::string_view("-_.!~*'()&=+$,;?/%").find(c) != std::string_view::npos;
}

bool valid_user(std::string_view user) {
  if (user.empty()) return false;
  for (std::size_t i = 0; i < user.size(); ++i) {
    const char c = user[i];
    if (c == '%') {
      if (i + 2 >= user.size() || !std::isxdigit(static_cast<unsigned char>(user[i + 1])) ||
          !std::isxdigit(static_cast<unsigned char>(user[i + 2])))
        return false;
      i += 2;
      continue;
    }
    if (!is_user_char(c) || c == ';') return false;
  }
  return true;
}

[[noreturn]] void fail(std::string_view what, std::string_view text) {
  throw std::invalid_argument(std::string(what) + ": '" + std::string(text) + "'");
}

Params parse_params(std::string_view text, std::string_view whole) {
  Params params;
  if (text.empty()) return params;
  for (auto part : util::split_top_level(text, ';')) {
    part = util::trim(part);
    if (part.empty()) fail("empty parameter", whole);
    const auto eq = part.find('=');
    std::string_view name = util::trim(part.substr(0, eq));
    std::string_view value = eq == std::string_view::npos ? std::string_view{}
                                                          : util::trim(part.substr(eq + 1));
    if (name.empty()) fail("empty parameter name", whole);
    for (char c : name)
      if (!is_token_char(c)) fail("bad parameter name", whole);
    if (eq != std::string_view::npos) {
      if (value.empty()) fail("empty parameter value", whole);
      for (char c : value)
        if (!is_token_char(c) && c != ':' && c != '[' && c != ']' && c != '/' && c != '@')
          fail("bad parameter value", whole);
    }
    params.emplace_back(util::to_lower(name), std::string(value));
  }
  return params;
}

std::string params_to_string(const Params& params) {
  std::string out;
  for (const auto& [name, value] : params) {
    out += ';';
    out += name;
    if (!value.empty()) {
      out += '=';
      out += value;
    }
  }
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::optional<std::string_view> find_param(const Params& params, std::string_view name) {
  for (const auto& [n, v] : params)
    if (util::iequals(n, name)) return std::string_view(v);
  return std::nullopt;
}

void set_param(Params& params, std::string_view name, std::string_view value) {
  for (auto& [n, v] : params) {
    if (util::iequals(n, name)) {
      v = std::string(value);
      return;
    }
  }
  params.emplace_back(util::to_lower(name), std::string(value));
}

std::string SipUri::aor() const {
  return user ? *user + "@" + host : host;
}

std::string SipUri::to_string() const {
  std::string out = "sip:";
  if (user) out += *user + "@";
  out += host;
  if (port) out += ":" + std::to_string(*port);
  out += params_to_string(params);
  return out;
}

SipUri SipUri::parse(std::string_view text) {
  const std::string_view whole = text;
  text = util::trim(text);
  if (text.size() < 4 || !util::iequals(text.substr(0, 4), "sip:")) fail("not a sip URI", whole);
  text.remove_prefix(4);
  if (text.find('?') != std::string_view::npos) fail("URI headers unsupported", whole);

  SipUri uri;
  const auto at = text.rfind('@');
  if (at != std::string_view::npos) {
    const auto user = text.substr(0, at);
    if (!valid_user(user)) fail("bad user part", whole);
    uri.user = std::string(user);
    text.remove_prefix(at + 1);
  }
  const auto semi = text.find(';');
  std::string_view hostport = text.substr(0, semi);
  if (semi != std::string_view::npos) uri.params = parse_params(text.substr(semi + 1), whole);

  const auto colon = hostport.find(':');
  std::string_view host = hostport.substr(0, colon);
  if (host.empty()) fail("empty host", whole);
  for (char c : host)
    if (!is_host_char(c)) fail("bad host", whole);
  uri.host = util::to_lower(host);
  if (colon != std::string_view::npos) {
    const auto port_text = hostport.substr(colon + 1);
    for (char c : port_text)
      if (!std::isdigit(static_cast<unsigned char>(c))) fail("bad port", whole);
    const auto port = util::parse_int(port_text);
    if (!port || *port < 1 || *port > 65535) fail("port out of range", whole);
    uri.port = static_cast<std::uint16_t>(*port);
  }
  return uri;
}

std::optional<SipUri> SipUri::try_parse(std::string_view text) {
  try {
    return parse(text);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::string NameAddr::to_string() const {
  std::string out;
  if (!display.empty()) out += quote(display) + " ";
  out += "<" + uri.to_string() + ">";
  out += params_to_string(params);
  return out;
}

NameAddr NameAddr::parse(std::string_view text) {
  const std::string_view whole = text;
  text = util::trim(text);
  NameAddr na;
  const auto lt = [&]() -> std::size_t {
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (quoted) {
        if (text[i] == '\\') ++i;
        else if (text[i] == '"') quoted = false;
      } else if (text[i] == '"') {
        quoted = true;
      } else if (text[i] == '<') {
        return i;
      }
    }
    return std::string_view::npos;
  }();

  if (lt == std::string_view::npos) {
    // addr-spec form: parameters after the URI belong to the header
    const auto semi = text.find(';');
    na.uri = SipUri::parse(text.substr(0, semi));
    if (semi != std::string_view::npos) na.params = parse_params(text.substr(semi + 1), whole);
    return na;
  }

  auto display = util::trim(text.substr(0, lt));
  if (!display.empty()) {
    if (display.front() == '"') {
      if (display.size() < 2 || display.back() != '"') fail("unterminated display name", whole);
      std::string unq;
      for (std::size_t i = 1; i + 1 < display.size(); ++i) {
        if (display[i] == '\\' && i + 2 < display.size()) ++i;
        unq += display[i];
      }
      na.display = std::move(unq);
    } else {
      na.display = std::string(display);
    }
  }
  const auto gt = text.find('>', lt);
  if (gt == std::string_view::npos) fail("missing '>'", whole);
  na.uri = SipUri::parse(text.substr(lt + 1, gt - lt - 1));
  auto rest = util::trim(text.substr(gt + 1));
  if (!rest.empty()) {
    if (rest.front() != ';') fail("junk after name-addr", whole);
    na.params = parse_params(rest.substr(1), whole);
  }
  return na;
}

}  // namespace imstb::sip
