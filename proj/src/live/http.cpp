#include "imstb/live/http.hpp"

#include <httplib.h>

#include <stdexcept>

#include "imstb/util/text.hpp"

namespace imstb::live {

net::NetAddress parse_hostport(std::string_view text, std::uint16_t default_port) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    if (text.empty()) throw std::invalid_argument("empty address");
    return {std::string(text), default_port};
  }
  const auto host = text.substr(0, colon);
  const auto port_text = std::string(text.substr(colon + 1));
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = 0;
  } catch (const std::exception&) {
    port = 0;
  }
  if (host.empty() || port <= 0 || port > 65535) throw std::invalid_argument("bad address " + std::string(text));
  return {std::string(host), static_cast<std::uint16_t>(port)};
}

namespace {

util::HttpRequest to_request(const httplib::Request& r) {
  util::HttpRequest req;
  req.method = r.method;
  req.path = r.path;
  for (const auto& [k, v] : r.params) req.query[k] = v;
  for (const auto& [k, v] : r.headers) req.headers[util::to_lower(k)] = v;
  req.body = r.body;
  return req;
}

void apply(const util::HttpResponse& resp, httplib::Response& out) {
  out.status = resp.status;
  for (const auto& [k, v] : resp.headers) out.set_header(k, v);
  out.set_content(resp.body, resp.content_type);
}

util::HttpResponse from_result(const httplib::Result& res) {
  if (!res) return util::HttpResponse::error(503, "Unavailable", httplib::to_string(res.error()));
  util::HttpResponse out;
  out.status = res->status;
  out.body = res->body;
  for (const auto& [k, v] : res->headers) {
    if (util::to_lower(k) == "content-type")
      out.content_type = v;
    else
      out.headers[k] = v;
  }
  return out;
}

}  // namespace

void route_all(httplib::Server& server, std::mutex& mu, Handler handler) {
  auto h = [&mu, handler = std::move(handler)](const httplib::Request& r, httplib::Response& out) {
    util::HttpResponse resp;
    try {
      std::lock_guard lock(mu);
      resp = handler(to_request(r));
    } catch (const std::exception& e) {
      resp = util::HttpResponse::error(500, "Internal", e.what());
    }
    apply(resp, out);
  };
  server.Get(".*", h);
  server.Post(".*", h);
  server.Put(".*", h);
  server.Delete(".*", h);
}

HttpClient::HttpClient(std::string host, std::uint16_t port, std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), timeout_(timeout) {}

util::HttpResponse HttpClient::operator()(const util::HttpRequest& req) const {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : req.headers) {
    if (k == "content-type")
      content_type = v;
    else
      headers.emplace(k, v);
  }
  std::string path = req.path;
  if (!req.query.empty()) {
    httplib::Params params(req.query.begin(), req.query.end());
    path = httplib::append_query_params(path, params);
  }
  if (req.method == "GET") return from_result(cli.Get(path, headers));
  if (req.method == "DELETE") return from_result(cli.Delete(path, headers));
  if (req.method == "POST") return from_result(cli.Post(path, headers, req.body, content_type));
  if (req.method == "PUT") return from_result(cli.Put(path, headers, req.body, content_type));
  return util::HttpResponse::error(405, "MethodNotAllowed", req.method);
}

namespace {

[[noreturn]] void throw_xcap(const util::HttpResponse& resp, const std::string& what) {
  std::string code;
  std::string message = what;
  try {
    const auto j = nlohmann::json::parse(resp.body);
    code = j.value("error", "");
    message = j.value("message", what);
  } catch (const nlohmann::json::exception&) {
  }
  using xdms::XdmErrc;
  for (const auto e : {XdmErrc::EtagMismatch, XdmErrc::MalformedGroupXml, XdmErrc::NotFound, XdmErrc::UnknownGroup})
    if (code == xdms::to_string(e)) throw xdms::XdmError(e, message);
  throw std::runtime_error("xcap " + what + ": HTTP " + std::to_string(resp.status) + " " + message);
}

std::string doc_path(const std::string& auid, const std::string& owner, const std::string& doc_name) {
  return "/xcap/" + auid + "/users/" + owner + "/" + doc_name;
}

std::string unquote(std::string tag) {
  if (tag.size() >= 2 && tag.front() == '"' && tag.back() == '"') tag = tag.substr(1, tag.size() - 2);
  return tag;
}

}  // namespace

std::string XcapClient::put_document(xdms::XdmDocument doc, const std::optional<std::string>& if_etag) {
  util::HttpRequest req{"PUT", doc_path(doc.auid, doc.owner, doc.doc_name), {}, {}, doc.body};
  req.headers["content-type"] = doc.content_type;
  if (if_etag) req.headers["if-match"] = "\"" + *if_etag + "\"";
  const auto resp = http_(req);
  if (resp.status != 200 && resp.status != 201) throw_xcap(resp, "PUT " + req.path);
  return nlohmann::json::parse(resp.body).at("etag").get<std::string>();
}

xdms::XdmDocument XcapClient::get_document(const std::string& auid, const std::string& owner,
                                           const std::string& doc_name) {
  const util::HttpRequest req{"GET", doc_path(auid, owner, doc_name), {}, {}, {}};
  const auto resp = http_(req);
  if (resp.status != 200) throw_xcap(resp, "GET " + req.path);
  std::string etag;
  for (const auto& [k, v] : resp.headers)
    if (util::to_lower(k) == "etag") etag = unquote(v);
  return {auid, owner, doc_name, resp.content_type, resp.body, etag};
}

std::vector<sip::SipUri> XcapClient::resolve_group(const sip::SipUri& group_uri) {
  const util::HttpRequest req{"GET", "/xcap/groups", {{"uri", group_uri.to_string()}}, {}, {}};
  const auto resp = http_(req);
  if (resp.status != 200) throw_xcap(resp, "resolve " + group_uri.to_string());
  std::vector<sip::SipUri> out;
  const auto body = nlohmann::json::parse(resp.body);
  for (const auto& m : body.at("members"))
    out.push_back(sip::SipUri::parse(m.get<std::string>()));
  return out;
}

}  // namespace imstb::live
