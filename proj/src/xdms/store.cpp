#include "imstb/xdms/store.hpp"

namespace imstb::xdms {

std::string_view to_string(XdmErrc e) {
  switch (e) {
    case XdmErrc::EtagMismatch: return "EtagMismatch";
    case XdmErrc::MalformedGroupXml: return "MalformedGroupXml";
    case XdmErrc::NotFound: return "NotFound";
    case XdmErrc::UnknownGroup: return "UnknownGroup";
  }
  return "?";
}

std::string XdmStore::put_document(XdmDocument doc, const std::optional<std::string>& if_etag) {
  const Key key{doc.auid, doc.owner, doc.doc_name};
  const auto it = docs_.find(key);
  if (if_etag && (it == docs_.end() || it->second.etag != *if_etag))
    throw XdmError(XdmErrc::EtagMismatch, doc.doc_name);

  std::vector<GroupList> lists;
  if (doc.auid == kResourceLists) {
    try {
      lists = parse_resource_lists(doc.body);
    } catch (const MalformedGroupXml& e) {
      throw XdmError(XdmErrc::MalformedGroupXml, e.what());
    }
    if (doc.content_type.empty()) doc.content_type = "application/resource-lists+xml";
  }
  // A store-wide counter: every write gets an etag no earlier write had.
  doc.etag = "x" + std::to_string(++version_);
  if (doc.auid == kResourceLists) parsed_groups_[key] = std::move(lists);
  auto& stored = docs_[key] = std::move(doc);
  if (listener_) listener_(stored);
  return stored.etag;
}

XdmDocument XdmStore::get_document(const std::string& auid, const std::string& owner,
                                   const std::string& doc_name) {
  const auto* doc = find(auid, owner, doc_name);
  if (!doc) throw XdmError(XdmErrc::NotFound, auid + "/" + owner + "/" + doc_name);
  return *doc;
}

const XdmDocument* XdmStore::find(const std::string& auid, const std::string& owner,
                                  const std::string& doc_name) const {
  const auto it = docs_.find({auid, owner, doc_name});
  return it == docs_.end() ? nullptr : &it->second;
}

void XdmStore::delete_document(const std::string& auid, const std::string& owner, const std::string& doc_name,
                               const std::optional<std::string>& if_etag) {
  const Key key{auid, owner, doc_name};
  const auto it = docs_.find(key);
  if (it == docs_.end()) throw XdmError(XdmErrc::NotFound, doc_name);
  if (if_etag && it->second.etag != *if_etag) throw XdmError(XdmErrc::EtagMismatch, doc_name);
  auto gone = std::move(it->second);
  gone.body.clear();
  docs_.erase(it);
  parsed_groups_.erase(key);
  if (listener_) listener_(gone);
}

std::vector<sip::SipUri> XdmStore::resolve_group(const sip::SipUri& group_uri) {
  const auto aor = group_uri.aor();
  for (const auto& [key, lists] : parsed_groups_)
    for (const auto& list : lists)
      if (list.group_uri.aor() == aor) return list.members;
  throw XdmError(XdmErrc::UnknownGroup, group_uri.to_string());
}

bool XdmStore::is_group_member(std::string_view aor) const {
  for (const auto& [key, lists] : parsed_groups_)
    for (const auto& list : lists)
      if (list.has_member(aor)) return true;
  return false;
}

std::vector<GroupList> XdmStore::groups() const {
  std::vector<GroupList> out;
  for (const auto& [key, lists] : parsed_groups_) out.insert(out.end(), lists.begin(), lists.end());
  return out;
}

namespace {

util::HttpResponse from_error(const XdmError& e) {
  switch (e.code()) {
    case XdmErrc::EtagMismatch: return util::HttpResponse::error(412, "EtagMismatch", e.what());
    case XdmErrc::MalformedGroupXml: return util::HttpResponse::error(409, "MalformedGroupXml", e.what());
    case XdmErrc::NotFound: return util::HttpResponse::error(404, "NotFound", e.what());
    case XdmErrc::UnknownGroup: return util::HttpResponse::error(404, "UnknownGroup", e.what());
  }
  return util::HttpResponse::error(500, "Internal", e.what());
}

std::optional<std::string> if_match(const util::HttpRequest& req) {
  const auto v = req.header("if-match");
  if (!v) return std::nullopt;
  std::string tag(*v);
  if (tag.size() >= 2 && tag.front() == '"' && tag.back() == '"') tag = tag.substr(1, tag.size() - 2);
  return tag;
}

}  // namespace

util::HttpResponse xcap_http(XdmStore& store, const util::HttpRequest& req) {
  const auto seg = util::split_path(req.path);
  try {
    if (seg.size() == 2 && seg[0] == "xcap" && seg[1] == "groups" && req.method == "GET") {
      const auto q = req.query.find("uri");
      const auto uri = q == req.query.end() ? std::nullopt : sip::SipUri::try_parse(q->second);
      if (!uri) return util::HttpResponse::error(400, "BadRequest", "uri query parameter required");
      auto members = nlohmann::json::array();
      for (const auto& m : store.resolve_group(*uri)) members.push_back(m.to_string());
      return util::HttpResponse::json(200, {{"group", uri->to_string()}, {"members", members}});
    }
    if (seg.size() != 5 || seg[0] != "xcap" || seg[2] != "users")
      return util::HttpResponse::error(404, "NotFound", "no such resource");
    const auto& auid = seg[1];
    const auto& owner = seg[3];
    const auto& name = seg[4];

    if (req.method == "PUT") {
      const bool existed = store.find(auid, owner, name) != nullptr;
      XdmDocument doc{auid, owner, name, std::string(req.header("content-type").value_or("")), req.body, {}};
      const auto etag = store.put_document(std::move(doc), if_match(req));
      auto resp = util::HttpResponse::json(existed ? 200 : 201, {{"etag", etag}});
      resp.headers["ETag"] = "\"" + etag + "\"";
      return resp;
    }
    if (req.method == "GET") {
      const auto doc = store.get_document(auid, owner, name);
      util::HttpResponse resp;
      resp.content_type = doc.content_type.empty() ? "application/octet-stream" : doc.content_type;
      resp.body = doc.body;
      resp.headers["ETag"] = "\"" + doc.etag + "\"";
      return resp;
    }
    if (req.method == "DELETE") {
      store.delete_document(auid, owner, name, if_match(req));
      return util::HttpResponse::json(200, {{"deleted", name}});
    }
    return util::HttpResponse::error(405, "MethodNotAllowed", req.method);
  } catch (const XdmError& e) {
    return from_error(e);
  }
}

}  // namespace imstb::xdms
