#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "imstb/sip/uri.hpp"
#include "imstb/util/http.hpp"
#include "imstb/xdms/group.hpp"

namespace imstb::xdms {

inline constexpr std::string_view kResourceLists = "resource-lists";
inline constexpr std::string_view kExamDocs = "exam-docs";

struct XdmDocument {
  std::string auid;
  std::string owner;  // AOR
  std::string doc_name;
  std::string content_type;
  std::string body;
  std::string etag;

  bool operator==(const XdmDocument&) const = default;
};

enum class XdmErrc { EtagMismatch, MalformedGroupXml, NotFound, UnknownGroup };
std::string_view to_string(XdmErrc e);

class XdmError : public std::runtime_error {
 public:
  XdmError(XdmErrc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  XdmErrc code() const { return code_; }

 private:
  XdmErrc code_;
};

/// What the exam AS needs from document storage; backed by the store itself
/// in process or by an XCAP client in live mode.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;
  /// Returns the new etag. Throws XdmError.
  virtual std::string put_document(XdmDocument doc, const std::optional<std::string>& if_etag) = 0;
  virtual XdmDocument get_document(const std::string& auid, const std::string& owner,
                                   const std::string& doc_name) = 0;
  virtual std::vector<sip::SipUri> resolve_group(const sip::SipUri& group_uri) = 0;
};

class XdmStore : public DocumentStore {
 public:
  std::string put_document(XdmDocument doc, const std::optional<std::string>& if_etag) override;
  XdmDocument get_document(const std::string& auid, const std::string& owner,
                           const std::string& doc_name) override;
  /// Members in document order. Throws XdmError(UnknownGroup).
  std::vector<sip::SipUri> resolve_group(const sip::SipUri& group_uri) override;

  void delete_document(const std::string& auid, const std::string& owner, const std::string& doc_name,
                       const std::optional<std::string>& if_etag);

  /// True when `aor` appears in any stored group.
  bool is_group_member(std::string_view aor) const;
  std::vector<GroupList> groups() const;
  const XdmDocument* find(const std::string& auid, const std::string& owner, const std::string& doc_name) const;

  /// Called after every successful put or delete.
  void set_change_listener(std::function<void(const XdmDocument&)> fn) { listener_ = std::move(fn); }

 private:
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, XdmDocument> docs_;
  std::map<Key, std::vector<GroupList>> parsed_groups_;
  std::uint64_t version_ = 0;
  std::function<void(const XdmDocument&)> listener_;
};

/// XCAP-style document API:
///   PUT|GET|DELETE /xcap/{auid}/users/{owner}/{doc}   (If-Match honoured)
///   GET /xcap/groups?uri=<group uri>
util::HttpResponse xcap_http(XdmStore& store, const util::HttpRequest& req);

}  // namespace imstb::xdms
