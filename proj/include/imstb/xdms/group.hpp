#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "imstb/sip/uri.hpp"

namespace imstb::xdms {

/// A predefined recipient group: `<list uri="..."><entry uri="..."/>...</list>`.
struct GroupList {
  sip::SipUri group_uri;
  std::vector<sip::SipUri> members;

  bool operator==(const GroupList&) const = default;
  bool has_member(std::string_view aor) const;
};

class MalformedGroupXml : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts a `<resource-lists>` document holding any number of lists, or a
/// single bare `<list>`. Throws MalformedGroupXml on bad XML, a missing or
/// invalid uri, or a repeated member.
std::vector<GroupList> parse_resource_lists(std::string_view xml);

std::string serialize_resource_lists(const std::vector<GroupList>& lists);

}  // namespace imstb::xdms
