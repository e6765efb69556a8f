#include "imstb/xdms/group.hpp"

#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace imstb::xdms {

namespace pt = boost::property_tree;

namespace {

sip::SipUri uri_attr(const pt::ptree& node, const char* what) {
  const auto text = node.get_optional<std::string>("<xmlattr>.uri");
  if (!text) throw MalformedGroupXml(std::string(what) + " without uri");
  const auto uri = sip::SipUri::try_parse(*text);
  if (!uri) throw MalformedGroupXml(std::string(what) + " uri is not a SIP URI: " + *text);
  return *uri;
}

GroupList parse_list(const pt::ptree& node) {
  GroupList list;
  list.group_uri = uri_attr(node, "list");
  std::set<std::string> seen;
  for (const auto& [name, child] : node) {
    if (name != "entry") continue;
    auto member = uri_attr(child, "entry");
    if (!seen.insert(member.aor()).second) throw MalformedGroupXml("duplicate entry " + member.aor());
    list.members.push_back(std::move(member));
  }
  return list;
}

std::string escape_attr(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

bool GroupList::has_member(std::string_view aor) const {
  for (const auto& m : members)
    if (m.aor() == aor) return true;
  return false;
}

std::vector<GroupList> parse_resource_lists(std::string_view xml) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw MalformedGroupXml(e.what());
  }
  std::vector<GroupList> lists;
  std::size_t roots = 0;
  for (const auto& [name, node] : tree) {
    if (name == "<xmlcomment>") continue;
    ++roots;
    if (name == "list") {
      lists.push_back(parse_list(node));
    } else if (name == "resource-lists") {
      for (const auto& [child_name, child] : node)
        if (child_name == "list") lists.push_back(parse_list(child));
    } else {
      throw MalformedGroupXml("unexpected root element " + name);
    }
  }
  if (roots != 1) throw MalformedGroupXml("expected exactly one root element");
  return lists;
}

std::string serialize_resource_lists(const std::vector<GroupList>& lists) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<resource-lists xmlns=\"urn:ietf:params:xml:ns:resource-lists\">\n";
  for (const auto& list : lists) {
    out += "  <list uri=\"" + escape_attr(list.group_uri.to_string()) + "\">\n";
    for (const auto& m : list.members) out += "    <entry uri=\"" + escape_attr(m.to_string()) + "\"/>\n";
    out += "  </list>\n";
  }
  out += "</resource-lists>\n";
  return out;
}

}  // namespace imstb::xdms
