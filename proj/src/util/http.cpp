#include "imstb/util/http.hpp"

#include "imstb/util/text.hpp"

namespace imstb::util {

std::optional<std::string_view> HttpRequest::header(std::string_view name) const {
  const auto it = headers.find(to_lower(name));
  if (it == headers.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::optional<std::string> HttpRequest::bearer() const {
  const auto auth = header("authorization");
  if (!auth) return std::nullopt;
  constexpr std::string_view prefix = "Bearer ";
  if (auth->size() <= prefix.size() || !iequals(auth->substr(0, prefix.size()), prefix)) return std::nullopt;
  return std::string(trim(auth->substr(prefix.size())));
}

HttpResponse HttpResponse::json(int status, const nlohmann::json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

HttpResponse HttpResponse::error(int status, std::string_view code, std::string_view message) {
  return json(status, {{"error", code}, {"message", message}});
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    const auto j = path.find('/', i);
    const auto seg = path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
    if (!seg.empty()) out.emplace_back(seg);
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

}  // namespace imstb::util
