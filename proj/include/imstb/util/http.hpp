#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace imstb::util {

/// Transport-neutral HTTP exchange, so API handlers are plain functions that
/// tests call directly and the live servers adapt to sockets.
struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;

  std::optional<std::string_view> header(std::string_view name) const;
  /// Token from "Authorization: Bearer <token>".
  std::optional<std::string> bearer() const;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
  std::string body;

  static HttpResponse json(int status, const nlohmann::json& body);
  static HttpResponse error(int status, std::string_view code, std::string_view message);
};

/// "/a/b/c" -> {"a","b","c"}; empty segments dropped.
std::vector<std::string> split_path(std::string_view path);

}  // namespace imstb::util
