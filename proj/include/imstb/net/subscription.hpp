#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "imstb/net/runtime.hpp"

namespace imstb::net {

struct DialogId {
  std::string call_id;
  std::string local_tag;
  std::string remote_tag;
  auto operator<=>(const DialogId&) const = default;
};

enum class SubState { Pending, Active, Terminated };

inline std::string_view to_string(SubState s) {
  switch (s) {
    case SubState::Pending: return "Pending";
    case SubState::Active: return "Active";
    case SubState::Terminated: return "Terminated";
  }
  return "?";
}

/// Subscriber-side view of a SUBSCRIBE dialog.
struct Subscription {
  DialogId dialog;
  std::string event;
  Instant expires_at{0};
  SubState state = SubState::Pending;
};

/// "exam-service;id=1" -> "exam-service".
inline std::string_view event_package(std::string_view event) {
  const auto semi = event.find(';');
  auto pkg = event.substr(0, semi);
  while (!pkg.empty() && (pkg.back() == ' ' || pkg.back() == '\t')) pkg.remove_suffix(1);
  return pkg;
}

}  // namespace imstb::net
