#include "patch/trace.hpp"

#include <array>

#include "patch/identifier.hpp"

namespace patch {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 11> kEventNames{{
    {EventKind::Enter, "enter"},
    {EventKind::ExitStep, "exit-step"},
    {EventKind::Assign, "assign"},
    {EventKind::Transform, "transform"},
    {EventKind::Compare, "compare"},
    {EventKind::Swap, "swap"},
    {EventKind::Read, "read"},
    {EventKind::Display, "display"},
    {EventKind::LoopIter, "loop-iter"},
    {EventKind::Exited, "exited"},
    {EventKind::Stopped, "stopped"},
}};

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kEventNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
  for (const auto& [kind, name] : kEventNames) {
    if (name == text) return kind;
  }
  return std::nullopt;
}

std::vector<std::pair<std::uint64_t, Value>> watch(const std::vector<TraceEvent>& trace,
                                                   std::string_view var) {
  std::vector<std::pair<std::uint64_t, Value>> out;
  if (trace.empty() || !is_valid_identifier(var)) return out;
  const std::string name = normalize_identifier(var);
  const std::string& entry = trace.front().module;
  for (const auto& e : trace) {
    if (e.module != entry || e.var != name || !e.value) continue;
    switch (e.kind) {
      case EventKind::Assign:
      case EventKind::Transform:
      case EventKind::Read:
      case EventKind::Swap:
        out.emplace_back(e.seq, *e.value);
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace patch
