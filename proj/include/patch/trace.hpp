#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patch/value.hpp"

namespace patch {

enum class EventKind {
  Enter,
  ExitStep,
  Assign,
  Transform,
  Compare,
  Swap,
  Read,
  Display,
  LoopIter,
  Exited,
  Stopped,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view text);

// One execution effect. `seq` is the logical clock of a run, starting at 1.
// Mutation events (assign, transform, read, swap) name the root variable in
// `var` and carry its whole value before and after; `target` is the written
// lvalue as text. Compare events fill lhs/rhs/op/result, swaps fill i/j,
// loop-iter fills iteration, display fills value.
struct TraceEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Enter;
  std::string module;
  std::string step_id;
  std::string var;
  std::string target;
  std::optional<Value> old_value;
  std::optional<Value> value;
  std::optional<Value> lhs;
  std::optional<Value> rhs;
  std::string op;
  bool result = false;
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t iteration = 0;
  // Watched variables bound at loop-iter and exit-step events.
  std::vector<std::pair<std::string, Value>> snapshot;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Chronological history of a variable: every value it took in the trace,
// starting with its seeded input value.
std::vector<std::pair<std::uint64_t, Value>> watch(const std::vector<TraceEvent>& trace,
                                                   std::string_view var);

}  // namespace patch
