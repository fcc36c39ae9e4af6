#include "patch/model.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "patch/identifier.hpp"

namespace patch {

namespace {

struct KindName {
  StepKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {StepKind::Module, "module"},
    {StepKind::Assign, "assign"},
    {StepKind::Transform, "transform"},
    {StepKind::Read, "read"},
    {StepKind::Display, "display"},
    {StepKind::ByPass, "by-pass"},
    {StepKind::EitherOr, "either-or"},
    {StepKind::Labeled, "labeled"},
    {StepKind::CounterLoop, "counter-loop"},
    {StepKind::ConditionalLoop, "conditional-loop"},
    {StepKind::SentinelLoop, "sentinel-loop"},
    {StepKind::Call, "call"},
    {StepKind::Exit, "exit"},
    {StepKind::Stop, "stop"},
};

}  // namespace

std::string_view to_string(StepKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

std::optional<StepKind> step_kind_from_string(std::string_view text) {
  for (const auto& k : kKindNames) {
    if (k.name == text) return k.kind;
  }
  return std::nullopt;
}

bool is_loop(StepKind kind) {
  return kind == StepKind::CounterLoop || kind == StepKind::ConditionalLoop ||
         kind == StepKind::SentinelLoop;
}

bool is_branch(StepKind kind) {
  return kind == StepKind::ByPass || kind == StepKind::EitherOr || kind == StepKind::Labeled;
}

bool is_container(StepKind kind) {
  return kind == StepKind::Module || is_loop(kind) || is_branch(kind);
}

std::string_view to_string(Binding b) {
  switch (b) {
    case Binding::Console: return "console";
    case Binding::Repository: return "repository";
    case Binding::Caller: return "caller";
  }
  return "?";
}

std::optional<Binding> binding_from_string(std::string_view text) {
  if (text == "console") return Binding::Console;
  if (text == "repository") return Binding::Repository;
  if (text == "caller") return Binding::Caller;
  return std::nullopt;
}

std::string_view to_string(ChildGroup g) {
  switch (g) {
    case ChildGroup::Body: return "body";
    case ChildGroup::Then: return "then";
    case ChildGroup::Else: return "else";
    case ChildGroup::Case: return "case";
    case ChildGroup::Default: return "default";
  }
  return "?";
}

std::optional<ChildGroup> child_group_from_string(std::string_view text) {
  if (text == "body") return ChildGroup::Body;
  if (text == "then") return ChildGroup::Then;
  if (text == "else") return ChildGroup::Else;
  if (text == "case") return ChildGroup::Case;
  if (text == "default") return ChildGroup::Default;
  return std::nullopt;
}

std::string ModuleDef::key() const {
  return is_valid_identifier(name) ? normalize_identifier(name) : name;
}

const Step* ModuleDef::find(std::string_view id) const {
  for (const auto& s : steps) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

bool operator==(const ModuleDef& a, const ModuleDef& b) {
  if (a.name != b.name || a.inputs != b.inputs || a.outputs != b.outputs ||
      a.steps.size() != b.steps.size()) {
    return false;
  }
  auto by_id = [](const ModuleDef& m) {
    std::vector<const Step*> out;
    for (const auto& s : m.steps) out.push_back(&s);
    std::stable_sort(out.begin(), out.end(),
                     [](const Step* x, const Step* y) { return x->id < y->id; });
    return out;
  };
  auto xs = by_id(a);
  auto ys = by_id(b);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(*xs[i] == *ys[i])) return false;
  }
  return true;
}

const Step* ModuleDef::root() const {
  const Step* found = nullptr;
  for (const auto& s : steps) {
    if (s.kind == StepKind::Module) {
      if (found) return nullptr;
      found = &s;
    }
  }
  return found;
}

const ModuleDef* PatchProgram::find_module(std::string_view name) const {
  if (!is_valid_identifier(name)) return nullptr;
  const std::string key = normalize_identifier(name);
  for (const auto& m : modules) {
    if (m.key() == key) return &m;
  }
  return nullptr;
}

std::vector<const Step*> execution_order(const ModuleDef& m) {
  std::vector<const Step*> out;
  const Step* root = m.root();
  if (!root) return out;
  std::unordered_set<std::string> seen;
  std::function<void(const Step*)> visit = [&](const Step* s) {
    while (s && seen.insert(s->id).second) {
      out.push_back(s);
      for (const auto& c : s->children) visit(m.find(c.step));
      s = s->next ? m.find(*s->next) : nullptr;
    }
  };
  visit(root);
  return out;
}

std::vector<const Step*> sequence(const ModuleDef& m, std::string_view head) {
  std::vector<const Step*> out;
  std::unordered_set<std::string> seen;
  const Step* s = m.find(head);
  while (s && seen.insert(s->id).second) {
    out.push_back(s);
    s = s->next ? m.find(*s->next) : nullptr;
  }
  return out;
}

}  // namespace patch
