#include "patch/validate.hpp"

#include <map>
#include <set>

#include "patch/identifier.hpp"
#include "patch/literal.hpp"

namespace patch {

bool ValidationReport::has_rule(std::string_view rule) const {
  for (const auto& f : findings) {
    if (f.rule == rule) return true;
  }
  return false;
}

namespace {

bool normalized(const std::string& name) {
  return is_valid_identifier(name) && normalize_identifier(name) == name;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class ModuleChecker {
 public:
  ModuleChecker(const ModuleDef& m, const PatchProgram* program, std::vector<Finding>& out)
      : m_(m), program_(program), out_(out) {}

  void run() {
    check_decls();
    check_ids();
    const Step* root = check_root();
    check_edges(root);
    for (const auto& s : m_.steps) check_step(s);
    if (!root || shape_broken_) return;
    check_placement(*root);
    check_definitions();
    check_counters();
    for (auto& f : infer_types(m_, program_).findings) out_.push_back(std::move(f));
  }

 private:
  void report(const std::string& step, std::string rule, std::string msg) {
    out_.push_back({m_.name, step, std::move(rule), std::move(msg)});
  }

  void check_decls() {
    std::map<std::string, const DataObjectDecl*> inputs;
    for (const auto* list : {&m_.inputs, &m_.outputs}) {
      std::set<std::string> seen;
      for (const auto& d : *list) {
        if (!normalized(d.name)) {
          report("", "malformed-identifier", "data object name '" + d.name + "'");
          continue;
        }
        if (!seen.insert(d.name).second) {
          report("", "duplicate-decl", "data object '" + d.name + "' declared twice");
        }
        if (list == &m_.inputs) {
          inputs.emplace(d.name, &d);
        } else if (auto it = inputs.find(d.name); it != inputs.end() && !(it->second->type == d.type)) {
          report("", "decl-conflict",
                 "'" + d.name + "' is both input and output with different types");
        }
      }
    }
  }

  void check_ids() {
    std::set<std::string> seen;
    for (const auto& s : m_.steps) {
      if (!seen.insert(s.id).second) {
        report(s.id, "duplicate-id", "step id '" + s.id + "' used twice");
        shape_broken_ = true;
      }
    }
  }

  const Step* check_root() {
    std::vector<const Step*> roots;
    for (const auto& s : m_.steps) {
      if (s.kind == StepKind::Module) roots.push_back(&s);
    }
    if (roots.size() != 1) {
      report(roots.empty() ? "" : roots[1]->id, "root-kind",
             "a module body needs exactly one module step, found " + std::to_string(roots.size()));
      return nullptr;
    }
    return roots.front();
  }

  void check_edges(const Step* root) {
    std::map<std::string, int> incoming;
    for (const auto& s : m_.steps) {
      auto edge = [&](const std::string& to) {
        if (!m_.find(to)) {
          report(s.id, "dangling-ref", "edge to unknown step '" + to + "'");
          shape_broken_ = true;
          return;
        }
        ++incoming[to];
      };
      if (s.next) edge(*s.next);
      for (const auto& c : s.children) edge(c.step);
    }
    for (const auto& [id, count] : incoming) {
      if (count > 1) {
        report(id, "tree-shape", "step has " + std::to_string(count) + " incoming edges");
        shape_broken_ = true;
      }
    }
    if (!root) {
      shape_broken_ = true;
      return;
    }
    if (incoming.count(root->id)) {
      report(root->id, "tree-shape", "the module step cannot have incoming edges");
      shape_broken_ = true;
    }

    std::set<std::string> reached;
    for (const Step* s : execution_order(m_)) reached.insert(s->id);
    // Parent of each step along its single incoming edge.
    std::map<std::string, std::string> parent;
    for (const auto& s : m_.steps) {
      if (s.next) parent.emplace(*s.next, s.id);
      for (const auto& c : s.children) parent.emplace(c.step, s.id);
    }
    for (const auto& s : m_.steps) {
      if (reached.count(s.id)) continue;
      // Walking up from an unreachable step either ends at a parentless step
      // or loops back on itself.
      std::set<std::string> path;
      std::string cur = s.id;
      bool cycle = false;
      while (true) {
        if (!path.insert(cur).second) {
          cycle = true;
          break;
        }
        auto it = parent.find(cur);
        if (it == parent.end()) break;
        cur = it->second;
      }
      if (cycle) {
        report(s.id, "tree-shape", "step lies on a cycle");
      } else {
        report(s.id, "unreachable", "step is not connected to the module step");
      }
      shape_broken_ = true;
    }
  }

  void check_step(const Step& s) {
    check_payload_kind(s);
    check_children(s);
    if ((s.kind == StepKind::Exit || s.kind == StepKind::Stop) && (s.next || !s.children.empty())) {
      report(s.id, "terminal", std::string(to_string(s.kind)) + " ends its sequence");
    }
  }

  void check_payload_kind(const Step& s) {
    bool ok = std::visit(
        Overloaded{
            [&](const NoPayload&) {
              return s.kind == StepKind::Module || s.kind == StepKind::Exit ||
                     s.kind == StepKind::Stop;
            },
            [&](const AssignPayload& p) {
              if (s.kind != StepKind::Assign && s.kind != StepKind::Transform) return false;
              check_target(s, p.target, p.type.has_value());
              if (s.kind == StepKind::Assign) {
                auto k = p.source.kind;
                if (k != Expr::Kind::Literal && k != Expr::Kind::Var && k != Expr::Kind::Index &&
                    k != Expr::Kind::Field) {
                  report(s.id, "assign-is-copy",
                         "'" + print_expr(p.source) + "' computes a value; use a transform step");
                }
              }
              return true;
            },
            [&](const SwapPayload& p) {
              if (s.kind != StepKind::Transform) return false;
              check_target(s, p.container, false);
              return true;
            },
            [&](const ReadPayload& p) {
              if (s.kind != StepKind::Read) return false;
              check_target(s, p.target, p.type.has_value());
              if (p.source == Binding::Caller) {
                report(s.id, "payload-kind", "read steps take input from the console or repository");
              }
              return true;
            },
            [&](const DisplayPayload&) { return s.kind == StepKind::Display; },
            [&](const ConditionPayload&) {
              return s.kind == StepKind::ByPass || s.kind == StepKind::EitherOr ||
                     s.kind == StepKind::ConditionalLoop;
            },
            [&](const LabeledPayload&) { return s.kind == StepKind::Labeled; },
            [&](const CounterPayload& p) {
              if (!normalized(p.variable)) {
                report(s.id, "malformed-identifier", "counter '" + p.variable + "'");
              }
              return s.kind == StepKind::CounterLoop;
            },
            [&](const SentinelPayload& p) {
              if (!normalized(p.variable)) {
                report(s.id, "malformed-identifier", "loop variable '" + p.variable + "'");
              }
              return s.kind == StepKind::SentinelLoop;
            },
            [&](const CallPayload& p) {
              for (const auto& r : p.results) check_target(s, r.target, false);
              return s.kind == StepKind::Call;
            },
        },
        s.payload);
    if (!ok) {
      report(s.id, "payload-kind",
             "payload does not fit a " + std::string(to_string(s.kind)) + " step");
    }
  }

  void check_target(const Step& s, const Expr& target, bool typed) {
    if (!target.is_lvalue()) {
      report(s.id, "bad-target", "'" + print_expr(target) + "' cannot be assigned");
    } else if (typed && target.kind != Expr::Kind::Var) {
      report(s.id, "bad-target", "only a plain variable can be given a type");
    }
  }

  void check_children(const Step& s) {
    if (s.children.empty()) return;
    if (!is_container(s.kind)) {
      report(s.id, "no-children", std::string(to_string(s.kind)) + " steps cannot contain steps");
      return;
    }
    std::map<ChildGroup, int> count;
    for (const auto& c : s.children) {
      ++count[c.group];
      if (c.label.has_value() != (c.group == ChildGroup::Case)) {
        report(s.id, "group-arity", "only labeled arms carry a label");
      }
    }
    auto only = [&](std::initializer_list<ChildGroup> allowed) {
      for (const auto& [g, n] : count) {
        if (std::find(allowed.begin(), allowed.end(), g) == allowed.end()) return false;
      }
      return true;
    };
    switch (s.kind) {
      case StepKind::EitherOr:
        if (!only({ChildGroup::Then, ChildGroup::Else}) || count[ChildGroup::Then] != 1 ||
            count[ChildGroup::Else] != 1) {
          report(s.id, "group-arity", "either-or needs exactly one then and one else group");
        }
        break;
      case StepKind::Labeled: {
        if (!only({ChildGroup::Case, ChildGroup::Default}) || count[ChildGroup::Default] > 1) {
          report(s.id, "group-arity", "labeled branches take case arms and at most one default");
        }
        std::vector<Value> labels;
        for (const auto& c : s.children) {
          if (!c.label) continue;
          for (const auto& l : labels) {
            if (compatible(type_of(l), type_of(*c.label)) && values_equal(l, *c.label)) {
              report(s.id, "label-unique", "label " + render_value(*c.label) + " appears twice");
            }
          }
          labels.push_back(*c.label);
        }
        break;
      }
      default:
        if (!only({ChildGroup::Body}) || count[ChildGroup::Body] > 1) {
          report(s.id, "group-arity",
                 std::string(to_string(s.kind)) + " takes a single body group");
        }
    }
  }

  // Exit must sit inside some loop or branch.
  void check_placement(const Step& root) {
    walk(root, nullptr);
  }

  void walk(const Step& container, const Step* enclosing) {
    for (const auto& c : container.children) {
      for (const Step* s : sequence(m_, c.step)) {
        if (s->kind == StepKind::Exit && container.kind == StepKind::Module) {
          report(s->id, "exit-outside", "EXIT must be inside a loop or branch");
        }
        if (is_container(s->kind)) walk(*s, s);
      }
    }
    (void)enclosing;
  }

  static void reads_of_target(const Expr& target, std::vector<std::string>& out) {
    if (target.kind == Expr::Kind::Var) return;
    // Element writes read the container and every index expression.
    collect_vars(target, out);
  }

  void check_definitions() {
    std::set<std::string> defined;
    for (const auto* list : {&m_.inputs, &m_.outputs}) {
      for (const auto& d : *list) defined.insert(d.name);
    }
    for (const Step* s : execution_order(m_)) {
      std::vector<std::string> reads;
      std::vector<std::string> writes;
      std::visit(Overloaded{
                     [](const NoPayload&) {},
                     [&](const AssignPayload& p) {
                       collect_vars(p.source, reads);
                       reads_of_target(p.target, reads);
                       if (p.target.is_lvalue()) writes.push_back(p.target.root_var());
                     },
                     [&](const SwapPayload& p) {
                       collect_vars(p.container, reads);
                       collect_vars(p.first, reads);
                       collect_vars(p.second, reads);
                     },
                     [&](const ReadPayload& p) {
                       reads_of_target(p.target, reads);
                       if (p.target.is_lvalue()) writes.push_back(p.target.root_var());
                     },
                     [&](const DisplayPayload& p) { collect_vars(p.value, reads); },
                     [&](const ConditionPayload& p) { collect_vars(p.condition, reads); },
                     [&](const LabeledPayload& p) { collect_vars(p.scrutinee, reads); },
                     [&](const CounterPayload& p) {
                       collect_vars(p.start, reads);
                       collect_vars(p.end, reads);
                       writes.push_back(p.variable);
                     },
                     [&](const SentinelPayload& p) {
                       collect_vars(p.collection, reads);
                       if (p.marker) collect_vars(*p.marker, reads);
                       writes.push_back(p.variable);
                     },
                     [&](const CallPayload& p) {
                       for (const auto& a : p.actuals) collect_vars(a.value, reads);
                       for (const auto& r : p.results) {
                         reads_of_target(r.target, reads);
                         if (r.target.is_lvalue()) writes.push_back(r.target.root_var());
                       }
                     },
                 },
                 s->payload);
      std::set<std::string> reported;
      for (const auto& v : reads) {
        if (!defined.count(v) && reported.insert(v).second) {
          report(s->id, "undeclared-var", "'" + v + "' is used before it is declared or set");
        }
      }
      defined.insert(writes.begin(), writes.end());
    }
  }

  static std::vector<std::string> written_vars(const Step& s) {
    std::vector<std::string> out;
    std::visit(Overloaded{
                   [](const auto&) {},
                   [&](const AssignPayload& p) {
                     if (p.target.is_lvalue()) out.push_back(p.target.root_var());
                   },
                   [&](const SwapPayload& p) {
                     if (p.container.is_lvalue()) out.push_back(p.container.root_var());
                   },
                   [&](const ReadPayload& p) {
                     if (p.target.is_lvalue()) out.push_back(p.target.root_var());
                   },
                   [&](const CounterPayload& p) { out.push_back(p.variable); },
                   [&](const SentinelPayload& p) { out.push_back(p.variable); },
                   [&](const CallPayload& p) {
                     for (const auto& r : p.results) {
                       if (r.target.is_lvalue()) out.push_back(r.target.root_var());
                     }
                   },
               },
               s.payload);
    return out;
  }

  void collect_body(const Step& s, std::vector<const Step*>& out) {
    for (const auto& c : s.children) {
      for (const Step* b : sequence(m_, c.step)) {
        out.push_back(b);
        collect_body(*b, out);
      }
    }
  }

  void check_counters() {
    for (const auto& s : m_.steps) {
      if (s.kind != StepKind::CounterLoop) continue;
      const auto* p = std::get_if<CounterPayload>(&s.payload);
      if (!p) continue;
      std::vector<const Step*> body;
      collect_body(s, body);
      for (const Step* b : body) {
        for (const auto& w : written_vars(*b)) {
          if (w == p->variable) {
            report(b->id, "counter-write", "counter '" + w + "' of step " + s.id +
                                               " cannot be assigned inside its loop");
          }
        }
      }
    }
  }

  const ModuleDef& m_;
  const PatchProgram* program_;
  std::vector<Finding>& out_;
  bool shape_broken_ = false;
};

}  // namespace

ValidationReport validate_module(const ModuleDef& m, const PatchProgram* program) {
  ValidationReport r;
  ModuleChecker(m, program, r.findings).run();
  return r;
}

ValidationReport validate(const PatchProgram& program) {
  ValidationReport r;
  std::set<std::string> names;
  for (const auto& m : program.modules) {
    if (!is_valid_identifier(m.name)) {
      r.findings.push_back({m.name, "", "malformed-identifier", "module name '" + m.name + "'"});
    } else if (!names.insert(m.key()).second) {
      r.findings.push_back({m.name, "", "duplicate-module",
                            "module name '" + m.name + "' collides with another module"});
    }
  }
  if (!program.find_module(program.entry)) {
    r.findings.push_back({"", "", "entry-missing", "entry module '" + program.entry + "' not found"});
  }
  for (const auto& m : program.modules) ModuleChecker(m, &program, r.findings).run();
  return r;
}

}  // namespace patch
