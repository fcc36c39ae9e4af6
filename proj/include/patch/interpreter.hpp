#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patch/model.hpp"
#include "patch/trace.hpp"

namespace patch {

class Console {
 public:
  virtual ~Console() = default;
  // Next input line; throws ReadFailed when there is none.
  virtual std::string read_line() = 0;
  virtual void display(const std::string& text) = 0;
};

class ScriptedConsole : public Console {
 public:
  ScriptedConsole() = default;
  explicit ScriptedConsole(std::vector<std::string> lines) : input_(lines.begin(), lines.end()) {}

  std::string read_line() override;
  void display(const std::string& text) override { output_.push_back(text); }

  const std::vector<std::string>& output() const { return output_; }

 private:
  std::deque<std::string> input_;
  std::vector<std::string> output_;
};

// Named value store keyed by (module, object name), both normalized.
class Repository {
 public:
  virtual ~Repository() = default;
  virtual std::optional<Value> load(const std::string& module, const std::string& name) = 0;
  virtual void store(const std::string& module, const std::string& name, const Value& v) = 0;
};

class InMemoryRepository : public Repository {
 public:
  std::optional<Value> load(const std::string& module, const std::string& name) override;
  void store(const std::string& module, const std::string& name, const Value& v) override;

 private:
  std::map<std::pair<std::string, std::string>, Value> values_;
};

struct RunOptions {
  std::uint64_t iteration_budget = 1'000'000;  // loop-iter events per run
  int max_depth = 256;                         // nested module invocations
  std::vector<std::string> watch;              // variables snapshotted on loop-iter/exit-step
  // Preview: execute the entry module only up to this step (pre-order).
  std::optional<std::string> preview_until;
  // Receives each event as it is produced. When keep_trace is false the
  // result's trace stays empty.
  std::function<void(const TraceEvent&)> on_event;
  bool keep_trace = true;
  // Polled before every step; when set the run ends as cancelled.
  const std::atomic<bool>* cancel = nullptr;
};

// An argument to a module: named (matched by name first) or positional.
struct Argument {
  std::optional<std::string> name;
  Value value;
};

struct RunResult {
  enum class Status {
    Finished,   // ran to the end of the entry module (or a STOP in it)
    Halted,     // preview stopped before the step after the prefix
    Cancelled,  // forced stop
  };
  Status status = Status::Finished;
  bool stopped = false;  // a STOP step ended the entry module
  std::vector<std::pair<std::string, Value>> outputs;    // declared order
  std::vector<std::pair<std::string, Value>> variables;  // entry frame, by name
  std::vector<Value> displays;
  std::vector<TraceEvent> trace;
};

// Runs `module` (entry module by default). Args are bound to the module's
// caller inputs through the resolver; console and repository inputs are read
// from the adapters. Runtime errors are thrown as PatchError carrying the
// failing step id.
RunResult run_module(const PatchProgram& program, const std::string& module,
                     const std::vector<Argument>& args, Console& console, Repository& repo,
                     const RunOptions& options = {});

// Convenience: scripted console, fresh repository.
RunResult run_module(const PatchProgram& program, const std::string& module,
                     const std::vector<Argument>& args, const RunOptions& options = {});

// Parses name=literal pairs against the module's declared input types.
// Unknown names are read without a target type.
std::vector<Argument> parse_arguments(const ModuleDef& m,
                                      const std::vector<std::pair<std::string, std::string>>& raw);

// Evaluates an expression against a variable map. Compare events for
// comparator subexpressions are passed to on_compare when given.
Value eval_expr(const Expr& e, const std::map<std::string, Value>& vars,
                const std::function<void(const Value&, const Value&, Op, bool)>& on_compare = {});

}  // namespace patch
