#include "patch/codegen.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>

#include "patch/error.hpp"
#include "patch/identifier.hpp"
#include "patch/literal.hpp"
#include "process.hpp"

namespace patch {

std::unique_ptr<Dialect> make_cxx_dialect();
std::unique_ptr<Dialect> make_py_dialect();

namespace {

struct Registry {
  std::mutex mu;
  std::vector<std::unique_ptr<Dialect>> dialects;
};

Registry& registry() {
  static Registry* r = [] {
    auto* reg = new Registry;
    reg->dialects.push_back(make_cxx_dialect());
    reg->dialects.push_back(make_py_dialect());
    return reg;
  }();
  return *r;
}

const ModuleDef& module_or_entry(const PatchProgram& program, const std::string& module) {
  const ModuleDef* m = module.empty() ? program.entry_module() : program.find_module(module);
  if (!m) {
    throw PatchError(ErrorKind::UnknownModule,
                     "no module '" + (module.empty() ? program.entry : module) + "'");
  }
  return *m;
}

const Value* input_value(const InputSet& input, const std::string& name) {
  for (const auto& [n, v] : input.values) {
    if (normalize_identifier(n) == name) return &v;
  }
  return nullptr;
}

bool close(double a, double b) {
  if (a == b) return true;
  return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
}

bool values_close(const Value& a, const Value& b) {
  if (a.is_real() && b.is_real()) return close(a.as_real(), b.as_real());
  if (a.is_list() && b.is_list()) {
    const auto& x = a.as_list().items;
    const auto& y = b.as_list().items;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!values_close(x[i], y[i])) return false;
    }
    return true;
  }
  if (a.is_set() && b.is_set()) {
    const auto& x = a.as_set().items;
    const auto& y = b.as_set().items;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!values_close(x[i], y[i])) return false;
    }
    return true;
  }
  if (a.is_tuple() && b.is_tuple()) {
    const auto& x = a.as_tuple();
    const auto& y = b.as_tuple();
    if (x.names != y.names) return false;
    for (std::size_t i = 0; i < x.items.size(); ++i) {
      if (!values_close(x.items[i], y.items[i])) return false;
    }
    return true;
  }
  return a == b;
}

bool literals_close(const std::string& a, const std::string& b) {
  if (a == b) return true;
  try {
    return values_close(parse_literal(a), parse_literal(b));
  } catch (const PatchError&) {
    return false;
  }
}

bool lines_agree(const std::string& a, const std::string& b) {
  if (a.size() < 2 || b.size() < 2 || a[0] != b[0] || a[1] != ' ' || b[1] != ' ') return a == b;
  if (a[0] == 'D') return literals_close(a.substr(2), b.substr(2));
  if (a[0] == 'O') {
    const auto sa = a.find(' ', 2);
    const auto sb = b.find(' ', 2);
    if (sa == std::string::npos || sb == std::string::npos) return a == b;
    if (a.substr(2, sa - 2) != b.substr(2, sb - 2)) return false;
    return literals_close(a.substr(sa + 1), b.substr(sb + 1));
  }
  return a == b;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::string run_id() {
  static std::atomic<unsigned> counter{0};
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  return "run-" + std::to_string(::getpid()) + "-" + std::to_string(++counter) + "-" +
         std::to_string(now % 1000000);
}

}  // namespace

void register_dialect(std::unique_ptr<Dialect> d) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  for (auto& existing : r.dialects) {
    if (existing->traits().id == d->traits().id) {
      existing = std::move(d);
      return;
    }
  }
  r.dialects.push_back(std::move(d));
}

const Dialect& find_dialect(std::string_view id) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  for (const auto& d : r.dialects) {
    if (d->traits().id == id) return *d;
  }
  throw PatchError(ErrorKind::UnsupportedConstruct, "no dialect '" + std::string(id) + "'");
}

std::vector<std::string> dialect_ids() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> out;
  for (const auto& d : r.dialects) out.push_back(d->traits().id);
  return out;
}

SourceText emit(const PatchProgram& program, const std::string& module, std::string_view dialect) {
  return find_dialect(dialect).emit(program, module_or_entry(program, module));
}

std::vector<std::string> reference_transcript(const PatchProgram& program, const std::string& module,
                                              const InputSet& input, const RunOptions& options) {
  const ModuleDef& m = module_or_entry(program, module);
  std::vector<Argument> args;
  for (const auto& d : m.inputs) {
    if (d.binding != Binding::Caller) continue;
    const Value* v = input_value(input, d.name);
    args.push_back({d.name, v ? *v : default_value(d.type)});
  }
  ScriptedConsole console(input.console);
  InMemoryRepository repo;
  RunOptions opts = options;
  opts.keep_trace = false;
  std::vector<std::string> out;
  try {
    RunResult r = run_module(program, m.name, args, console, repo, opts);
    for (const auto& text : console.output()) out.push_back("D " + text);
    for (const auto& [name, v] : r.outputs) out.push_back("O " + name + " " + render_value(v));
  } catch (const PatchError& e) {
    for (const auto& text : console.output()) out.push_back("D " + text);
    out.push_back("E " + std::string(to_string(e.kind())));
  }
  return out;
}

std::string harness_input(const ModuleDef& m, const InputSet& input) {
  std::string out;
  for (const auto& d : m.inputs) {
    if (d.binding != Binding::Caller) continue;
    const Value* v = input_value(input, d.name);
    out += render_value(v ? assign_coerce(*v, d.type) : default_value(d.type));
    out += '\n';
  }
  for (const auto& line : input.console) {
    out += line;
    out += '\n';
  }
  return out;
}

bool transcripts_agree(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                       std::string* why) {
  const std::size_t n = std::min(expected.size(), actual.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!lines_agree(expected[i], actual[i])) {
      if (why) *why = "line " + std::to_string(i + 1) + ": expected '" + expected[i] + "', got '" + actual[i] + "'";
      return false;
    }
  }
  if (expected.size() != actual.size()) {
    if (why) {
      *why = "expected " + std::to_string(expected.size()) + " lines, got " + std::to_string(actual.size());
    }
    return false;
  }
  return true;
}

std::size_t EquivalenceReport::agreed() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += v.agree ? 1 : 0;
  return n;
}

std::filesystem::path default_work_root() {
  if (const char* env = std::getenv("PATCH_WORKDIR"); env && *env) return env;
  return std::filesystem::temp_directory_path() / "patch-work";
}

EquivalenceReport differential_check(const PatchProgram& program, const std::string& module,
                                     std::string_view dialect, const std::vector<InputSet>& inputs,
                                     const DiffOptions& options) {
  const Dialect& d = find_dialect(dialect);
  const ModuleDef& m = module_or_entry(program, module);
  if (!d.toolchain()) {
    throw PatchError(ErrorKind::ToolchainMissing, "no toolchain for dialect '" + std::string(dialect) + "'");
  }
  EquivalenceReport report;
  report.dialect = std::string(dialect);
  report.module = m.name;

  const SourceText source = d.emit(program, m);
  Scratch scratch{(options.work_root.empty() ? default_work_root() : options.work_root) / run_id()};
  std::filesystem::create_directories(scratch.src());
  std::filesystem::create_directories(scratch.bin());
  std::filesystem::create_directories(scratch.out());

  std::vector<std::string> argv;
  std::string build_failure;
  try {
    argv = d.build(source, scratch);
  } catch (const PatchError& e) {
    if (e.kind() != ErrorKind::InvalidProgram) throw;
    build_failure = e.what();
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Verdict v;
    v.index = i;
    v.expected = reference_transcript(program, m.name, inputs[i]);
    if (!build_failure.empty()) {
      v.note = build_failure;
      report.verdicts.push_back(std::move(v));
      continue;
    }
    const auto out = scratch.out() / ("run" + std::to_string(i) + ".txt");
    const auto r = process::run(argv, harness_input(m, inputs[i]), out, options.timeout_seconds);
    v.actual = split_lines(process::read_file(out));
    if (r.timed_out) {
      v.note = "timed out";
    } else if (r.exit_code != 0 && r.exit_code != 3) {
      v.note = "exit status " + std::to_string(r.exit_code) + ": " +
               process::read_file(out.string() + ".err").substr(0, 400);
    } else {
      v.agree = transcripts_agree(v.expected, v.actual, &v.note);
    }
    report.verdicts.push_back(std::move(v));
  }
  if (!options.keep_scratch) {
    std::error_code ec;
    std::filesystem::remove_all(scratch.root, ec);
  }
  return report;
}

}  // namespace patch
