// patch: command-line front end over .patch.json documents.
//
// Exit codes: 0 ok, 1 validation findings (or a diff disagreement),
// 2 I/O, parse or usage errors, 3 runtime or resolution errors,
// 4 missing toolchain.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "patch/codegen.hpp"
#include "patch/document.hpp"
#include "patch/error.hpp"
#include "patch/fuzz.hpp"
#include "patch/interpreter.hpp"
#include "patch/literal.hpp"
#include "patch/service.hpp"
#include "patch/trace_stream.hpp"
#include "patch/validate.hpp"

using namespace patch;

namespace {

// Reads console input from stdin as the program asks for it; displays go
// straight to stdout unless collected for --json.
class StreamConsole : public Console {
 public:
  explicit StreamConsole(bool echo) : echo_(echo) {}
  std::string read_line() override {
    std::string line;
    if (!std::getline(std::cin, line)) throw PatchError(ErrorKind::ReadFailed, "end of input");
    return line;
  }
  void display(const std::string& text) override {
    if (echo_) std::cout << text << std::endl;
    shown.push_back(text);
  }
  std::vector<std::string> shown;

 private:
  bool echo_;
};

class ListConsole : public ScriptedConsole {
 public:
  ListConsole(std::vector<std::string> lines, bool echo) : ScriptedConsole(std::move(lines)), echo_(echo) {}
  void display(const std::string& text) override {
    if (echo_) std::cout << text << std::endl;
    ScriptedConsole::display(text);
  }

 private:
  bool echo_;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io:
    case ErrorKind::ParseError:
    case ErrorKind::VersionUnsupported:
      return 2;
    case ErrorKind::ToolchainMissing:
      return 4;
    default:
      return 3;
  }
}

int report(const PatchError& e) {
  std::cerr << "error=" << to_string(e.kind());
  if (!e.step_id().empty()) std::cerr << " step=" << e.step_id();
  std::cerr << " msg=" << e.what() << "\n";
  return exit_code(e.kind());
}

void print_findings(const ValidationReport& r) {
  for (const auto& f : r.findings) {
    std::cerr << "step=" << (f.step_id.empty() ? "-" : f.step_id) << " rule=" << f.rule << " msg=" << f.message;
    if (!f.module.empty()) std::cerr << " (module " << f.module << ")";
    std::cerr << "\n";
  }
}

std::vector<std::pair<std::string, std::string>> split_inputs(const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      out.emplace_back("", item);  // positional
    } else {
      out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
  }
  return out;
}

const ModuleDef& module_of(const PatchProgram& program, const std::string& name) {
  const ModuleDef* m = name.empty() ? program.entry_module() : program.find_module(name);
  if (!m) throw PatchError(ErrorKind::UnknownModule, "no module '" + (name.empty() ? program.entry : name) + "'");
  return *m;
}

struct Common {
  std::string path;
  std::string module;
  std::vector<std::string> inputs;
  std::vector<std::string> console;
  bool console_given = false;
};

// Loads and validates; returns nonzero exit status on failure.
int load_valid(const std::string& path, PatchDocument& doc) {
  doc = load_document(path);
  const ValidationReport r = validate(doc.program);
  if (!r.ok()) {
    print_findings(r);
    return 1;
  }
  return 0;
}

int cmd_check(const std::string& path) {
  const PatchDocument doc = load_document(path);
  const ValidationReport r = validate(doc.program);
  print_findings(r);
  return r.ok() ? 0 : 1;
}

int cmd_run(const Common& c, bool json) {
  PatchDocument doc;
  if (int rc = load_valid(c.path, doc)) return rc;
  const ModuleDef& m = module_of(doc.program, c.module);
  const auto args = parse_arguments(m, split_inputs(c.inputs));
  StreamConsole stream(!json);
  ListConsole listed(c.console, !json);
  Console& io = c.console_given ? static_cast<Console&>(listed) : stream;
  auto displays = [&] { return c.console_given ? listed.output() : stream.shown; };

  RunOptions opts;
  opts.keep_trace = false;
  std::vector<TraceEvent> events;
  opts.on_event = [&](const TraceEvent& e) { events.push_back(e); };
  InMemoryRepository repo;
  try {
    RunResult r = run_module(doc.program, m.name, args, io, repo, opts);
    if (json) {
      Json out{{"module", m.name}, {"status", "finished"}, {"stopped", r.stopped}};
      Json outs = Json::object();
      for (const auto& [name, v] : r.outputs) outs[name] = render_value(v);
      out["outputs"] = std::move(outs);
      out["displays"] = displays();
      out["events"] = summarize(events);
      std::cout << out.dump(2) << "\n";
    } else if (r.outputs.size() == 1) {
      std::cout << render_value(r.outputs.front().second) << "\n";
    } else {
      for (const auto& [name, v] : r.outputs) std::cout << name << "=" << render_value(v) << "\n";
    }
    return 0;
  } catch (const PatchError& e) {
    if (json) {
      Json out{{"module", m.name}, {"status", "failed"}, {"error", std::string(to_string(e.kind()))},
               {"message", e.what()}};
      if (!e.step_id().empty()) out["step"] = e.step_id();
      out["displays"] = displays();
      out["events"] = summarize(events);
      std::cout << out.dump(2) << "\n";
    }
    return report(e);
  }
}

int cmd_trace(const Common& c, const std::vector<std::string>& watch) {
  PatchDocument doc;
  if (int rc = load_valid(c.path, doc)) return rc;
  const ModuleDef& m = module_of(doc.program, c.module);
  const auto args = parse_arguments(m, split_inputs(c.inputs));
  StreamConsole stream(false);
  ListConsole listed(c.console, false);
  Console& io = c.console_given ? static_cast<Console&>(listed) : stream;
  RunOptions opts;
  opts.keep_trace = false;
  opts.watch = watch;
  opts.on_event = [](const TraceEvent& e) { std::cout << event_to_json(e).dump() << "\n"; };
  InMemoryRepository repo;
  SessionEnd end;
  int rc = 0;
  try {
    RunResult r = run_module(doc.program, m.name, args, io, repo, opts);
    end.status = SessionStatus::Finished;
    end.outputs = std::move(r.outputs);
  } catch (const PatchError& e) {
    end.status = SessionStatus::Failed;
    end.error = e.kind();
    end.message = e.what();
    end.step_id = e.step_id();
    rc = report(e);
  }
  std::cout << end_to_json(end).dump() << "\n";
  return rc;
}

int cmd_emit(const Common& c, const std::string& dialect, const std::string& out_dir) {
  PatchDocument doc;
  if (int rc = load_valid(c.path, doc)) return rc;
  const ModuleDef& m = module_of(doc.program, c.module);
  const SourceText src = emit(doc.program, m.name, dialect);
  if (out_dir.empty()) {
    std::cout << src.text;
    return 0;
  }
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : {std::pair{src.file_name, src.text}, {src.harness_file_name, src.harness}}) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    if (!f) throw PatchError(ErrorKind::Io, "cannot write " + (dir / name).string());
  }
  std::cout << (dir / src.file_name).string() << "\n" << (dir / src.harness_file_name).string() << "\n";
  return 0;
}

int cmd_diff(const Common& c, const std::string& dialect, std::size_t trials, std::uint64_t seed,
             bool allow_skip, bool keep, double timeout) {
  PatchDocument doc;
  if (int rc = load_valid(c.path, doc)) return rc;
  const ModuleDef& m = module_of(doc.program, c.module);
  if (!find_dialect(dialect).toolchain()) {
    if (!allow_skip) {
      std::cerr << "error=toolchain-missing msg=no toolchain for dialect '" << dialect << "'\n";
      return 4;
    }
    std::cerr << "skipped dialect=" << dialect << " reason=toolchain-missing\n";
    std::cout << "agree=0/0\n";
    return 0;
  }
  fuzz::Rng rng(seed);
  const auto inputs = fuzz::random_inputs(m, rng, trials);
  DiffOptions opts;
  opts.keep_scratch = keep;
  opts.timeout_seconds = timeout;
  const EquivalenceReport r = differential_check(doc.program, m.name, dialect, inputs, opts);
  for (const auto& v : r.verdicts) {
    std::cout << "trial=" << v.index << " verdict=" << (v.agree ? "agree" : "disagree");
    if (!v.agree && !v.note.empty()) std::cout << " note=" << v.note.substr(0, v.note.find('\n'));
    std::cout << "\n";
  }
  std::cout << "agree=" << r.agreed() << "/" << r.verdicts.size() << "\n";
  return r.all_agree() ? 0 : 1;
}

int cmd_serve(const ServiceOptions& options) {
  Service service(options);
  std::cerr << "listening on " << options.host << ":" << options.port << "\n";
  service.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch programs: check, run, trace, emit, differential check, serve"};
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App* sub, bool with_inputs) {
    sub->add_option("document", c.path, "path to a .patch.json document")->required();
    sub->add_option("--module,-m", c.module, "module to use (default: the entry module)");
    if (with_inputs) {
      sub->add_option("--in,-i", c.inputs, "caller input as name=literal, or a bare literal")->allow_extra_args(false);
      sub->add_option("--console", c.console, "console input line (default: read stdin)")
          ->allow_extra_args(false);
    }
  };

  auto* check = app.add_subcommand("check", "validate a document");
  check->add_option("document", c.path, "path to a .patch.json document")->required();

  bool json = false;
  auto* run = app.add_subcommand("run", "run a module and print its outputs");
  add_common(run, true);
  run->add_flag("--json", json, "structured result on stdout");

  std::vector<std::string> watch;
  auto* trace = app.add_subcommand("trace", "run a module and print its trace as JSON lines");
  add_common(trace, true);
  trace->add_option("--watch", watch, "variable to snapshot at loop iterations")->allow_extra_args(false);

  std::string dialect = "cxx";
  std::string out_dir;
  auto* emit_cmd = app.add_subcommand("emit", "emit source for a dialect");
  add_common(emit_cmd, false);
  emit_cmd->add_option("--dialect,-d", dialect, "target dialect")->capture_default_str();
  emit_cmd->add_option("--out,-o", out_dir, "directory for the source and harness files");

  std::size_t trials = 10;
  std::uint64_t seed = 1;
  bool allow_skip = false;
  bool keep = false;
  double timeout = 60;
  auto* diff = app.add_subcommand("diff", "compare the interpreter with an emitted program");
  add_common(diff, false);
  diff->add_option("--dialect,-d", dialect, "target dialect")->capture_default_str();
  diff->add_option("--trials,-n", trials, "number of random input sets")->capture_default_str();
  diff->add_option("--seed,-s", seed, "seed for the input generator")->capture_default_str();
  diff->add_flag("--allow-skip", allow_skip, "exit 0 when the toolchain is missing");
  diff->add_flag("--keep", keep, "keep the scratch directory");
  diff->add_option("--timeout", timeout, "seconds per run")->capture_default_str();

  ServiceOptions service;
  std::string store;
  auto* serve = app.add_subcommand("serve", "start the local HTTP service");
  serve->add_option("--port,-p", service.port, "port")->capture_default_str();
  serve->add_option("--host", service.host, "bind address")->capture_default_str();
  serve->add_option("--store", store, "directory that keeps documents across restarts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  c.console_given = run->count("--console") > 0 || trace->count("--console") > 0;

  try {
    if (*check) return cmd_check(c.path);
    if (*run) return cmd_run(c, json);
    if (*trace) return cmd_trace(c, watch);
    if (*emit_cmd) return cmd_emit(c, dialect, out_dir);
    if (*diff) return cmd_diff(c, dialect, trials, seed, allow_skip, keep, timeout);
    if (*serve) {
      service.store = store;
      return cmd_serve(service);
    }
  } catch (const PatchError& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error=io-error msg=" << e.what() << "\n";
    return 2;
  }
  return 0;
}
