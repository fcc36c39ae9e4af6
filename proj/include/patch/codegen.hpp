#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patch/interpreter.hpp"
#include "patch/model.hpp"

namespace patch {

struct DialectTraits {
  std::string id;
  std::string block_style;   // "braces" or "indentation"
  int index_base = 0;        // base of native sequences
  std::string int_division;  // how Patch's integer '/' is lowered ("widen")
  std::string extension;     // source file extension, with dot
};

// Emitted program. `text` holds the runtime prelude and one function per
// module reachable from the entry; `harness` reads inputs, calls the entry
// function and prints results using the transcript protocol below.
struct SourceText {
  std::string dialect;
  std::string module;
  std::string entry_symbol;
  std::string file_name;          // for text
  std::string harness_file_name;  // for harness; loads file_name
  std::string text;
  std::string harness;
};

// Transcript protocol shared by the interpreter and every harness.
//   stdin:  one literal per caller input (declared order), then console lines
//   stdout: "D <literal>" per display, then "O <name> <literal>" per caller
//           output, or "E <error-kind>" when the run fails (exit status 3)
struct InputSet {
  std::vector<std::pair<std::string, Value>> values;  // caller inputs by name
  std::vector<std::string> console;

  friend bool operator==(const InputSet&, const InputSet&) = default;
};

// How a dialect turns SourceText into something runnable.
struct Scratch {
  std::filesystem::path root;  // <work>/<run-id>
  std::filesystem::path src() const { return root / "src"; }
  std::filesystem::path bin() const { return root / "bin"; }
  std::filesystem::path out() const { return root / "out"; }
};

class Dialect {
 public:
  virtual ~Dialect() = default;
  virtual const DialectTraits& traits() const = 0;
  // Throws UnsupportedConstruct for constructs without a lowering.
  virtual SourceText emit(const PatchProgram& program, const ModuleDef& m) const = 0;
  // Empty when the toolchain is missing.
  virtual std::optional<std::string> toolchain() const = 0;
  // Writes the sources under scratch.src(), builds into scratch.bin() and
  // returns the command line that runs the program. Throws ToolchainMissing,
  // or InvalidProgram with the compiler output when the build fails.
  virtual std::vector<std::string> build(const SourceText& source, const Scratch& scratch) const = 0;
};

// Registry. "cxx" and "py3" are registered at startup.
void register_dialect(std::unique_ptr<Dialect> d);
// Throws UnsupportedConstruct for unknown ids.
const Dialect& find_dialect(std::string_view id);
std::vector<std::string> dialect_ids();

SourceText emit(const PatchProgram& program, const std::string& module, std::string_view dialect);

// Reference transcript of the interpreter for one input set.
std::vector<std::string> reference_transcript(const PatchProgram& program, const std::string& module,
                                              const InputSet& input,
                                              const RunOptions& options = {});

// Input text fed to a harness for one input set.
std::string harness_input(const ModuleDef& m, const InputSet& input);

// Literal-aware comparison of two transcripts: reals within 1e-9 relative,
// everything else exact.
bool transcripts_agree(const std::vector<std::string>& expected,
                       const std::vector<std::string>& actual, std::string* why = nullptr);

struct Verdict {
  std::size_t index = 0;
  bool agree = false;
  std::vector<std::string> expected;  // interpreter
  std::vector<std::string> actual;    // emitted program
  std::string note;
};

struct EquivalenceReport {
  std::string dialect;
  std::string module;
  std::vector<Verdict> verdicts;

  std::size_t agreed() const;
  bool all_agree() const { return agreed() == verdicts.size(); }
};

struct DiffOptions {
  std::filesystem::path work_root;  // empty: $PATCH_WORKDIR or the temp dir
  bool keep_scratch = false;
  double timeout_seconds = 60;
};

// Runs interpreter and emitted program on each input set and compares the
// transcripts. Throws ToolchainMissing when the dialect cannot be built here.
EquivalenceReport differential_check(const PatchProgram& program, const std::string& module,
                                     std::string_view dialect, const std::vector<InputSet>& inputs,
                                     const DiffOptions& options = {});

std::filesystem::path default_work_root();

}  // namespace patch
