// Random programs, values and inputs for property checks.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "patch/codegen.hpp"
#include "patch/model.hpp"

namespace patch::fuzz {

using Rng = std::mt19937_64;

struct ProgramOptions {
  int max_steps = 28;  // per module, roughly
  int max_depth = 3;   // nesting of containers
};

// A valid two-module program. The entry module "Main" takes
//   n: integer, r: real, xs: list(integer), flag: boolean
// from the caller, reads up to three console lines and calls "Helper".
// Every step kind except repository reads appears with some probability.
// Loops are bounded so every run terminates quickly.
PatchProgram random_program(Rng& rng, const ProgramOptions& options = {});

// Random value of a type. Collections hold at most max_items elements.
Value random_value(const PatchType& t, Rng& rng, std::size_t max_items = 6);

// Random type built from the six value kinds, nested up to depth.
PatchType random_type(Rng& rng, int depth = 2);

// Input sets for the entry module: caller inputs by declared type plus
// `console_lines` lines mixing well-formed and malformed literals.
std::vector<InputSet> random_inputs(const PatchProgram& program, Rng& rng, std::size_t count,
                                    std::size_t console_lines = 3);
std::vector<InputSet> random_inputs(const ModuleDef& m, Rng& rng, std::size_t count,
                                    std::size_t console_lines = 3);

}  // namespace patch::fuzz
