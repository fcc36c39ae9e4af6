// Child processes and scratch files for the differential checker.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace patch::process {

struct Result {
  int exit_code = -1;  // 128 + signal when killed
  bool timed_out = false;
};

// Absolute path of an executable, searching PATH for bare names.
std::optional<std::string> find_program(const std::string& name);

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

// Runs argv with `input` on stdin, stdout to `out`, stderr to `out` + ".err".
// Kills the child after timeout_seconds.
Result run(const std::vector<std::string>& argv, const std::string& input,
           const std::filesystem::path& out, double timeout_seconds);

}  // namespace patch::process
