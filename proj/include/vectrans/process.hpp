#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vectrans {

struct ProcessOptions {
  std::filesystem::path cwd;
  /// Zero means no limit.
  std::chrono::milliseconds timeout{0};
};

struct ProcessResult {
  std::vector<std::string> argv;
  int exit_code = -1;
  int term_signal = 0;
  bool timed_out = false;
  std::string out;
  std::string err;
  double elapsed_seconds = 0.0;

  bool exited() const { return !timed_out && term_signal == 0; }
  bool ok() const { return exited() && exit_code == 0; }
};

/// Runs argv[0] (PATH lookup applies) with stdout/stderr captured. The child
/// gets its own process group so a timeout kills everything it spawned.
/// Throws ToolMissing when the executable cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

/// Resolves a bare name against PATH; paths containing '/' are checked
/// directly. Returns nullopt if nothing executable is found.
std::optional<std::filesystem::path> find_executable(std::string_view name);

std::string quote_command(const std::vector<std::string>& argv);

}  // namespace vectrans
