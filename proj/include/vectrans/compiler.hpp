#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vectrans {

enum class FlagsProfile {
  Diagnose,  ///< -O3 -ffast-math plus loop-vectorize remarks
  Bench,     ///< -O3 -ffast-math
  EmitIr,    ///< textual IR before any vectorization pass ran
};

/// Optimization flags of a profile, excluding -c/-o/-S and file names.
std::vector<std::string> profile_flags(FlagsProfile profile);

struct CompilerConfig {
  std::string executable = "clang";
  /// Substring that must appear in `--version` output; empty disables the check.
  std::string version_pin;
  std::chrono::seconds timeout{60};
  /// Replaces the EmitIr optimization flags when non-empty.
  std::vector<std::string> emit_ir_flags;
};

enum class CompileStatus { Ok, Error };

struct CompileResult {
  CompileStatus status = CompileStatus::Error;
  std::string diagnostic;   ///< non-empty when status == Error
  std::string remarks_raw;  ///< the compiler's complete diagnostic stream
  std::optional<std::filesystem::path> artifact_path;
  std::vector<std::string> command_line;

  bool ok() const { return status == CompileStatus::Ok; }
};

struct SourceLocation {
  int line = 0;
  int column = 0;
  auto operator<=>(const SourceLocation&) const = default;
};

struct LoopRecord {
  SourceLocation location;
  bool vectorized = false;
  std::optional<std::string> reason;  ///< present iff !vectorized
  std::optional<std::string> detail;  ///< analysis remarks beyond the reason
};

struct VectorizationReport {
  std::vector<LoopRecord> loops;
  /// Loop-vectorize remark lines that matched no known shape.
  std::vector<std::string> leftovers;
  /// Number of loop-vectorize remark lines folded into `loops`.
  int consumed_lines = 0;
  std::string compiler_stamp;

  const LoopRecord* find(SourceLocation loc) const;
  int vectorized_count() const;
};

/// Parses clang's `-Rpass=loop-vectorize -Rpass-analysis=loop-vectorize`
/// output (and `-Rpass-missed` lines when present). Source echo and caret
/// lines are skipped; remark lines from other passes are ignored.
VectorizationReport parse_remarks(std::string_view remarks_raw);

/// True iff every selected loop is vectorized. An empty selection means all
/// loops in the report; a report without loops is never fully vectorized.
bool is_fully_vectorized(const VectorizationReport& report, std::span<const SourceLocation> selection = {});

/// Human-readable rendering used in feedback prompts; reasons are verbatim.
std::string render_report(const VectorizationReport& report);

/// Wraps the configured compiler executable. Stateless after construction;
/// every call works in the scratch directory it is given.
class Compiler {
 public:
  /// Resolves the executable and reads its version. Throws ToolMissing when
  /// it cannot be found or run, ConfigError on a version-pin mismatch.
  explicit Compiler(CompilerConfig config);

  const CompilerConfig& config() const { return config_; }
  const std::filesystem::path& executable() const { return executable_; }
  /// First line of `--version`.
  const std::string& version() const { return version_; }
  /// "<path> | <version>", stamped into reports.
  std::string stamp() const;

  std::vector<std::string> profile_args(FlagsProfile profile) const;

  /// Writes `source` to `<scratch>/<stem>.c` and compiles it. Diagnose and
  /// Bench produce an object file, EmitIr a `.ll` file. Throws TimeoutError
  /// when the compile exceeds the configured cap.
  CompileResult compile(std::string_view source, FlagsProfile profile, const std::filesystem::path& scratch,
                        std::string_view stem = "candidate", std::span<const std::string> extra_flags = {}) const;

  /// Compiles and links a standalone program at the Bench profile.
  CompileResult build_executable(std::string_view source, const std::filesystem::path& scratch,
                                 std::string_view stem, std::span<const std::string> extra_flags = {}) const;

 private:
  CompileResult invoke(std::vector<std::string> argv, const std::filesystem::path& scratch,
                       std::filesystem::path artifact) const;

  CompilerConfig config_;
  std::filesystem::path executable_;
  std::string version_;
};

}  // namespace vectrans
