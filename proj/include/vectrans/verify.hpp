#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vectrans {

enum class FormalKind { Equivalent, Mismatch, Timeout, ToolError };
std::string_view to_string(FormalKind kind);
std::optional<FormalKind> formal_kind_from_string(std::string_view s);

struct FormalVerdict {
  FormalKind kind = FormalKind::ToolError;
  /// Counterexample for Mismatch, diagnostic for ToolError, raw output otherwise.
  std::string text;

  bool equivalent() const { return kind == FormalKind::Equivalent; }
  bool unavailable() const { return kind == FormalKind::ToolError && text == "unavailable"; }
  bool operator==(const FormalVerdict&) const = default;
};

FormalVerdict unavailable_verdict();

/// Maps translation-validator output to a verdict. Unknown output becomes
/// ToolError carrying the full text.
FormalVerdict classify_tool_output(std::string_view out, std::string_view err, int exit_code, bool timed_out = false);

struct VerifierConfig {
  /// Unset: look for "alive-tv" on PATH and fall back to tests-only mode.
  /// Set: the executable must exist (ToolMissing otherwise). "none"
  /// forces tests-only mode.
  std::optional<std::string> executable;
  std::chrono::seconds timeout{120};
  std::vector<std::string> extra_args;
};

/// Renames `@<name>_opt` to `@<name>` so the validator pairs the functions.
std::string align_function_names(std::string_view ir, std::string_view function_name);

class Verifier {
 public:
  explicit Verifier(VerifierConfig config);

  bool available() const { return executable_.has_value(); }
  const VerifierConfig& config() const { return config_; }
  std::string stamp() const;

  /// Runs the validator on two IR files. The candidate IR is name-aligned
  /// first (written next to it as `<stem>.aligned.ll`). A zero budget is a
  /// Timeout without running anything; no validator means ToolError("unavailable").
  FormalVerdict verify_pair(const std::filesystem::path& original_ir, const std::filesystem::path& candidate_ir,
                            std::string_view function_name, std::chrono::seconds budget) const;
  FormalVerdict verify_pair(const std::filesystem::path& original_ir, const std::filesystem::path& candidate_ir,
                            std::string_view function_name) const {
    return verify_pair(original_ir, candidate_ir, function_name, config_.timeout);
  }

  struct Raw {
    std::string out;
    std::string err;
  };
  FormalVerdict verify_pair_raw(const std::filesystem::path& original_ir, const std::filesystem::path& candidate_ir,
                                std::string_view function_name, std::chrono::seconds budget, Raw& raw) const;

 private:
  VerifierConfig config_;
  std::optional<std::filesystem::path> executable_;
};

}  // namespace vectrans
