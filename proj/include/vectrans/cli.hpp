#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vectrans/compiler.hpp"
#include "vectrans/engine.hpp"
#include "vectrans/llm.hpp"
#include "vectrans/verify.hpp"

namespace vectrans {

struct RunManifest {
  std::filesystem::path corpus;
  std::vector<std::string> filter;
  LlmConfig llm;
  CompilerConfig compiler;
  VerifierConfig verifier;
  /// max_rounds, case_wallclock, verify_timeout, testing, bench, self_feedback.
  EngineConfig engine;
  int parallelism = 1;
  std::filesystem::path output_dir = "vectrans-out";
};

/// "replay:<path>" or an http(s) base URL.
std::variant<HttpEndpoint, TranscriptReplay> parse_provider(const std::string& spec);
std::string provider_spec(const LlmConfig& cfg);

/// Reads a JSON manifest over the defaults. Relative paths are taken from
/// the manifest's directory. Throws ConfigError on unknown keys or bad values.
RunManifest load_manifest(const std::filesystem::path& path);
void apply_manifest_json(RunManifest& m, const nlohmann::json& j, const std::filesystem::path& base);
nlohmann::json manifest_to_json(const RunManifest& m);

/// Exit codes: 0 ok (unvectorized cases included), 1 other operational
/// errors, 2 configuration or schema errors, 3 missing tools.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitToolMissing = 3;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vectrans
