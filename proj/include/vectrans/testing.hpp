#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vectrans/candidate.hpp"
#include "vectrans/compiler.hpp"
#include "vectrans/corpus.hpp"
#include "vectrans/harness.hpp"
#include "vectrans/llm.hpp"

namespace vectrans {

enum class SuiteGenerator { Auto, Template, Llm };

struct TestingConfig {
  std::uint64_t seed = 0x5EEDF00DULL;
  int trials = 100;
  /// Clamp every default and case range to non-negative values.
  bool positive_only = false;
  /// Per-parameter ranges that beat both the case's ranges and the defaults.
  std::map<std::string, ValueRange> overrides;
  ComparePolicy compare;
  std::chrono::seconds harness_timeout{10};
  /// Auto: the LLM for live providers, the template for replay runs.
  SuiteGenerator generator = SuiteGenerator::Auto;
  int llm_attempts = 3;
};

/// Ranges for every parameter: overrides, then case ranges, then defaults
/// (reals [-1,1], integer arrays [-8,8], integer scalars [1,4]).
InputSpec resolve_input_spec(const FunctionCase& fc, const TestingConfig& cfg);

enum class SuiteOrigin { Template, Llm, Fixture };
std::string_view to_string(SuiteOrigin origin);

struct TestSuite {
  std::string case_id;
  /// Self-contained program with the CANDIDATE_FN slot left open.
  std::string harness_source;
  InputSpec input_spec;
  bool validated = false;
  SuiteOrigin origin = SuiteOrigin::Template;
  /// LLM generation attempts spent before this suite was produced.
  int generation_attempts = 0;
  std::vector<std::string> generation_errors;
};

/// Wraps an LLM-written driver (a `main`) into a suite for `fc`.
TestSuite suite_from_driver(const FunctionCase& fc, const std::string& driver, const InputSpec& spec,
                            SuiteOrigin origin);

/// One suite per case. With an LLM generator, up to `llm_attempts` drivers
/// are requested; a driver that does not build against the original is
/// discarded. After that the template generator is used.
TestSuite generate_tests(const LlmClient* llm, const FunctionCase& fc, const TestingConfig& cfg, const Compiler& compiler,
                         const std::filesystem::path& scratch, SharedLedger* ledger = nullptr);

struct SuiteValidation {
  bool validated = false;
  /// Names the failing step when !validated.
  std::optional<std::string> reason;
  /// The original has an empty body: the sensitivity step cannot work.
  bool excluded = false;
};

/// Baseline equivalence (original in the slot must pass) then sensitivity
/// (mutant in the slot must fail with exit 1).
SuiteValidation validate_suite(const TestSuite& suite, const FunctionCase& fc, const Compiler& compiler,
                               const std::filesystem::path& scratch,
                               std::chrono::seconds timeout = std::chrono::seconds(10));

enum class TestVerdict { Pass, Fail, BuildFail, RuntimeCrash, Timeout };
std::string_view to_string(TestVerdict verdict);

struct Divergence {
  int trial = -1;
  std::string param;
  std::string expected;
  std::string actual;
  /// INPUT lines the harness printed for the failing trial.
  std::string input_summary;
};

struct UnitTestResult {
  TestVerdict verdict = TestVerdict::BuildFail;
  int trials_run = 0;
  std::vector<Divergence> witnesses;  ///< non-empty iff verdict == Fail
  std::string diagnostic;             ///< build errors or crash description
  std::string output;                 ///< harness stdout

  bool passed() const { return verdict == TestVerdict::Pass; }
};

/// Parses `TRIAL <n> PARAM <name> EXPECTED <v> ACTUAL <v>` lines.
std::vector<Divergence> parse_witnesses(std::string_view output);

/// Builds the suite with the candidate renamed into the slot and runs it.
/// `only_trial` replays a single trial.
UnitTestResult run_tests(const TestSuite& suite, const CandidateCode& candidate, const FunctionCase& fc,
                         const Compiler& compiler, const std::filesystem::path& scratch,
                         std::chrono::seconds timeout = std::chrono::seconds(10),
                         std::optional<int> only_trial = std::nullopt);

/// Runs an already renamed slot function (e.g. a mutant) through the suite.
UnitTestResult run_slot(const TestSuite& suite, const std::string& slot_fn, const Compiler& compiler,
                        const std::filesystem::path& scratch, std::chrono::seconds timeout,
                        std::optional<int> only_trial = std::nullopt);

}  // namespace vectrans
