#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vectrans/bench.hpp"
#include "vectrans/candidate.hpp"
#include "vectrans/compiler.hpp"
#include "vectrans/corpus.hpp"
#include "vectrans/llm.hpp"
#include "vectrans/testing.hpp"
#include "vectrans/verify.hpp"

namespace vectrans {

inline constexpr int kOutcomeSchemaVersion = 1;

enum class ResponseKind { Code, CompletionClaim, NoBenefit, FormatViolation, ProviderFailure };
std::string_view to_string(ResponseKind kind);

struct RefineResponse {
  ResponseKind kind = ResponseKind::FormatViolation;
  std::optional<CandidateCode> code;
  /// No-benefit reason, format problem or provider error.
  std::string note;
};

/// Code between the markers wins; otherwise a no-benefit line, then a
/// completion claim; anything else is a format violation.
RefineResponse parse_refine_response(std::string_view text, int round);

struct CompilerFeedback {
  CompileResult compile;
  VectorizationReport report;
};

struct VerificationFeedback {
  std::optional<UnitTestResult> tests;  ///< absent unless the candidate compiled
  std::optional<FormalVerdict> formal;  ///< absent unless the tests passed
};

struct FeedbackBundle {
  /// Absent when the self-review was not requested or the provider failed.
  std::optional<std::string> self_feedback;
  std::string self_feedback_error;
  CompilerFeedback compiler;
  VerificationFeedback verification;
};

/// Self review, then compiler, then verification, as fed to the refine prompt.
std::string render_feedback(const FeedbackBundle& bundle);
/// One line: "compile=Ok vectorized=2/2 tests=Pass formal=Equivalent".
std::string summarize(const FeedbackBundle& bundle);

enum class Gate { Compile, Tests, Formal, Bench };
enum class GateStatus { Passed, Failed, Unavailable };
std::string_view to_string(Gate gate);
std::string_view to_string(GateStatus status);

struct GateEvent {
  Gate gate = Gate::Compile;
  GateStatus status = GateStatus::Failed;
  bool operator==(const GateEvent&) const = default;
};

enum class Action { EmitSuccess, ContinueRefine, StopRoundLimit, StopPrematureClaim, StopNoBenefit };
std::string_view to_string(Action action);

struct TraceEntry {
  int round = 0;
  ResponseKind response = ResponseKind::FormatViolation;
  std::string summary;
  Action action = Action::ContinueRefine;
  std::vector<GateEvent> gates;
};

/// Gate-order violations in a trace, one message each; empty when sound.
/// Within a round gates appear as a prefix of compile, tests, formal,
/// bench, and each needs its predecessor passed (bench also accepts an
/// unavailable verifier).
std::vector<std::string> check_gate_order(const std::vector<TraceEntry>& trace);

struct EngineConfig {
  int max_rounds = 20;
  std::chrono::seconds case_wallclock{1800};
  TestingConfig testing;
  bool self_feedback = true;
  bool bench_enabled = true;
  BenchConfig bench;
  std::chrono::seconds verify_timeout{120};
};

struct IterationState {
  int round = 0;
  std::optional<CandidateCode> candidate;
  std::vector<TraceEntry> trace;
  int consecutive_false_claims = 0;
};

/// What decide() looks at for the round just finished.
struct RoundFacts {
  ResponseKind response = ResponseKind::FormatViolation;
  const FeedbackBundle* bundle = nullptr;
  /// Report consulted for a no-benefit declaration.
  const VectorizationReport* no_benefit_report = nullptr;
  bool tests_only = false;
};

/// compile Ok, fully vectorized, tests Pass, and formal Equivalent (or an
/// unavailable verifier when running tests-only).
bool success_conjunction(const FeedbackBundle& bundle, bool tests_only);

/// `state` already counts the current round and claim streak.
Action decide(const RoundFacts& facts, const IterationState& state, const EngineConfig& cfg);

enum class OutcomeKind { Success, FailRoundLimit, FailPrematureClaim, NoBenefitDeclared, SemanticEscape };
std::string_view to_string(OutcomeKind kind);
std::optional<OutcomeKind> outcome_kind_from_string(std::string_view s);

struct RunFlags {
  bool tests_only = false;
  bool budget_exhausted = false;
  bool baseline_failed = false;
  bool suite_validated = false;
  bool suite_excluded = false;
  std::string suite_origin;
  std::string suite_note;
  int suite_generations = 0;
  int provider_failure_rounds = 0;
  int format_violation_rounds = 0;
  bool operator==(const RunFlags&) const = default;
};

struct RunOutcome {
  std::string case_id;
  OutcomeKind kind = OutcomeKind::FailRoundLimit;
  std::optional<CandidateCode> final_code;
  std::optional<double> speedup;
  std::optional<BenchRecord> bench;
  std::string bench_error;
  std::vector<TraceEntry> trace;
  CostLedger ledger;
  int rounds_used = 0;
  RunFlags flags;
  std::optional<NonVectorizableCategory> category;
  std::string no_benefit_reason;
};

nlohmann::json to_json(const RunOutcome& outcome);
/// Throws SchemaMismatch when the schema version differs.
RunOutcome outcome_from_json(const nlohmann::json& j);

/// Reclassifies a Success whose final code an independent oracle run of
/// the tests rejects. The live pipeline never produces SemanticEscape.
void apply_escape_oracle(RunOutcome& outcome, const UnitTestResult& oracle_result);

struct EngineContext {
  const Compiler& compiler;
  const LlmClient& llm;
  const Verifier& verifier;
  EngineConfig config;
  /// Cases are archived under `<archive_root>/cases/<id>/`.
  std::filesystem::path archive_root;
};

/// One case's pipeline: baseline, suite, then rounds until decide() stops.
class CaseRunner {
 public:
  CaseRunner(const FunctionCase& fc, const EngineContext& ctx);

  /// Gates in order: compile (Diagnose), unit tests, formal verification.
  /// Later gates are skipped once one fails. Gate events are appended to
  /// `gates`; artifacts land in `dir`.
  FeedbackBundle feedback_phase(const CandidateCode& candidate, bool with_self_feedback,
                                const std::filesystem::path& dir, std::vector<GateEvent>& gates);

  RunOutcome run();

  /// Set up by run(); exposed for tests that drive feedback_phase directly.
  void prepare();
  const TestSuite& suite() const { return suite_; }
  const VectorizationReport& baseline_report() const { return baseline_report_; }

 private:
  std::filesystem::path case_dir() const;
  std::string diagnose_unit(const std::string& fn_text) const;

  const FunctionCase& fc_;
  const EngineContext& ctx_;
  SharedLedger ledger_;
  TestSuite suite_;
  RunFlags flags_;
  VectorizationReport baseline_report_;
  std::optional<std::filesystem::path> original_ir_;
  bool prepared_ = false;
};

RunOutcome run_case(const FunctionCase& fc, const EngineContext& ctx);

/// Runs every case with up to `parallelism` concurrent pipelines; results
/// keep the order of `cases`.
std::vector<RunOutcome> run_corpus(const std::vector<FunctionCase>& cases, const EngineContext& ctx, int parallelism);

}  // namespace vectrans
