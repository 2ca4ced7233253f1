#include "vectrans/engine.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "vectrans/error.hpp"
#include "vectrans/text.hpp"

namespace vectrans {

using json = nlohmann::json;

namespace {

constexpr size_t kDiagnosticLimit = 4000;

std::string clip(std::string_view s, size_t limit = kDiagnosticLimit) {
  if (s.size() <= limit) return std::string(s);
  return std::string(s.substr(0, limit)) + "\n[... truncated ...]";
}

std::string round_dir_name(int round) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "round_%02d", round);
  return buf;
}

std::string render_tests(const UnitTestResult& t) {
  std::ostringstream out;
  switch (t.verdict) {
    case TestVerdict::Pass:
      out << "PASS: original and candidate agree on " << t.trials_run << " random trials.";
      break;
    case TestVerdict::Fail: {
      const Divergence& d = t.witnesses.front();
      out << "FAIL: outputs differ in trial " << d.trial << ". Parameter " << d.param << ": original produced "
          << d.expected << ", candidate produced " << d.actual << '.';
      if (t.witnesses.size() > 1) {
        out << " Other differing outputs:";
        for (size_t i = 1; i < t.witnesses.size() && i < 6; ++i) out << ' ' << t.witnesses[i].param;
        out << '.';
      }
      if (!d.input_summary.empty()) out << "\nInputs of that trial:\n" << d.input_summary;
      break;
    }
    case TestVerdict::BuildFail:
      out << "BUILD FAILED: the test harness does not build with the candidate:\n" << clip(t.diagnostic);
      break;
    case TestVerdict::RuntimeCrash:
      out << "CRASH: " << t.diagnostic;
      break;
    case TestVerdict::Timeout:
      out << "TIMEOUT: " << t.diagnostic << " (possible infinite loop).";
      break;
  }
  return out.str();
}

std::string render_formal(const FormalVerdict& f) {
  switch (f.kind) {
    case FormalKind::Equivalent: return "EQUIVALENT: the translation validator proved the candidate equivalent.";
    case FormalKind::Mismatch: return "MISMATCH: the translation validator found a counterexample:\n" + clip(f.text);
    case FormalKind::Timeout: return "TIMEOUT: the translation validator ran out of time.";
    case FormalKind::ToolError:
      if (f.unavailable()) return "not available on this host (tests-only mode).";
      return "ERROR: the translation validator failed:\n" + clip(f.text);
  }
  return {};
}

json gates_json(const std::vector<GateEvent>& gates) {
  json arr = json::array();
  for (const auto& g : gates) arr.push_back({{"gate", to_string(g.gate)}, {"status", to_string(g.status)}});
  return arr;
}

template <typename E>
E enum_from(const json& j, std::initializer_list<E> values) {
  std::string s = j.get<std::string>();
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw SchemaMismatch("unknown enum value '" + s + "' in archived outcome");
}

}  // namespace

std::string_view to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Code: return "Code";
    case ResponseKind::CompletionClaim: return "CompletionClaim";
    case ResponseKind::NoBenefit: return "NoBenefit";
    case ResponseKind::FormatViolation: return "FormatViolation";
    case ResponseKind::ProviderFailure: return "ProviderFailure";
  }
  return "FormatViolation";
}

std::string_view to_string(Gate gate) {
  switch (gate) {
    case Gate::Compile: return "compile";
    case Gate::Tests: return "tests";
    case Gate::Formal: return "formal";
    case Gate::Bench: return "bench";
  }
  return "compile";
}

std::string_view to_string(GateStatus status) {
  switch (status) {
    case GateStatus::Passed: return "passed";
    case GateStatus::Failed: return "failed";
    case GateStatus::Unavailable: return "unavailable";
  }
  return "failed";
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::EmitSuccess: return "EmitSuccess";
    case Action::ContinueRefine: return "ContinueRefine";
    case Action::StopRoundLimit: return "StopRoundLimit";
    case Action::StopPrematureClaim: return "StopPrematureClaim";
    case Action::StopNoBenefit: return "StopNoBenefit";
  }
  return "ContinueRefine";
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Success: return "Success";
    case OutcomeKind::FailRoundLimit: return "FailRoundLimit";
    case OutcomeKind::FailPrematureClaim: return "FailPrematureClaim";
    case OutcomeKind::NoBenefitDeclared: return "NoBenefitDeclared";
    case OutcomeKind::SemanticEscape: return "SemanticEscape";
  }
  return "FailRoundLimit";
}

std::optional<OutcomeKind> outcome_kind_from_string(std::string_view s) {
  for (auto k : {OutcomeKind::Success, OutcomeKind::FailRoundLimit, OutcomeKind::FailPrematureClaim,
                 OutcomeKind::NoBenefitDeclared, OutcomeKind::SemanticEscape}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

RefineResponse parse_refine_response(std::string_view text, int round) {
  RefineResponse r;
  std::string violation;
  try {
    CandidateCode code = extract_candidate(text);
    code.round = round;
    if (!trim(code.text).empty()) {
      r.kind = ResponseKind::Code;
      r.code = std::move(code);
      return r;
    }
    violation = "the region between the markers is empty";
  } catch (const MarkerNotFound& e) {
    violation = e.what();
  }
  for (std::string_view line : split_lines(text)) {
    std::string_view t = trim(line);
    if (t.starts_with(kNoBenefitMarker)) {
      r.kind = ResponseKind::NoBenefit;
      r.note = std::string(trim(t.substr(kNoBenefitMarker.size())));
      return r;
    }
  }
  for (std::string_view line : split_lines(text)) {
    if (trim(line) == kDoneMarker) {
      r.kind = ResponseKind::CompletionClaim;
      return r;
    }
  }
  r.kind = ResponseKind::FormatViolation;
  r.note = violation;
  return r;
}

std::string render_feedback(const FeedbackBundle& bundle) {
  std::ostringstream out;
  out << "### 1. Self review\n";
  if (bundle.self_feedback) {
    out << *bundle.self_feedback << "\n";
  } else if (!bundle.self_feedback_error.empty()) {
    out << "unavailable (" << bundle.self_feedback_error << ")\n";
  } else {
    out << "not requested this round\n";
  }
  out << "\n### 2. Compiler\n";
  const auto& compile = bundle.compiler.compile;
  if (!compile.ok()) {
    out << "Compilation FAILED:\n" << clip(compile.diagnostic) << "\n";
  } else {
    out << render_report(bundle.compiler.report);
  }
  out << "\n### 3. Verification\n";
  out << "Unit tests: ";
  if (bundle.verification.tests) {
    out << render_tests(*bundle.verification.tests) << "\n";
  } else {
    out << "not run because the candidate did not compile.\n";
  }
  out << "Formal verification: ";
  if (bundle.verification.formal) {
    out << render_formal(*bundle.verification.formal) << "\n";
  } else {
    out << "not run because the unit tests did not pass.\n";
  }
  return out.str();
}

std::string summarize(const FeedbackBundle& bundle) {
  std::ostringstream out;
  out << "compile=" << (bundle.compiler.compile.ok() ? "Ok" : "Error");
  if (bundle.compiler.compile.ok()) {
    out << " vectorized=" << bundle.compiler.report.vectorized_count() << '/' << bundle.compiler.report.loops.size();
  }
  if (bundle.verification.tests) out << " tests=" << to_string(bundle.verification.tests->verdict);
  if (bundle.verification.formal) {
    out << " formal=" << to_string(bundle.verification.formal->kind);
    if (bundle.verification.formal->unavailable()) out << "(unavailable)";
  }
  return out.str();
}

std::vector<std::string> check_gate_order(const std::vector<TraceEntry>& trace) {
  std::vector<std::string> problems;
  for (const auto& e : trace) {
    const auto& g = e.gates;
    for (size_t i = 0; i < g.size(); ++i) {
      std::string where = "round " + std::to_string(e.round) + ": ";
      if (static_cast<size_t>(g[i].gate) != i) {
        problems.push_back(where + std::string(to_string(g[i].gate)) + " gate out of order");
        break;
      }
      if (i == 0) continue;
      GateStatus prev = g[i - 1].status;
      bool ok = prev == GateStatus::Passed || (g[i].gate == Gate::Bench && prev == GateStatus::Unavailable);
      if (!ok) {
        problems.push_back(where + std::string(to_string(g[i].gate)) + " gate ran after " +
                           std::string(to_string(g[i - 1].gate)) + " " + std::string(to_string(prev)));
      }
      if (g[i].gate == Gate::Bench && e.action != Action::EmitSuccess) {
        problems.push_back(where + "bench gate in a round that did not succeed");
      }
    }
  }
  return problems;
}

bool success_conjunction(const FeedbackBundle& bundle, bool tests_only) {
  if (!bundle.compiler.compile.ok()) return false;
  if (!is_fully_vectorized(bundle.compiler.report)) return false;
  if (!bundle.verification.tests || !bundle.verification.tests->passed()) return false;
  if (!bundle.verification.formal) return false;
  if (bundle.verification.formal->equivalent()) return true;
  return tests_only && bundle.verification.formal->unavailable();
}

Action decide(const RoundFacts& facts, const IterationState& state, const EngineConfig& cfg) {
  if (facts.bundle != nullptr && success_conjunction(*facts.bundle, facts.tests_only)) return Action::EmitSuccess;
  if (facts.response == ResponseKind::NoBenefit && facts.no_benefit_report != nullptr &&
      facts.no_benefit_report->vectorized_count() == 0) {
    return Action::StopNoBenefit;
  }
  if (facts.response == ResponseKind::CompletionClaim && state.consecutive_false_claims >= 2) {
    return Action::StopPrematureClaim;
  }
  if (state.round >= cfg.max_rounds) return Action::StopRoundLimit;
  return Action::ContinueRefine;
}

// ------------------------------------------------------------------- outcome

json to_json(const RunOutcome& o) {
  json j;
  j["schema_version"] = kOutcomeSchemaVersion;
  j["case_id"] = o.case_id;
  j["kind"] = to_string(o.kind);
  j["rounds_used"] = o.rounds_used;
  j["final_code"] = o.final_code ? json{{"text", o.final_code->text}, {"round", o.final_code->round}} : json(nullptr);
  j["speedup"] = o.speedup ? json(*o.speedup) : json(nullptr);
  j["bench"] = o.bench ? to_json(*o.bench) : json(nullptr);
  j["bench_error"] = o.bench_error;
  json trace = json::array();
  for (const auto& e : o.trace) {
    trace.push_back({{"round", e.round},
                     {"response", to_string(e.response)},
                     {"summary", e.summary},
                     {"action", to_string(e.action)},
                     {"gates", gates_json(e.gates)}});
  }
  j["trace"] = std::move(trace);
  j["ledger"] = {{"input_tokens", o.ledger.input_tokens},
                 {"output_tokens", o.ledger.output_tokens},
                 {"price_in_per_million", o.ledger.price_in_per_million},
                 {"price_out_per_million", o.ledger.price_out_per_million},
                 {"cost", o.ledger.cost()}};
  const RunFlags& f = o.flags;
  j["flags"] = {{"tests_only", f.tests_only},
                {"budget_exhausted", f.budget_exhausted},
                {"baseline_failed", f.baseline_failed},
                {"suite_validated", f.suite_validated},
                {"suite_excluded", f.suite_excluded},
                {"suite_origin", f.suite_origin},
                {"suite_note", f.suite_note},
                {"suite_generations", f.suite_generations},
                {"provider_failure_rounds", f.provider_failure_rounds},
                {"format_violation_rounds", f.format_violation_rounds}};
  j["category"] = o.category ? json{{"tag", to_string(o.category->tag)}, {"other", o.category->other_text}}
                             : json(nullptr);
  j["no_benefit_reason"] = o.no_benefit_reason;
  return j;
}

RunOutcome outcome_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw SchemaMismatch("archived outcome has no schema_version");
  int version = j["schema_version"].get<int>();
  if (version != kOutcomeSchemaVersion) {
    throw SchemaMismatch("archived outcome has schema version " + std::to_string(version) + ", this build reads " +
                         std::to_string(kOutcomeSchemaVersion));
  }
  try {
    RunOutcome o;
    o.case_id = j.at("case_id").get<std::string>();
    auto kind = outcome_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw SchemaMismatch("unknown outcome kind " + j["kind"].dump());
    o.kind = *kind;
    o.rounds_used = j.at("rounds_used").get<int>();
    if (!j.at("final_code").is_null()) {
      o.final_code = CandidateCode{j["final_code"].at("text").get<std::string>(), j["final_code"].at("round").get<int>()};
    }
    if (!j.at("speedup").is_null()) o.speedup = j["speedup"].get<double>();
    if (!j.at("bench").is_null()) o.bench = bench_record_from_json(j["bench"]);
    o.bench_error = j.value("bench_error", "");
    for (const auto& t : j.at("trace")) {
      TraceEntry e;
      e.round = t.at("round").get<int>();
      e.response = enum_from(t.at("response"), {ResponseKind::Code, ResponseKind::CompletionClaim, ResponseKind::NoBenefit,
                                                ResponseKind::FormatViolation, ResponseKind::ProviderFailure});
      e.summary = t.at("summary").get<std::string>();
      e.action = enum_from(t.at("action"), {Action::EmitSuccess, Action::ContinueRefine, Action::StopRoundLimit,
                                            Action::StopPrematureClaim, Action::StopNoBenefit});
      for (const auto& g : t.at("gates")) {
        e.gates.push_back(GateEvent{enum_from(g.at("gate"), {Gate::Compile, Gate::Tests, Gate::Formal, Gate::Bench}),
                                    enum_from(g.at("status"), {GateStatus::Passed, GateStatus::Failed,
                                                               GateStatus::Unavailable})});
      }
      o.trace.push_back(std::move(e));
    }
    const auto& l = j.at("ledger");
    o.ledger.input_tokens = l.at("input_tokens").get<long long>();
    o.ledger.output_tokens = l.at("output_tokens").get<long long>();
    o.ledger.price_in_per_million = l.at("price_in_per_million").get<double>();
    o.ledger.price_out_per_million = l.at("price_out_per_million").get<double>();
    const auto& f = j.at("flags");
    o.flags.tests_only = f.at("tests_only").get<bool>();
    o.flags.budget_exhausted = f.at("budget_exhausted").get<bool>();
    o.flags.baseline_failed = f.at("baseline_failed").get<bool>();
    o.flags.suite_validated = f.at("suite_validated").get<bool>();
    o.flags.suite_excluded = f.at("suite_excluded").get<bool>();
    o.flags.suite_origin = f.at("suite_origin").get<std::string>();
    o.flags.suite_note = f.at("suite_note").get<std::string>();
    o.flags.suite_generations = f.at("suite_generations").get<int>();
    o.flags.provider_failure_rounds = f.at("provider_failure_rounds").get<int>();
    o.flags.format_violation_rounds = f.at("format_violation_rounds").get<int>();
    if (!j.at("category").is_null()) {
      auto tag = category_from_string(j["category"].at("tag").get<std::string>());
      if (!tag) throw SchemaMismatch("unknown category " + j["category"].dump());
      o.category = NonVectorizableCategory{*tag, j["category"].value("other", "")};
    }
    o.no_benefit_reason = j.value("no_benefit_reason", "");
    return o;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("malformed archived outcome: ") + e.what());
  }
}

void apply_escape_oracle(RunOutcome& outcome, const UnitTestResult& oracle_result) {
  if (outcome.kind == OutcomeKind::Success && oracle_result.verdict == TestVerdict::Fail) {
    outcome.kind = OutcomeKind::SemanticEscape;
  }
}

// -------------------------------------------------------------------- runner

CaseRunner::CaseRunner(const FunctionCase& fc, const EngineContext& ctx)
    : fc_(fc),
      ctx_(ctx),
      ledger_(CostLedger{0, 0, ctx.llm.config().price_in_per_million, ctx.llm.config().price_out_per_million}) {}

std::filesystem::path CaseRunner::case_dir() const { return ctx_.archive_root / "cases" / fc_.id; }

std::string CaseRunner::diagnose_unit(const std::string& fn_text) const {
  return fc_.context_text + "\n#line 1 \"candidate.c\"\n" + fn_text + "\n";
}

void CaseRunner::prepare() {
  if (prepared_) return;
  prepared_ = true;
  const auto dir = case_dir();
  std::filesystem::create_directories(dir);
  flags_.tests_only = !ctx_.verifier.available();

  CompileResult base = ctx_.compiler.compile(diagnose_unit(fc_.source_text), FlagsProfile::Diagnose, dir / "baseline",
                                             "original", fc_.extra_flags);
  write_file(dir / "baseline" / "remarks.txt", base.remarks_raw);
  if (!base.ok()) {
    flags_.baseline_failed = true;
    return;
  }
  baseline_report_ = parse_remarks(base.remarks_raw);
  baseline_report_.compiler_stamp = ctx_.compiler.stamp();
  write_file(dir / "baseline" / "report.txt", render_report(baseline_report_));

  if (ctx_.verifier.available()) {
    CompileResult ir = ctx_.compiler.compile(fc_.translation_unit(), FlagsProfile::EmitIr, dir / "baseline", "original",
                                             fc_.extra_flags);
    if (ir.ok()) original_ir_ = *ir.artifact_path;
  }

  const TestingConfig& tcfg = ctx_.config.testing;
  suite_ = generate_tests(&ctx_.llm, fc_, tcfg, ctx_.compiler, dir / "suite" / "generate", &ledger_);
  flags_.suite_generations = 1;
  SuiteValidation v = validate_suite(suite_, fc_, ctx_.compiler, dir / "suite" / "validate", tcfg.harness_timeout);
  if (!v.validated && !v.excluded && suite_.origin == SuiteOrigin::Llm) {
    flags_.suite_note = "LLM suite rejected (" + v.reason.value_or("") + "); using the template suite";
    TestSuite fallback;
    fallback.case_id = fc_.id;
    fallback.input_spec = suite_.input_spec;
    fallback.origin = SuiteOrigin::Template;
    fallback.generation_attempts = suite_.generation_attempts;
    fallback.harness_source = differential_harness(fc_, fallback.input_spec, tcfg.compare);
    suite_ = std::move(fallback);
    v = validate_suite(suite_, fc_, ctx_.compiler, dir / "suite" / "validate_template", tcfg.harness_timeout);
  }
  suite_.validated = v.validated;
  flags_.suite_validated = v.validated;
  flags_.suite_excluded = v.excluded;
  flags_.suite_origin = std::string(to_string(suite_.origin));
  if (v.reason) flags_.suite_note += (flags_.suite_note.empty() ? "" : "; ") + *v.reason;
  write_file(dir / "suite" / "harness.c", suite_.harness_source);
}

FeedbackBundle CaseRunner::feedback_phase(const CandidateCode& candidate, bool with_self_feedback,
                                          const std::filesystem::path& dir, std::vector<GateEvent>& gates) {
  prepare();
  FeedbackBundle bundle;
  std::filesystem::create_directories(dir);
  if (with_self_feedback && ctx_.config.self_feedback) {
    try {
      Completion c = ctx_.llm.complete(PromptKind::SelfFeedback,
                                       SlotMap{{"SOURCE", fc_.source_text}, {"CANDIDATE", candidate.text}}, fc_.id,
                                       &ledger_);
      bundle.self_feedback = c.text;
      write_file(dir / "self_feedback.txt", c.text);
    } catch (const Error& e) {
      bundle.self_feedback_error = e.what();
    }
  }

  const std::string& name = fc_.signature.name;
  auto& compile = bundle.compiler.compile;
  if (!defines_function(candidate.text, name) && !defines_function(candidate.text, opt_name(name))) {
    compile.status = CompileStatus::Error;
    compile.diagnostic = "the candidate does not define a function named '" + name + "'";
  } else {
    try {
      compile = ctx_.compiler.compile(diagnose_unit(candidate.text), FlagsProfile::Diagnose, dir, "candidate",
                                      fc_.extra_flags);
    } catch (const TimeoutError& e) {
      compile = CompileResult{};
      compile.status = CompileStatus::Error;
      compile.diagnostic = e.what();
    }
    write_file(dir / "remarks.txt", compile.remarks_raw);
  }
  if (!compile.ok()) {
    gates.push_back({Gate::Compile, GateStatus::Failed});
    return bundle;
  }
  bundle.compiler.report = parse_remarks(compile.remarks_raw);
  bundle.compiler.report.compiler_stamp = ctx_.compiler.stamp();
  write_file(dir / "report.txt", render_report(bundle.compiler.report));
  gates.push_back({Gate::Compile, GateStatus::Passed});

  UnitTestResult tests = run_tests(suite_, candidate, fc_, ctx_.compiler, dir / "tests", ctx_.config.testing.harness_timeout);
  bool passed = tests.passed();
  bundle.verification.tests = std::move(tests);
  gates.push_back({Gate::Tests, passed ? GateStatus::Passed : GateStatus::Failed});
  if (!passed) return bundle;

  if (!ctx_.verifier.available()) {
    bundle.verification.formal = unavailable_verdict();
    gates.push_back({Gate::Formal, GateStatus::Unavailable});
    return bundle;
  }
  FormalVerdict formal;
  CompileResult ir = ctx_.compiler.compile(fc_.context_text + "\n" + candidate.text + "\n", FlagsProfile::EmitIr,
                                           dir / "ir", "candidate", fc_.extra_flags);
  if (!original_ir_) {
    formal = {FormalKind::ToolError, "the original function's IR could not be produced"};
  } else if (!ir.ok()) {
    formal = {FormalKind::ToolError, "candidate IR could not be produced:\n" + ir.diagnostic};
  } else {
    Verifier::Raw raw;
    formal = ctx_.verifier.verify_pair_raw(*original_ir_, *ir.artifact_path, name, ctx_.config.verify_timeout, raw);
    write_file(dir / "verifier.txt", raw.out + raw.err);
  }
  bool eq = formal.equivalent();
  bundle.verification.formal = std::move(formal);
  gates.push_back({Gate::Formal, eq ? GateStatus::Passed : GateStatus::Failed});
  return bundle;
}

RunOutcome CaseRunner::run() {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const EngineConfig& cfg = ctx_.config;
  RunOutcome outcome;
  outcome.case_id = fc_.id;
  outcome.category = fc_.category;

  prepare();
  if (!outcome.category) {
    try {
      outcome.category = classify_case(baseline_report_);
    } catch (const std::invalid_argument&) {
    }
  }
  const auto dir = case_dir();
  if (flags_.baseline_failed) {
    outcome.kind = OutcomeKind::FailRoundLimit;
    outcome.flags = flags_;
    write_file(dir / "outcome.json", to_json(outcome).dump(2) + "\n");
    return outcome;
  }

  const std::string baseline_feedback =
      "No candidate has been produced yet. Compiler report for the original function:\n" +
      render_report(baseline_report_);
  std::string feedback = baseline_feedback;
  std::string last_bundle_feedback = baseline_feedback;
  IterationState state;
  OutcomeKind kind = OutcomeKind::FailRoundLimit;

  for (;;) {
    if (Clock::now() - start >= cfg.case_wallclock) {
      flags_.budget_exhausted = true;
      kind = OutcomeKind::FailRoundLimit;
      break;
    }
    ++state.round;
    const auto rdir = dir / round_dir_name(state.round);
    std::filesystem::create_directories(rdir);
    write_file(rdir / "feedback_in.txt", feedback);

    RefineResponse resp;
    try {
      SlotMap slots = refine_slots(fc_.source_text, state.candidate ? state.candidate->text : "", feedback);
      slots["FUNCTION_NAME"] = fc_.signature.name;
      Completion c = ctx_.llm.complete(PromptKind::Refine, slots, fc_.id, &ledger_);
      write_file(rdir / "response.txt", c.text);
      resp = parse_refine_response(c.text, state.round);
    } catch (const Error& e) {
      resp.kind = ResponseKind::ProviderFailure;
      resp.note = e.what();
    }

    TraceEntry entry;
    entry.round = state.round;
    entry.response = resp.kind;
    std::optional<FeedbackBundle> bundle;
    std::optional<CandidateCode> evaluated;
    RoundFacts facts;
    facts.response = resp.kind;
    facts.tests_only = flags_.tests_only;

    switch (resp.kind) {
      case ResponseKind::Code:
        state.candidate = *resp.code;
        state.consecutive_false_claims = 0;
        write_file(rdir / "candidate.c", state.candidate->text);
        evaluated = state.candidate;
        bundle = feedback_phase(*evaluated, true, rdir, entry.gates);
        break;
      case ResponseKind::CompletionClaim:
        evaluated = state.candidate.value_or(CandidateCode{fc_.source_text, 0});
        bundle = feedback_phase(*evaluated, false, rdir, entry.gates);
        if (!bundle->compiler.compile.ok() || !is_fully_vectorized(bundle->compiler.report)) {
          ++state.consecutive_false_claims;
        } else {
          state.consecutive_false_claims = 0;
        }
        break;
      case ResponseKind::NoBenefit:
        state.consecutive_false_claims = 0;
        facts.no_benefit_report = &baseline_report_;
        break;
      case ResponseKind::FormatViolation:
        state.consecutive_false_claims = 0;
        ++flags_.format_violation_rounds;
        break;
      case ResponseKind::ProviderFailure:
        state.consecutive_false_claims = 0;
        ++flags_.provider_failure_rounds;
        break;
    }
    facts.bundle = bundle ? &*bundle : nullptr;
    Action action = decide(facts, state, cfg);

    if (bundle) {
      entry.summary = summarize(*bundle);
    } else if (resp.kind == ResponseKind::NoBenefit) {
      entry.summary = "no-benefit: " + resp.note;
    } else {
      entry.summary = std::string(resp.kind == ResponseKind::FormatViolation ? "format violation: " : "provider failure: ") +
                      resp.note;
    }
    entry.action = action;
    json snap{{"round", entry.round},
              {"response", to_string(entry.response)},
              {"summary", entry.summary},
              {"action", to_string(action)},
              {"gates", gates_json(entry.gates)}};
    if (bundle) snap["feedback"] = render_feedback(*bundle);
    write_file(rdir / "bundle.json", snap.dump(2) + "\n");
    state.trace.push_back(std::move(entry));

    if (action == Action::EmitSuccess) {
      kind = OutcomeKind::Success;
      outcome.final_code = evaluated;
      break;
    }
    if (action == Action::StopRoundLimit) {
      kind = OutcomeKind::FailRoundLimit;
      break;
    }
    if (action == Action::StopPrematureClaim) {
      kind = OutcomeKind::FailPrematureClaim;
      break;
    }
    if (action == Action::StopNoBenefit) {
      kind = OutcomeKind::NoBenefitDeclared;
      outcome.no_benefit_reason = resp.note;
      break;
    }

    switch (resp.kind) {
      case ResponseKind::Code:
        last_bundle_feedback = render_feedback(*bundle);
        feedback = last_bundle_feedback;
        break;
      case ResponseKind::CompletionClaim:
        last_bundle_feedback = render_feedback(*bundle);
        feedback = "You reported the current candidate as finished, but it does not pass every check yet.\n\n" +
                   last_bundle_feedback;
        break;
      case ResponseKind::NoBenefit:
        feedback = "You declared that vectorization brings no benefit, but the compiler already vectorizes " +
                   std::to_string(baseline_report_.vectorized_count()) +
                   " loop(s) of the original, so the declaration was not accepted.\n\n" + last_bundle_feedback;
        break;
      case ResponseKind::FormatViolation:
        feedback = "Your previous reply could not be used: " + resp.note +
                   ". Reply with the complete function between the marker lines.\n\n" + last_bundle_feedback;
        break;
      case ResponseKind::ProviderFailure:
        feedback = "The previous request failed (" + resp.note + ") and the round was consumed.\n\n" +
                   last_bundle_feedback;
        break;
    }
  }

  outcome.kind = kind;
  outcome.rounds_used = static_cast<int>(state.trace.size());

  if (kind == OutcomeKind::Success && cfg.bench_enabled && outcome.final_code) {
    auto& gates = state.trace.back().gates;
    try {
      BenchRecord rec = measure(fc_, *outcome.final_code, ctx_.compiler, cfg.bench, suite_.input_spec, dir / "bench");
      gates.push_back({Gate::Bench, rec.checksum_match ? GateStatus::Passed : GateStatus::Failed});
      if (rec.checksum_match) outcome.speedup = rec.speedup;
      outcome.bench = std::move(rec);
    } catch (const Error& e) {
      gates.push_back({Gate::Bench, GateStatus::Failed});
      outcome.bench_error = e.what();
    }
  }

  outcome.trace = std::move(state.trace);
  outcome.ledger = ledger_.snapshot();
  outcome.flags = flags_;
  write_file(dir / "outcome.json", to_json(outcome).dump(2) + "\n");
  return outcome;
}

RunOutcome run_case(const FunctionCase& fc, const EngineContext& ctx) {
  CaseRunner runner(fc, ctx);
  try {
    return runner.run();
  } catch (const Error& e) {
    RunOutcome o;
    o.case_id = fc.id;
    o.kind = OutcomeKind::FailRoundLimit;
    o.category = fc.category;
    o.flags.baseline_failed = true;
    o.flags.suite_note = std::string("pipeline error: ") + e.what();
    write_file(ctx.archive_root / "cases" / fc.id / "outcome.json", to_json(o).dump(2) + "\n");
    return o;
  }
}

std::vector<RunOutcome> run_corpus(const std::vector<FunctionCase>& cases, const EngineContext& ctx, int parallelism) {
  std::vector<RunOutcome> out(cases.size());
  int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(cases.size())));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < cases.size(); i = next++) out[i] = run_case(cases[i], ctx);
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace vectrans
