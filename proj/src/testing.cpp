#include "vectrans/testing.hpp"

#include <algorithm>
#include <sstream>

#include "vectrans/error.hpp"
#include "vectrans/process.hpp"
#include "vectrans/text.hpp"

namespace vectrans {
namespace {

ValueRange default_range(const ParamInfo& p) {
  if (p.type.is_real()) return {-1.0, 1.0};
  if (p.kind == ParamKind::ScalarIn) return {1.0, 4.0};
  if (p.type.cls == NumericClass::UnsignedInt) return {0.0, 16.0};
  return {-8.0, 8.0};
}

std::string param_description(const FunctionCase& fc, const InputSpec& spec) {
  std::ostringstream out;
  for (const auto& p : fc.signature.params) {
    const ValueRange& r = spec.value_ranges.at(p.name);
    out << "- " << p.name << ": ";
    if (p.kind == ParamKind::ArrayInOut) {
      out << "array of " << p.type.c_type;
      for (size_t i = 0; i < p.extents.size(); ++i) out << '[' << p.extent_symbols[i] << " = " << p.extents[i] << ']';
      out << ", read and written";
    } else {
      out << "scalar " << p.type.c_type;
    }
    out << ", values in [" << r.lo << ", " << r.hi << "]\n";
  }
  if (fc.signature.return_kind) out << "- return value: " << fc.signature.return_kind->c_type << "\n";
  return out.str();
}

bool driver_builds(const TestSuite& suite, const FunctionCase& fc, const Compiler& compiler,
                   const std::filesystem::path& scratch, std::string& error) {
  CompileResult r = compiler.build_executable(fill_candidate(suite.harness_source, rename_to_opt(fc.source_text, fc.signature.name)),
                                              scratch, "generated");
  if (!r.ok()) error = r.diagnostic;
  return r.ok();
}

}  // namespace

std::string_view to_string(SuiteOrigin origin) {
  switch (origin) {
    case SuiteOrigin::Template: return "template";
    case SuiteOrigin::Llm: return "llm";
    case SuiteOrigin::Fixture: return "fixture";
  }
  return "template";
}

std::string_view to_string(TestVerdict verdict) {
  switch (verdict) {
    case TestVerdict::Pass: return "Pass";
    case TestVerdict::Fail: return "Fail";
    case TestVerdict::BuildFail: return "BuildFail";
    case TestVerdict::RuntimeCrash: return "RuntimeCrash";
    case TestVerdict::Timeout: return "Timeout";
  }
  return "BuildFail";
}

InputSpec resolve_input_spec(const FunctionCase& fc, const TestingConfig& cfg) {
  InputSpec spec;
  spec.seed = cfg.seed;
  spec.trials = cfg.trials;
  for (const auto& p : fc.signature.params) {
    ValueRange r = default_range(p);
    if (auto it = fc.input_ranges.find(p.name); it != fc.input_ranges.end()) r = {it->second.first, it->second.second};
    if (auto it = cfg.overrides.find(p.name); it != cfg.overrides.end()) r = it->second;
    if (cfg.positive_only) {
      r.lo = std::max(r.lo, 0.0);
      r.hi = std::max(r.hi, r.lo);
    }
    if (r.lo > r.hi) throw ConfigError("empty input range for parameter '" + p.name + "'");
    spec.value_ranges[p.name] = r;
  }
  return spec;
}

TestSuite suite_from_driver(const FunctionCase& fc, const std::string& driver, const InputSpec& spec,
                            SuiteOrigin origin) {
  TestSuite suite;
  suite.case_id = fc.id;
  suite.input_spec = spec;
  suite.origin = origin;
  std::ostringstream src;
  src << "#include <stdint.h>\n#include <stdio.h>\n#include <stdlib.h>\n#include <string.h>\n\n"
      << fc.context_text << "\n\n"
      << fc.source_text << "\n\n"
      << kCandidateSlot << "\n\n"
      << driver << "\n";
  suite.harness_source = src.str();
  return suite;
}

TestSuite generate_tests(const LlmClient* llm, const FunctionCase& fc, const TestingConfig& cfg, const Compiler& compiler,
                         const std::filesystem::path& scratch, SharedLedger* ledger) {
  InputSpec spec = resolve_input_spec(fc, cfg);
  bool use_llm = llm != nullptr && (cfg.generator == SuiteGenerator::Llm ||
                                    (cfg.generator == SuiteGenerator::Auto && !llm->config().is_replay()));
  std::vector<std::string> errors;
  int attempts = 0;
  if (use_llm) {
    SlotMap slots{{"FUNCTION_NAME", fc.signature.name},
                  {"SLOT_NAME", opt_name(fc.signature.name)},
                  {"CONTEXT", fc.context_text},
                  {"SOURCE", fc.source_text},
                  {"PARAMETERS", param_description(fc, spec)},
                  {"TRIALS", std::to_string(spec.trials)},
                  {"SEED", std::to_string(spec.seed)}};
    for (int i = 0; i < cfg.llm_attempts; ++i) {
      ++attempts;
      try {
        Completion c = llm->complete(PromptKind::TestGeneration, slots, fc.id, ledger);
        CandidateCode driver = extract_candidate(c.text);
        TestSuite suite = suite_from_driver(fc, driver.text, spec, SuiteOrigin::Llm);
        std::string error;
        if (driver_builds(suite, fc, compiler, scratch / ("attempt_" + std::to_string(attempts)), error)) {
          suite.generation_attempts = attempts;
          suite.generation_errors = errors;
          return suite;
        }
        errors.push_back("attempt " + std::to_string(attempts) + ": harness does not build: " + error);
      } catch (const Error& e) {
        errors.push_back("attempt " + std::to_string(attempts) + ": " + e.what());
      }
    }
  }
  TestSuite suite;
  suite.case_id = fc.id;
  suite.input_spec = spec;
  suite.origin = SuiteOrigin::Template;
  suite.harness_source = differential_harness(fc, spec, cfg.compare);
  suite.generation_attempts = attempts;
  suite.generation_errors = std::move(errors);
  return suite;
}

std::vector<Divergence> parse_witnesses(std::string_view output) {
  std::vector<Divergence> out;
  std::map<int, std::string> inputs;
  for (std::string_view raw : split_lines(output)) {
    std::string_view line = trim(raw);
    std::istringstream in{std::string(line)};
    std::string tag;
    in >> tag;
    if (tag == "INPUT") {
      int trial = -1;
      in >> trial;
      auto& s = inputs[trial];
      if (!s.empty()) s += '\n';
      s += line;
      continue;
    }
    if (tag != "TRIAL") continue;
    Divergence d;
    std::string k1, k2, k3;
    in >> d.trial >> k1 >> d.param >> k2 >> d.expected >> k3 >> d.actual;
    if (!in || k1 != "PARAM" || k2 != "EXPECTED" || k3 != "ACTUAL") continue;
    out.push_back(std::move(d));
  }
  for (auto& d : out) {
    if (auto it = inputs.find(d.trial); it != inputs.end()) d.input_summary = it->second;
  }
  return out;
}

UnitTestResult run_slot(const TestSuite& suite, const std::string& slot_fn, const Compiler& compiler,
                        const std::filesystem::path& scratch, std::chrono::seconds timeout,
                        std::optional<int> only_trial) {
  UnitTestResult result;
  CompileResult build = compiler.build_executable(fill_candidate(suite.harness_source, slot_fn), scratch, "harness");
  if (!build.ok()) {
    result.verdict = TestVerdict::BuildFail;
    result.diagnostic = build.diagnostic;
    return result;
  }
  std::vector<std::string> argv{build.artifact_path->string()};
  if (only_trial) argv.insert(argv.end(), {"--trial", std::to_string(*only_trial)});
  ProcessOptions opts;
  opts.cwd = scratch;
  opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(timeout);
  ProcessResult run = run_process(argv, opts);
  result.output = run.out;
  write_file(scratch / "harness.out", run.out);
  if (run.timed_out) {
    result.verdict = TestVerdict::Timeout;
    result.diagnostic = "harness exceeded " + std::to_string(timeout.count()) + " s";
    return result;
  }
  if (run.term_signal != 0) {
    result.verdict = TestVerdict::RuntimeCrash;
    result.diagnostic = "harness killed by signal " + std::to_string(run.term_signal);
    return result;
  }
  if (run.exit_code == 0) {
    result.verdict = TestVerdict::Pass;
    result.trials_run = only_trial ? 1 : suite.input_spec.trials;
    for (std::string_view line : split_lines(run.out)) {
      std::istringstream in{std::string(trim(line))};
      std::string a, b;
      int n = 0;
      if (in >> a >> b >> n && a == "RESULT" && b == "PASS") result.trials_run = n;
    }
    return result;
  }
  if (run.exit_code == 1) {
    result.witnesses = parse_witnesses(run.out);
    if (!result.witnesses.empty()) {
      result.verdict = TestVerdict::Fail;
      result.trials_run = result.witnesses.front().trial + 1;
      return result;
    }
    result.verdict = TestVerdict::RuntimeCrash;
    result.diagnostic = "harness exited 1 without a TRIAL witness line";
    return result;
  }
  result.verdict = TestVerdict::RuntimeCrash;
  result.diagnostic = "harness exited with status " + std::to_string(run.exit_code) +
                      (run.err.empty() ? std::string() : ": " + run.err.substr(0, 2000));
  return result;
}

UnitTestResult run_tests(const TestSuite& suite, const CandidateCode& candidate, const FunctionCase& fc,
                         const Compiler& compiler, const std::filesystem::path& scratch, std::chrono::seconds timeout,
                         std::optional<int> only_trial) {
  return run_slot(suite, rename_to_opt(candidate.text, fc.signature.name), compiler, scratch, timeout, only_trial);
}

SuiteValidation validate_suite(const TestSuite& suite, const FunctionCase& fc, const Compiler& compiler,
                               const std::filesystem::path& scratch, std::chrono::seconds timeout) {
  SuiteValidation v;
  UnitTestResult baseline =
      run_slot(suite, rename_to_opt(fc.source_text, fc.signature.name), compiler, scratch / "baseline", timeout);
  if (!baseline.passed()) {
    std::string why = std::string(to_string(baseline.verdict));
    if (!baseline.diagnostic.empty()) why += ": " + baseline.diagnostic.substr(0, 500);
    v.reason = "baseline equivalence: original in the slot did not pass (" + why + ")";
    return v;
  }
  if (has_empty_body(fc)) {
    v.excluded = true;
    v.reason = "sensitivity check skipped: the original has an empty body";
    return v;
  }
  UnitTestResult mutant = run_slot(suite, mutant_function(fc), compiler, scratch / "sensitivity", timeout);
  if (mutant.verdict != TestVerdict::Fail) {
    std::string why = std::string(to_string(mutant.verdict));
    if (!mutant.diagnostic.empty()) why += ": " + mutant.diagnostic.substr(0, 500);
    v.reason = "sensitivity: mutant in the slot was not caught (" + why + ")";
    return v;
  }
  v.validated = true;
  return v;
}

}  // namespace vectrans
