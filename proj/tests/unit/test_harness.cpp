#include "doctest.h"
#include "support.hpp"
#include "vectrans/bench.hpp"
#include "vectrans/candidate.hpp"
#include "vectrans/harness.hpp"
#include "vectrans/testing.hpp"

using namespace vectrans;

namespace {

TestSuite template_suite(const FunctionCase& fc, const TestingConfig& cfg) {
  return generate_tests(nullptr, fc, cfg, vt_test::compiler(), vt_test::scratch("gen-" + fc.id));
}

CandidateCode original_as_candidate(const FunctionCase& fc) { return {fc.source_text, 1}; }

}  // namespace

TEST_CASE("input ranges resolve overrides, case ranges, then defaults") {
  auto fc = vt_test::fixture_case("s442");
  TestingConfig cfg;
  auto spec = resolve_input_spec(fc, cfg);
  CHECK(spec.value_ranges.at("a") == ValueRange{-1, 1});
  CHECK(spec.value_ranges.at("indx") == ValueRange{1, 4});
  CHECK(spec.value_ranges.at("iters") == ValueRange{1, 4});
  cfg.overrides["indx"] = {2, 2};
  cfg.positive_only = true;
  spec = resolve_input_spec(fc, cfg);
  CHECK(spec.value_ranges.at("indx") == ValueRange{2, 2});
  CHECK(spec.value_ranges.at("a") == ValueRange{0, 1});
  CHECK(spec.trials == cfg.trials);
  CHECK(spec.seed == cfg.seed);
}

TEST_CASE("mutants disagree with the original") {
  auto axpy = vt_test::kernel_case("axpy");
  auto dot = vt_test::kernel_case("dot");
  CHECK(defines_function(mutant_function(axpy), "axpy_opt"));
  CHECK(mutant_function(dot).find("dot(") != std::string::npos);
  CHECK_FALSE(has_empty_body(axpy));
  FunctionCase empty = axpy;
  empty.source_text = "void axpy(float alpha, float x[N], float y[N]) {\n  /* nothing */\n}";
  CHECK(has_empty_body(empty));
}

TEST_CASE("template suites validate on every kernel") {
  for (const char* id : {"axpy", "dot", "count_neg"}) {
    CAPTURE(id);
    auto fc = vt_test::kernel_case(id);
    auto suite = template_suite(fc, {});
    CHECK(suite.origin == SuiteOrigin::Template);
    CHECK(suite.harness_source.find(kCandidateSlot) != std::string::npos);
    auto v = validate_suite(suite, fc, vt_test::compiler(), vt_test::scratch("val"));
    CHECK_MESSAGE(v.validated, v.reason.value_or(""));
  }
}

TEST_CASE("the original passes its own suite over every trial") {
  auto fc = vt_test::fixture_case("s1113");
  TestingConfig cfg;
  auto suite = template_suite(fc, cfg);
  auto r = run_tests(suite, original_as_candidate(fc), fc, vt_test::compiler(), vt_test::scratch("self"));
  CHECK(r.verdict == TestVerdict::Pass);
  CHECK(r.trials_run == cfg.trials);
  CHECK(r.witnesses.empty());
}

TEST_CASE("hoisted early exit diverges only on signed inputs") {
  auto fc = vt_test::fixture_case("s481");
  auto hoisted = vt_test::transcript_code("s481");

  TestingConfig signed_cfg;
  auto r = run_tests(template_suite(fc, signed_cfg), hoisted, fc, vt_test::compiler(), vt_test::scratch("s481"));
  REQUIRE(r.verdict == TestVerdict::Fail);
  REQUIRE_FALSE(r.witnesses.empty());
  const auto& w = r.witnesses.front();
  CHECK(w.trial >= 0);
  CHECK(w.param.rfind("a[", 0) == 0);
  CHECK(w.expected != w.actual);
  CHECK(w.input_summary.find("PARAM d MIN") != std::string::npos);
  CHECK(w.input_summary.find("NEG 0") == std::string::npos);

  auto replay = run_tests(template_suite(fc, signed_cfg), hoisted, fc, vt_test::compiler(), vt_test::scratch("s481"),
                          std::chrono::seconds(10), w.trial);
  REQUIRE(replay.verdict == TestVerdict::Fail);
  CHECK(replay.witnesses.front().trial == w.trial);
  CHECK(replay.witnesses.front().param == w.param);

  TestingConfig positive;
  positive.positive_only = true;
  auto p = run_tests(template_suite(fc, positive), hoisted, fc, vt_test::compiler(), vt_test::scratch("s481p"));
  CHECK(p.verdict == TestVerdict::Pass);
  CHECK(p.trials_run == positive.trials);
}

TEST_CASE("broken candidates are reported by kind") {
  auto fc = vt_test::fixture_case("s1113");
  auto suite = template_suite(fc, {});
  auto dir = vt_test::scratch("broken");
  auto r = run_tests(suite, {"void s1113_opt(int iters, float a[LEN_1D], float b[LEN_1D]) { a[0] = }", 1}, fc,
                     vt_test::compiler(), dir);
  CHECK(r.verdict == TestVerdict::BuildFail);
  CHECK_FALSE(r.diagnostic.empty());
  r = run_tests(suite, {"void s1113_opt(int iters, float a[LEN_1D], float b[LEN_1D]) { __builtin_trap(); }", 1}, fc,
                vt_test::compiler(), dir);
  CHECK(r.verdict == TestVerdict::RuntimeCrash);
  r = run_tests(suite, {"void s1113_opt(int iters, float a[LEN_1D], float b[LEN_1D]) { for (;;) a[0] += 1; }", 1}, fc,
                vt_test::compiler(), dir, std::chrono::seconds(1));
  CHECK(r.verdict == TestVerdict::Timeout);
}

TEST_CASE("witness lines parse with their inputs") {
  auto w = parse_witnesses(
      "INPUT 3 PARAM d MIN -0.5 MAX 0.9 NEG 12\nINPUT 3 PARAM iters VALUE 2\n"
      "TRIAL 3 PARAM a[17] EXPECTED 0.25 ACTUAL 0.5\nnoise\nTRIAL x PARAM\n");
  REQUIRE(w.size() == 1);
  CHECK(w[0].trial == 3);
  CHECK(w[0].param == "a[17]");
  CHECK(w[0].expected == "0.25");
  CHECK(w[0].actual == "0.5");
  CHECK(w[0].input_summary.find("NEG 12") != std::string::npos);
  CHECK(w[0].input_summary.find("iters VALUE 2") != std::string::npos);
}

TEST_CASE("fixture drivers") {
  for (const auto& d : vt_test::drivers("valid")) {
    CAPTURE(d.filename().string());
    auto v = vt_test::validate_driver(d, std::chrono::seconds(10), vt_test::scratch("drv"));
    CHECK_MESSAGE(v.validated, v.reason.value_or(""));
  }
  for (const auto& d : vt_test::drivers("invalid")) {
    CAPTURE(d.filename().string());
    auto v = vt_test::validate_driver(d, std::chrono::seconds(2), vt_test::scratch("drv"));
    CHECK_FALSE(v.validated);
    CHECK(v.reason.has_value());
  }
}

TEST_CASE("timing harness compares a kernel with itself") {
  auto fc = vt_test::fixture_case("s1113");
  BenchConfig cfg;
  cfg.runs = 3;
  cfg.min_run_seconds = 0.005;
  cfg.lock_file = vt_test::scratch("lock") / "bench.lock";
  TestingConfig tcfg;
  auto rec = measure(fc, original_as_candidate(fc), vt_test::compiler(), cfg, resolve_input_spec(fc, tcfg),
                     vt_test::scratch("bench"));
  CHECK(rec.checksum_match);
  CHECK(rec.speedup > 0.5);
  CHECK(rec.speedup < 2.0);
  CHECK(rec.reps > 0);
  auto back = bench_record_from_json(to_json(rec));
  CHECK(back.checksum_original == rec.checksum_original);
  CHECK(back.speedup == rec.speedup);
}

TEST_CASE("geomean") {
  CHECK(geomean(std::vector<double>{2.0, 8.0}) == doctest::Approx(4.0));
  CHECK(geomean(std::vector<double>{3.0}) == doctest::Approx(3.0));
  CHECK_THROWS(geomean(std::vector<double>{}));
  CHECK_THROWS(geomean(std::vector<double>{1.0, 0.0}));
  CHECK_THROWS(geomean(std::vector<double>{1.0, -2.0}));
  CHECK(checksums_match("1.0000001", "1.0"));
  CHECK_FALSE(checksums_match("1.5", "1.0"));
}
