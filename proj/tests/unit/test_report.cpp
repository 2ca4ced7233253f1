#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vectrans/error.hpp"
#include "vectrans/report.hpp"

using namespace vectrans;

namespace {

RunOutcome outcome(std::string id, OutcomeKind kind, int rounds = 1, std::optional<double> speedup = std::nullopt,
                   bool checksum_match = true) {
  RunOutcome o;
  o.case_id = std::move(id);
  o.kind = kind;
  o.rounds_used = rounds;
  o.ledger = {1000L * rounds, 100L * rounds, 0.27, 1.10};
  if (speedup) {
    BenchRecord r;
    r.case_id = o.case_id;
    r.speedup = *speedup;
    r.checksum_match = checksum_match;
    r.checksum_original = "1";
    r.checksum_candidate = checksum_match ? "1" : "2";
    o.bench = r;
    o.speedup = *speedup;
  }
  return o;
}

// Independent reference: n-th root of the product in long double.
long double root_of_product(const std::vector<double>& v) {
  long double p = 1.0L;
  for (double x : v) p *= x;
  return std::pow(p, 1.0L / v.size());
}

}  // namespace

TEST_CASE("geomean examples") {
  CHECK(geomean(std::vector<double>{1.0, 4.0}) == doctest::Approx(2.0));
  CHECK(geomean(std::vector<double>{2.0, 2.0, 2.0}) == doctest::Approx(2.0));
  CHECK(geomean(std::vector<double>{0.5, 2.0}) == doctest::Approx(1.0));
  CHECK(geomean(std::vector<double>{1.5, 3.0, 6.0}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(geomean(std::vector<double>{}), EmptyInput);
  CHECK_THROWS_AS(geomean(std::vector<double>{2.0, 0.0}), NonPositiveValue);
  CHECK_THROWS_AS(geomean(std::vector<double>{2.0, NAN}), NonPositiveValue);
}

TEST_CASE("geomean properties on random inputs") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> val(0.05, 20.0);
  std::uniform_int_distribution<int> len(1, 12);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = val(rng);
    double g = geomean(v);
    CHECK(std::fabs(g - static_cast<double>(root_of_product(v))) <= 1e-9 * g);
    CHECK(g >= *std::min_element(v.begin(), v.end()) * (1 - 1e-12));
    CHECK(g <= *std::max_element(v.begin(), v.end()) * (1 + 1e-12));
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(geomean(shuffled) == doctest::Approx(g).epsilon(1e-12));
    auto scaled = v;
    for (auto& x : scaled) x *= 3.0;
    CHECK(geomean(scaled) == doctest::Approx(3.0 * g).epsilon(1e-12));
  }
}

TEST_CASE("coverage counts successes only") {
  std::vector<RunOutcome> all;
  for (int i = 0; i < 51; ++i) {
    all.push_back(outcome("c" + std::to_string(100 + i), i < 24 ? OutcomeKind::Success : OutcomeKind::FailRoundLimit,
                          i < 24 ? 2 : 20));
  }
  auto rep = build_report(all);
  CHECK(rep.attempted == 51);
  CHECK(rep.vectorized == 24);
  CHECK(rep.coverage == doctest::Approx(24.0 / 51.0));
  CHECK(rep.taxonomy.round_limit == 27);
  CHECK(rep.mean_rounds_success == doctest::Approx(2.0));
  CHECK_FALSE(rep.geomean_speedup);
  CHECK(rep.geomean_omitted_reason == "no successful case was benchmarked");
}

TEST_CASE("no success means no geomean") {
  auto rep = build_report({outcome("a", OutcomeKind::FailPrematureClaim), outcome("b", OutcomeKind::NoBenefitDeclared)});
  CHECK(rep.vectorized == 0);
  CHECK_FALSE(rep.geomean_speedup);
  CHECK(rep.geomean_omitted_reason == "no successful case");
  CHECK_FALSE(rep.mean_rounds_success);
  CHECK(rep.taxonomy.premature_claim == 1);
  CHECK(rep.taxonomy.no_benefit == 1);
  CHECK(render_text(rep).find("no successful case") != std::string::npos);
}

TEST_CASE("cost is additive over cases") {
  std::vector<RunOutcome> all{outcome("a", OutcomeKind::Success, 3), outcome("b", OutcomeKind::FailRoundLimit, 20),
                              outcome("c", OutcomeKind::NoBenefitDeclared, 2)};
  double sum = 0;
  for (const auto& o : all) sum += o.ledger.cost();
  auto rep = build_report(all);
  CHECK(rep.total_cost == doctest::Approx(sum).epsilon(1e-12));
  CHECK(rep.total_input_tokens == 25000);
  CHECK(rep.total_output_tokens == 2500);
  CostLedger merged{25000, 2500, 0.27, 1.10};
  CHECK(std::fabs(merged.cost() - sum) < 1e-12);
}

TEST_CASE("checksum mismatch demotes a success") {
  auto rep = build_report({outcome("a", OutcomeKind::Success, 1, 2.0), outcome("b", OutcomeKind::Success, 1, 8.0),
                           outcome("c", OutcomeKind::Success, 1, 50.0, false)});
  CHECK(rep.vectorized == 2);
  CHECK(rep.speedup_samples == 2);
  REQUIRE(rep.geomean_speedup);
  CHECK(*rep.geomean_speedup == doctest::Approx(4.0));
  CHECK(rep.integrity_alert);
  CHECK(rep.cases.at(2).demoted);
  CHECK_FALSE(rep.cases.at(2).speedup);

  BenchRecord fixed;
  fixed.case_id = "c";
  fixed.speedup = 4.0;
  fixed.checksum_match = true;
  auto again = build_report({outcome("c", OutcomeKind::Success, 1, 50.0, false)}, {fixed});
  CHECK(again.vectorized == 1);
  CHECK_FALSE(again.integrity_alert);
  CHECK(*again.geomean_speedup == doctest::Approx(4.0));
}

TEST_CASE("semantic escapes raise the alert") {
  auto rep = build_report({outcome("a", OutcomeKind::SemanticEscape)});
  CHECK(rep.integrity_alert);
  CHECK(rep.vectorized == 0);
  CHECK(rep.taxonomy.semantic_escape == 1);
}

TEST_CASE("report JSON round trip and schema check") {
  auto o = outcome("a", OutcomeKind::Success, 1, 2.5);
  o.category = NonVectorizableCategory{CategoryTag::UnknownTripCount, ""};
  auto b = outcome("b", OutcomeKind::FailRoundLimit, 20);
  b.flags.budget_exhausted = true;
  b.flags.format_violation_rounds = 7;
  auto rep = build_report({o, b});
  auto j = to_json(rep, {{"host", "x"}});
  CHECK(j.at("environment").at("host") == "x");
  CHECK(report_from_json(j) == rep);
  j["schema_version"] = kReportSchemaVersion + 1;
  CHECK_THROWS_AS(report_from_json(j), SchemaMismatch);
  CHECK_THROWS_AS(report_from_json(nlohmann::json::array()), SchemaMismatch);
}

TEST_CASE("archives") {
  auto dir = vt_test::scratch("archive");
  CHECK_THROWS_AS(load_archive(dir), SchemaMismatch);
  for (const char* id : {"zeta", "alpha"}) {
    std::filesystem::create_directories(dir / "cases" / id);
    write_file(dir / "cases" / id / "outcome.json", to_json(outcome(id, OutcomeKind::Success)).dump());
  }
  auto loaded = load_archive(dir);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].case_id == "alpha");
  emit_report(build_report(loaded), dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "report.txt"));
  CHECK(report_from_json(vt_test::read_json(dir / "report.json")).vectorized == 2);
}
