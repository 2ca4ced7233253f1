#include "vectrans/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "vectrans/error.hpp"
#include "vectrans/text.hpp"

namespace vectrans {

using json = nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string fmt(double v, const char* spec = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

CoverageReport build_report(const std::vector<RunOutcome>& outcomes, const std::vector<BenchRecord>& records) {
  std::map<std::string, const BenchRecord*> by_case;
  for (const auto& r : records) by_case[r.case_id] = &r;

  CoverageReport rep;
  std::vector<double> speedups;
  long long rounds_total = 0, rounds_success = 0;
  int successes = 0;
  for (const auto& o : outcomes) {
    ++rep.attempted;
    CaseRow row;
    row.case_id = o.case_id;
    row.kind = std::string(to_string(o.kind));
    row.rounds = o.rounds_used;
    row.cost = o.ledger.cost();
    row.category = o.category ? category_key(*o.category) : "Unclassified";
    row.suite_origin = o.flags.suite_origin;
    row.suite_validated = o.flags.suite_validated;
    row.tests_only = o.flags.tests_only;

    ++rep.per_category[row.category];
    ++rep.outcome_counts[row.kind];
    rounds_total += o.rounds_used;
    rep.total_cost += row.cost;
    rep.total_input_tokens += o.ledger.input_tokens;
    rep.total_output_tokens += o.ledger.output_tokens;
    rep.taxonomy.provider_failure_rounds += o.flags.provider_failure_rounds;
    rep.taxonomy.format_violation_rounds += o.flags.format_violation_rounds;

    switch (o.kind) {
      case OutcomeKind::Success: {
        const BenchRecord* rec = nullptr;
        if (auto it = by_case.find(o.case_id); it != by_case.end()) rec = it->second;
        else if (o.bench) rec = &*o.bench;
        if (rec) {
          row.checksum_match = rec->checksum_match;
          if (rec->checksum_match) {
            row.speedup = rec->speedup;
            speedups.push_back(rec->speedup);
          } else {
            row.demoted = true;
            rep.integrity_alert = true;
            rep.integrity_notes.push_back(o.case_id + ": benchmark checksums differ (" + rec->checksum_original +
                                          " vs " + rec->checksum_candidate + "); case not counted as vectorized");
          }
        }
        if (!row.demoted) {
          ++rep.vectorized;
          ++successes;
          rounds_success += o.rounds_used;
        }
        break;
      }
      case OutcomeKind::FailRoundLimit:
        ++rep.taxonomy.round_limit;
        if (o.flags.budget_exhausted) ++rep.taxonomy.budget_exhausted;
        break;
      case OutcomeKind::FailPrematureClaim: ++rep.taxonomy.premature_claim; break;
      case OutcomeKind::NoBenefitDeclared: ++rep.taxonomy.no_benefit; break;
      case OutcomeKind::SemanticEscape:
        ++rep.taxonomy.semantic_escape;
        rep.integrity_alert = true;
        rep.integrity_notes.push_back(o.case_id + ": accepted code rejected by the escape oracle");
        break;
    }
    rep.cases.push_back(std::move(row));
  }
  if (rep.attempted > 0) {
    rep.coverage = static_cast<double>(rep.vectorized) / rep.attempted;
    rep.mean_rounds = static_cast<double>(rounds_total) / rep.attempted;
  }
  if (successes > 0) rep.mean_rounds_success = static_cast<double>(rounds_success) / successes;
  rep.speedup_samples = static_cast<int>(speedups.size());
  if (!speedups.empty()) {
    rep.geomean_speedup = geomean(speedups);
  } else if (successes == 0) {
    rep.geomean_omitted_reason = "no successful case";
  } else {
    rep.geomean_omitted_reason = "no successful case was benchmarked";
  }
  return rep;
}

json to_json(const CoverageReport& r, const json& environment) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"case_id", c.case_id},
                     {"kind", c.kind},
                     {"rounds", c.rounds},
                     {"speedup", optional_json(c.speedup)},
                     {"checksum_match", c.checksum_match ? json(*c.checksum_match) : json(nullptr)},
                     {"demoted", c.demoted},
                     {"cost", c.cost},
                     {"category", c.category},
                     {"suite_origin", c.suite_origin},
                     {"suite_validated", c.suite_validated},
                     {"tests_only", c.tests_only}});
  }
  const auto& t = r.taxonomy;
  return json{{"schema_version", kReportSchemaVersion},
              {"attempted", r.attempted},
              {"vectorized", r.vectorized},
              {"coverage", r.coverage},
              {"per_category", r.per_category},
              {"outcome_counts", r.outcome_counts},
              {"failure_taxonomy",
               {{"round_limit", t.round_limit},
                {"budget_exhausted", t.budget_exhausted},
                {"premature_claim", t.premature_claim},
                {"no_benefit", t.no_benefit},
                {"semantic_escape", t.semantic_escape},
                {"provider_failure_rounds", t.provider_failure_rounds},
                {"format_violation_rounds", t.format_violation_rounds}}},
              {"geomean_speedup", optional_json(r.geomean_speedup)},
              {"geomean_omitted_reason", r.geomean_omitted_reason},
              {"speedup_samples", r.speedup_samples},
              {"mean_rounds", r.mean_rounds},
              {"mean_rounds_success", optional_json(r.mean_rounds_success)},
              {"total_cost", r.total_cost},
              {"total_input_tokens", r.total_input_tokens},
              {"total_output_tokens", r.total_output_tokens},
              {"integrity_alert", r.integrity_alert},
              {"integrity_notes", r.integrity_notes},
              {"cases", std::move(cases)},
              {"environment", environment}};
}

CoverageReport report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw SchemaMismatch("report has no schema_version");
  int version = j["schema_version"].get<int>();
  if (version != kReportSchemaVersion) {
    throw SchemaMismatch("report has schema version " + std::to_string(version) + ", this build reads " +
                         std::to_string(kReportSchemaVersion));
  }
  try {
    CoverageReport r;
    r.attempted = j.at("attempted").get<int>();
    r.vectorized = j.at("vectorized").get<int>();
    r.coverage = j.at("coverage").get<double>();
    r.per_category = j.at("per_category").get<std::map<std::string, int>>();
    r.outcome_counts = j.at("outcome_counts").get<std::map<std::string, int>>();
    const auto& t = j.at("failure_taxonomy");
    r.taxonomy.round_limit = t.at("round_limit").get<int>();
    r.taxonomy.budget_exhausted = t.at("budget_exhausted").get<int>();
    r.taxonomy.premature_claim = t.at("premature_claim").get<int>();
    r.taxonomy.no_benefit = t.at("no_benefit").get<int>();
    r.taxonomy.semantic_escape = t.at("semantic_escape").get<int>();
    r.taxonomy.provider_failure_rounds = t.at("provider_failure_rounds").get<int>();
    r.taxonomy.format_violation_rounds = t.at("format_violation_rounds").get<int>();
    r.geomean_speedup = optional_double(j.at("geomean_speedup"));
    r.geomean_omitted_reason = j.at("geomean_omitted_reason").get<std::string>();
    r.speedup_samples = j.at("speedup_samples").get<int>();
    r.mean_rounds = j.at("mean_rounds").get<double>();
    r.mean_rounds_success = optional_double(j.at("mean_rounds_success"));
    r.total_cost = j.at("total_cost").get<double>();
    r.total_input_tokens = j.at("total_input_tokens").get<long long>();
    r.total_output_tokens = j.at("total_output_tokens").get<long long>();
    r.integrity_alert = j.at("integrity_alert").get<bool>();
    r.integrity_notes = j.at("integrity_notes").get<std::vector<std::string>>();
    for (const auto& c : j.at("cases")) {
      CaseRow row;
      row.case_id = c.at("case_id").get<std::string>();
      row.kind = c.at("kind").get<std::string>();
      row.rounds = c.at("rounds").get<int>();
      row.speedup = optional_double(c.at("speedup"));
      if (!c.at("checksum_match").is_null()) row.checksum_match = c["checksum_match"].get<bool>();
      row.demoted = c.at("demoted").get<bool>();
      row.cost = c.at("cost").get<double>();
      row.category = c.at("category").get<std::string>();
      row.suite_origin = c.at("suite_origin").get<std::string>();
      row.suite_validated = c.at("suite_validated").get<bool>();
      row.tests_only = c.at("tests_only").get<bool>();
      r.cases.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("malformed report: ") + e.what());
  }
}

std::string render_text(const CoverageReport& r) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-20s %6s %9s %10s  %s\n", "case", "outcome", "rounds", "speedup", "cost",
                "category");
  out << line;
  for (const auto& c : r.cases) {
    std::string sp = c.speedup ? fmt(*c.speedup, "%.2fx") : (c.demoted ? "MISMATCH" : "-");
    std::snprintf(line, sizeof line, "%-22s %-20s %6d %9s %10s  %s\n", c.case_id.c_str(), c.kind.c_str(), c.rounds,
                  sp.c_str(), ("$" + fmt(c.cost, "%.5f")).c_str(), c.category.c_str());
    out << line;
  }
  out << "\ncoverage: " << r.vectorized << '/' << r.attempted << " = " << fmt(r.coverage) << '\n';
  if (r.geomean_speedup) {
    out << "geomean speedup: " << fmt(*r.geomean_speedup) << "x over " << r.speedup_samples << " case(s)\n";
  } else {
    out << "geomean speedup: omitted (" << r.geomean_omitted_reason << ")\n";
  }
  out << "mean rounds: " << fmt(r.mean_rounds, "%.2f");
  if (r.mean_rounds_success) out << " (successes " << fmt(*r.mean_rounds_success, "%.2f") << ')';
  out << '\n';
  out << "total cost: $" << fmt(r.total_cost, "%.6f") << " (" << r.total_input_tokens << " in / "
      << r.total_output_tokens << " out tokens)\n";
  const auto& t = r.taxonomy;
  out << "failures: round limit " << t.round_limit << " (budget " << t.budget_exhausted << "), premature claim "
      << t.premature_claim << ", no benefit " << t.no_benefit << ", semantic escape " << t.semantic_escape << '\n';
  out << "wasted rounds: provider failures " << t.provider_failure_rounds << ", format violations "
      << t.format_violation_rounds << '\n';
  if (!r.per_category.empty()) {
    out << "categories:";
    for (const auto& [k, v] : r.per_category) out << ' ' << k << '=' << v;
    out << '\n';
  }
  if (r.integrity_alert) {
    out << "INTEGRITY ALERT:\n";
    for (const auto& n : r.integrity_notes) out << "  " << n << '\n';
  }
  return out.str();
}

void emit_report(const CoverageReport& report, const std::filesystem::path& dir, const json& environment) {
  write_file(dir / "report.json", to_json(report, environment).dump(2) + "\n");
  write_file(dir / "report.txt", render_text(report));
}

std::vector<RunOutcome> load_archive(const std::filesystem::path& archive_dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(archive_dir, ec)) throw IoError("not a directory: " + archive_dir.string());
  std::vector<std::filesystem::path> files;
  const auto cases = archive_dir / "cases";
  if (std::filesystem::is_directory(cases, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(cases)) {
      auto f = entry.path() / "outcome.json";
      if (std::filesystem::is_regular_file(f, ec)) files.push_back(f);
    }
  }
  if (files.empty()) throw SchemaMismatch("no archived outcomes under " + archive_dir.string());
  std::sort(files.begin(), files.end());
  std::vector<RunOutcome> out;
  for (const auto& f : files) {
    json j;
    try {
      j = json::parse(read_file(f));
    } catch (const json::parse_error& e) {
      throw SchemaMismatch(f.string() + ": " + e.what());
    }
    try {
      out.push_back(outcome_from_json(j));
    } catch (const SchemaMismatch& e) {
      throw SchemaMismatch(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vectrans
