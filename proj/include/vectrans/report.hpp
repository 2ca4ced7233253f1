#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vectrans/bench.hpp"
#include "vectrans/engine.hpp"

namespace vectrans {

inline constexpr int kReportSchemaVersion = 1;

struct CaseRow {
  std::string case_id;
  std::string kind;
  int rounds = 0;
  std::optional<double> speedup;
  std::optional<bool> checksum_match;
  bool demoted = false;  ///< Success whose benchmark checksums disagreed
  double cost = 0.0;
  std::string category;
  std::string suite_origin;
  bool suite_validated = false;
  bool tests_only = false;
  bool operator==(const CaseRow&) const = default;
};

struct FailureTaxonomy {
  int round_limit = 0;
  int budget_exhausted = 0;
  int premature_claim = 0;
  int no_benefit = 0;
  int semantic_escape = 0;
  int provider_failure_rounds = 0;
  int format_violation_rounds = 0;
  bool operator==(const FailureTaxonomy&) const = default;
};

struct CoverageReport {
  int attempted = 0;
  int vectorized = 0;
  double coverage = 0.0;
  std::map<std::string, int> per_category;
  std::map<std::string, int> outcome_counts;
  FailureTaxonomy taxonomy;
  std::optional<double> geomean_speedup;
  std::string geomean_omitted_reason;
  int speedup_samples = 0;
  double mean_rounds = 0.0;
  std::optional<double> mean_rounds_success;
  double total_cost = 0.0;
  long long total_input_tokens = 0;
  long long total_output_tokens = 0;
  bool integrity_alert = false;
  std::vector<std::string> integrity_notes;
  std::vector<CaseRow> cases;
  bool operator==(const CoverageReport&) const = default;
};

/// Aggregates outcomes. A record in `records` replaces the benchmark result
/// archived with the outcome of the same case.
CoverageReport build_report(const std::vector<RunOutcome>& outcomes, const std::vector<BenchRecord>& records = {});

/// Machine-readable form. `environment` (host, compiler, paths) is stored
/// under its own key so comparisons can drop it.
nlohmann::json to_json(const CoverageReport& report, const nlohmann::json& environment = nlohmann::json::object());
/// Throws SchemaMismatch on a different schema version or malformed input.
CoverageReport report_from_json(const nlohmann::json& j);

std::string render_text(const CoverageReport& report);

/// Writes `report.json` and `report.txt` into `dir`. Throws IoError.
void emit_report(const CoverageReport& report, const std::filesystem::path& dir,
                 const nlohmann::json& environment = nlohmann::json::object());

/// Every `cases/<id>/outcome.json` under `archive_dir`, ordered by case id.
/// Throws SchemaMismatch when there is none.
std::vector<RunOutcome> load_archive(const std::filesystem::path& archive_dir);

}  // namespace vectrans
