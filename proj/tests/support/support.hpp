#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "vectrans/candidate.hpp"
#include "vectrans/compiler.hpp"
#include "vectrans/llm.hpp"
#include "vectrans/corpus.hpp"
#include "vectrans/testing.hpp"
#include "vectrans/text.hpp"

namespace vt_test {

inline std::filesystem::path fixtures() { return VECTRANS_FIXTURES; }
inline std::filesystem::path oracles() { return VECTRANS_ORACLES; }

// Fresh directory under the build tree, unique per process and call.
inline std::filesystem::path scratch(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::path(VECTRANS_SCRATCH) /
             (name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline const vectrans::Compiler& compiler() {
  static const vectrans::Compiler c{vectrans::CompilerConfig{}};
  return c;
}

inline vectrans::FunctionCase fixture_case(const std::string& id) {
  auto corpus = vectrans::parse_corpus(fixtures() / "corpus" / "manifest.json", {id});
  return corpus.cases.at(0);
}

inline vectrans::FunctionCase kernel_case(const std::string& id) {
  auto corpus = vectrans::parse_corpus(fixtures() / "suites" / "kernels.c", {id});
  return corpus.cases.at(0);
}

// Differences between parse_remarks on the recorded corpus and the frozen
// oracle output; empty when every record is reconstructed.
inline std::vector<std::string> remark_mismatches(const vectrans::VectorizationReport& rep,
                                                  const nlohmann::json& expected) {
  std::vector<std::string> out;
  const auto& loops = expected.at("loops");
  if (rep.loops.size() != loops.size()) {
    out.push_back("record count " + std::to_string(rep.loops.size()) + " vs " + std::to_string(loops.size()));
  }
  for (const auto& e : loops) {
    vectrans::SourceLocation loc{e.at("line").get<int>(), e.at("column").get<int>()};
    std::string where = std::to_string(loc.line) + ":" + std::to_string(loc.column);
    const auto* rec = rep.find(loc);
    if (rec == nullptr) {
      out.push_back(where + " missing");
      continue;
    }
    if (rec->vectorized != e.at("vectorized").get<bool>()) out.push_back(where + " vectorized flag");
    std::string want = e.at("reason").is_null() ? "" : e.at("reason").get<std::string>();
    if (rec->reason.value_or("") != want) out.push_back(where + " reason '" + rec->reason.value_or("") + "'");
    std::vector<std::string> got;
    if (rec->detail) {
      std::string_view d = *rec->detail;
      for (size_t pos = 0;;) {
        size_t sep = d.find("; ", pos);
        got.emplace_back(d.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos));
        if (sep == std::string_view::npos) break;
        pos = sep + 2;
      }
    }
    std::sort(got.begin(), got.end());
    if (got != e.at("details").get<std::vector<std::string>>()) out.push_back(where + " details");
  }
  if (rep.leftovers.size() != expected.at("leftovers").size()) out.push_back("leftover count");
  long total = rep.consumed_lines + static_cast<long>(rep.leftovers.size());
  if (total != expected.at("remark_lines").get<long>()) out.push_back("remark lines do not reconcile");
  return out;
}

// Kernel a fixture driver exercises, from its file name.
inline std::string driver_kernel(const std::filesystem::path& driver) {
  std::string stem = driver.stem().string();
  if (stem.rfind("count_neg", 0) == 0) return "count_neg";
  if (stem.rfind("dot", 0) == 0) return "dot";
  return "axpy";
}

inline vectrans::SuiteValidation validate_driver(const std::filesystem::path& driver, std::chrono::seconds timeout,
                                                 const std::filesystem::path& dir) {
  auto fc = kernel_case(driver_kernel(driver));
  vectrans::TestingConfig cfg;
  auto suite = vectrans::suite_from_driver(fc, vectrans::read_file(driver), vectrans::resolve_input_spec(fc, cfg),
                                           vectrans::SuiteOrigin::Fixture);
  return vectrans::validate_suite(suite, fc, compiler(), dir, timeout);
}

inline std::vector<std::filesystem::path> drivers(const std::string& sub) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixtures() / "suites" / sub)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// The n-th code response recorded for `case_id` in the fixture corpus transcript.
inline vectrans::CandidateCode transcript_code(const std::string& case_id, int n = 0) {
  auto entries = vectrans::load_transcript(fixtures() / "transcripts" / "fixture_corpus.transcript.json");
  for (const auto& e : entries) {
    if (e.case_id != case_id || e.expected_prompt_kind != vectrans::PromptKind::Refine) continue;
    if (e.response_text.find(vectrans::kBeginMarker) == std::string::npos) continue;
    if (n-- == 0) return vectrans::extract_candidate(e.response_text);
  }
  throw std::out_of_range("no recorded code for " + case_id);
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(vectrans::read_file(p)); }

}  // namespace vt_test
