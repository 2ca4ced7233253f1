#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vectrans/candidate.hpp"
#include "vectrans/compiler.hpp"
#include "vectrans/corpus.hpp"
#include "vectrans/harness.hpp"

namespace vectrans {

/// exp(mean(log v)). Throws EmptyInput on an empty list and
/// NonPositiveValue when any value is <= 0 or not finite.
double geomean(std::span<const double> values);

struct HostInfo {
  std::string cpu;
  std::string isa;
  bool operator==(const HostInfo&) const = default;
};

/// CPU model and the widest SIMD extension listed in /proc/cpuinfo.
HostInfo detect_host();

struct BenchConfig {
  int runs = 5;
  int warmups = 1;
  /// Repetitions are scaled so one timed run lasts at least this long.
  double min_run_seconds = 0.02;
  long max_reps = 100000000;
  std::filesystem::path lock_file = "/tmp/vectrans-bench.lock";
  std::chrono::seconds run_timeout{120};
};

struct BenchRecord {
  std::string case_id;
  double t_original = 0.0;   ///< median seconds per call
  double t_candidate = 0.0;  ///< median seconds per call
  double speedup = 0.0;
  bool checksum_match = false;
  std::string checksum_original;
  std::string checksum_candidate;
  long reps = 0;
  HostInfo host;
  std::string compiler_stamp;
};

nlohmann::json to_json(const BenchRecord& r);
BenchRecord bench_record_from_json(const nlohmann::json& j);

/// Checksums printed by the timing harness agree within the float policy.
bool checksums_match(std::string_view a, std::string_view b);

/// Times the original against `final_code` (renamed into the `_opt` slot)
/// with one timing program: warmups, then `runs` interleaved timed runs per
/// side. Only one measurement runs at a time on the machine. Throws
/// BenchError when the program does not build or crashes.
BenchRecord measure(const FunctionCase& fc, const CandidateCode& final_code, const Compiler& compiler,
                    const BenchConfig& cfg, const InputSpec& inputs, const std::filesystem::path& scratch);

/// Same as measure() with an already renamed `_opt` function.
BenchRecord measure_slot(const FunctionCase& fc, const std::string& slot_fn, const Compiler& compiler,
                         const BenchConfig& cfg, const InputSpec& inputs, const std::filesystem::path& scratch);

}  // namespace vectrans
