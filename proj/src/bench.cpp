#include "vectrans/bench.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "vectrans/error.hpp"
#include "vectrans/process.hpp"
#include "vectrans/text.hpp"

namespace vectrans {
namespace {

std::mutex g_bench_mutex;

// Machine-wide exclusion on top of the in-process mutex.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    if (path.empty()) return;
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0666);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

struct RunSample {
  double seconds = 0.0;
  std::string checksum;
};

RunSample run_once(const std::filesystem::path& exe, const char* side, long reps, const BenchConfig& cfg) {
  ProcessOptions opts;
  opts.cwd = exe.parent_path();
  opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(cfg.run_timeout);
  ProcessResult r = run_process({exe.string(), side, std::to_string(reps)}, opts);
  if (r.timed_out) throw BenchError(std::string("timing run (") + side + ") timed out");
  if (!r.ok()) {
    throw BenchError(std::string("timing run (") + side + ") failed with status " + std::to_string(r.exit_code) +
                     " signal " + std::to_string(r.term_signal) + ": " + r.err.substr(0, 500));
  }
  RunSample s;
  bool have_time = false;
  for (std::string_view line : split_lines(r.out)) {
    std::istringstream in{std::string(trim(line))};
    std::string tag, value;
    in >> tag >> value;
    if (tag == "TIME") {
      s.seconds = std::stod(value);
      have_time = true;
    } else if (tag == "CHECKSUM") {
      s.checksum = value;
    }
  }
  if (!have_time || s.checksum.empty()) throw BenchError("timing program printed no TIME/CHECKSUM lines");
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double geomean(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("geomean of an empty list");
  double acc = 0.0;
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NonPositiveValue("geomean needs positive finite values");
    acc += std::log(v);
  }
  return std::exp(acc / static_cast<double>(values.size()));
}

HostInfo detect_host() {
  HostInfo h{"unknown", "scalar"};
  std::string text;
  try {
    text = read_file("/proc/cpuinfo");
  } catch (const IoError&) {
    return h;
  }
  std::string flags;
  for (std::string_view line : split_lines(text)) {
    auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    std::string_view key = trim(line.substr(0, colon));
    std::string_view value = trim(line.substr(colon + 1));
    if ((key == "model name" || key == "Model" || key == "CPU part") && h.cpu == "unknown") h.cpu = value;
    if ((key == "flags" || key == "Features") && flags.empty()) flags = " " + std::string(value) + " ";
  }
  for (auto [flag, name] : {std::pair{" avx512f ", "avx512"}, {" avx2 ", "avx2"}, {" avx ", "avx"}, {" sve ", "sve"},
                            {" asimd ", "neon"}, {" sse4_2 ", "sse4.2"}, {" sse2 ", "sse2"}}) {
    if (flags.find(flag) != std::string::npos) {
      h.isa = name;
      break;
    }
  }
  return h;
}

bool checksums_match(std::string_view a, std::string_view b) {
  if (a == b) return true;
  double x = 0.0, y = 0.0;
  try {
    x = std::stod(std::string(a));
    y = std::stod(std::string(b));
  } catch (const std::exception&) {
    return false;
  }
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  double d = std::fabs(x - y);
  return d <= 1e-6 || d <= 1e-4 * std::max(std::fabs(x), std::fabs(y));
}

nlohmann::json to_json(const BenchRecord& r) {
  return nlohmann::json{{"case_id", r.case_id},
                        {"t_original", r.t_original},
                        {"t_candidate", r.t_candidate},
                        {"speedup", r.speedup},
                        {"checksum_match", r.checksum_match},
                        {"checksum_original", r.checksum_original},
                        {"checksum_candidate", r.checksum_candidate},
                        {"reps", r.reps},
                        {"host", {{"cpu", r.host.cpu}, {"isa", r.host.isa}}},
                        {"compiler", r.compiler_stamp}};
}

BenchRecord bench_record_from_json(const nlohmann::json& j) {
  BenchRecord r;
  r.case_id = j.at("case_id").get<std::string>();
  r.t_original = j.at("t_original").get<double>();
  r.t_candidate = j.at("t_candidate").get<double>();
  r.speedup = j.at("speedup").get<double>();
  r.checksum_match = j.at("checksum_match").get<bool>();
  r.checksum_original = j.value("checksum_original", "");
  r.checksum_candidate = j.value("checksum_candidate", "");
  r.reps = j.value("reps", 0L);
  if (j.contains("host")) {
    r.host.cpu = j["host"].value("cpu", "");
    r.host.isa = j["host"].value("isa", "");
  }
  r.compiler_stamp = j.value("compiler", "");
  return r;
}

BenchRecord measure_slot(const FunctionCase& fc, const std::string& slot_fn, const Compiler& compiler,
                         const BenchConfig& cfg, const InputSpec& inputs, const std::filesystem::path& scratch) {
  if (cfg.runs < 1) throw ConfigError("bench.runs must be at least 1");
  CompileResult build = compiler.build_executable(timing_harness(fc, slot_fn, inputs), scratch, "timing");
  if (!build.ok()) throw BenchError("timing program does not build: " + build.diagnostic.substr(0, 2000));
  const auto exe = *build.artifact_path;

  std::lock_guard process_lock(g_bench_mutex);
  FileLock machine_lock(cfg.lock_file);

  RunSample probe = run_once(exe, "orig", 1, cfg);
  long reps = 1;
  if (probe.seconds < cfg.min_run_seconds) {
    double per = std::max(probe.seconds, 1e-7);
    reps = static_cast<long>(std::ceil(cfg.min_run_seconds / per));
    reps = std::clamp(reps, 1L, cfg.max_reps);
  }
  for (int i = 0; i < cfg.warmups; ++i) {
    run_once(exe, "orig", reps, cfg);
    run_once(exe, "opt", reps, cfg);
  }
  std::vector<double> orig, opt;
  std::string sum_orig, sum_opt;
  for (int i = 0; i < cfg.runs; ++i) {
    RunSample a = run_once(exe, "orig", reps, cfg);
    RunSample b = run_once(exe, "opt", reps, cfg);
    orig.push_back(a.seconds / static_cast<double>(reps));
    opt.push_back(b.seconds / static_cast<double>(reps));
    sum_orig = a.checksum;
    sum_opt = b.checksum;
  }

  BenchRecord rec;
  rec.case_id = fc.id;
  rec.t_original = median(orig);
  rec.t_candidate = median(opt);
  rec.speedup = rec.t_original / std::max(rec.t_candidate, 1e-12);
  rec.checksum_original = sum_orig;
  rec.checksum_candidate = sum_opt;
  rec.checksum_match = checksums_match(sum_orig, sum_opt);
  rec.reps = reps;
  rec.host = detect_host();
  rec.compiler_stamp = compiler.stamp();
  return rec;
}

BenchRecord measure(const FunctionCase& fc, const CandidateCode& final_code, const Compiler& compiler,
                    const BenchConfig& cfg, const InputSpec& inputs, const std::filesystem::path& scratch) {
  return measure_slot(fc, rename_to_opt(final_code.text, fc.signature.name), compiler, cfg, inputs, scratch);
}

}  // namespace vectrans
