#include "vectrans/compiler.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "vectrans/error.hpp"
#include "vectrans/process.hpp"
#include "vectrans/text.hpp"

namespace vectrans {
namespace {

constexpr std::string_view kRemarkTag = ": remark: ";
constexpr std::string_view kNotVectorized = "loop not vectorized";

enum class RemarkPass { Passed, Analysis, Missed };

struct RemarkLine {
  SourceLocation location;
  RemarkPass pass = RemarkPass::Analysis;
  std::string message;
};

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Returns false for lines that are not loop-vectorize remarks at all;
// `malformed` is set when the line carries the loop-vectorize tag but its
// location prefix does not parse.
bool split_remark(std::string_view line, RemarkLine& out, bool& malformed) {
  malformed = false;
  line = trim(line);
  static constexpr std::pair<std::string_view, RemarkPass> kTags[] = {
      {" [-Rpass=loop-vectorize]", RemarkPass::Passed},
      {" [-Rpass-analysis=loop-vectorize]", RemarkPass::Analysis},
      {" [-Rpass-missed=loop-vectorize]", RemarkPass::Missed},
  };
  bool tagged = false;
  for (auto [tag, pass] : kTags) {
    if (line.ends_with(tag)) {
      out.pass = pass;
      line.remove_suffix(tag.size());
      tagged = true;
      break;
    }
  }
  if (!tagged) return false;

  size_t at = line.find(kRemarkTag);
  if (at == std::string_view::npos) {
    malformed = true;
    return true;
  }
  out.message = std::string(trim(line.substr(at + kRemarkTag.size())));
  std::string_view head = line.substr(0, at);
  size_t c2 = head.rfind(':');
  size_t c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos : head.rfind(':', c2 - 1);
  if (c1 == std::string_view::npos || !parse_int(head.substr(c1 + 1, c2 - c1 - 1), out.location.line) ||
      !parse_int(head.substr(c2 + 1), out.location.column)) {
    malformed = true;
  }
  return true;
}

void append_detail(LoopRecord& rec, std::string_view text) {
  if (text.empty()) return;
  if (!rec.detail) {
    rec.detail = std::string(text);
    return;
  }
  // Clang repeats identical analysis remarks for the same loop.
  std::string_view existing = *rec.detail;
  for (size_t pos = 0;;) {
    size_t sep = existing.find("; ", pos);
    if (existing.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos) == text) return;
    if (sep == std::string_view::npos) break;
    pos = sep + 2;
  }
  *rec.detail += "; ";
  *rec.detail += text;
}

std::string strip_not_vectorized(std::string_view message) {
  std::string_view rest = message.substr(kNotVectorized.size());
  if (rest.starts_with(":")) rest.remove_prefix(1);
  rest = trim(rest);
  return rest.empty() ? std::string(kNotVectorized) : std::string(rest);
}

std::string first_line(std::string_view s) {
  auto lines = split_lines(s);
  return lines.empty() ? std::string() : std::string(trim(lines.front()));
}

}  // namespace

std::vector<std::string> profile_flags(FlagsProfile profile) {
  switch (profile) {
    case FlagsProfile::Diagnose:
      return {"-O3", "-ffast-math", "-Rpass=loop-vectorize", "-Rpass-analysis=loop-vectorize"};
    case FlagsProfile::Bench:
      return {"-O3", "-ffast-math"};
    case FlagsProfile::EmitIr:
      return {"-O1", "-fno-vectorize", "-fno-slp-vectorize"};
  }
  return {};
}

const LoopRecord* VectorizationReport::find(SourceLocation loc) const {
  auto it = std::find_if(loops.begin(), loops.end(), [&](const LoopRecord& r) { return r.location == loc; });
  return it == loops.end() ? nullptr : &*it;
}

int VectorizationReport::vectorized_count() const {
  return static_cast<int>(std::count_if(loops.begin(), loops.end(), [](const LoopRecord& r) { return r.vectorized; }));
}

VectorizationReport parse_remarks(std::string_view remarks_raw) {
  VectorizationReport report;
  std::map<SourceLocation, size_t> index;
  std::vector<RemarkLine> details;

  auto record_at = [&](SourceLocation loc) -> LoopRecord& {
    auto [it, inserted] = index.try_emplace(loc, report.loops.size());
    if (inserted) report.loops.push_back(LoopRecord{loc, false, std::nullopt, std::nullopt});
    return report.loops[it->second];
  };

  for (std::string_view line : split_lines(remarks_raw)) {
    RemarkLine rl;
    bool malformed = false;
    if (!split_remark(line, rl, malformed)) continue;
    if (malformed) {
      report.leftovers.emplace_back(trim(line));
      continue;
    }
    const std::string& msg = rl.message;

    if (rl.pass == RemarkPass::Passed && msg.starts_with("vectorized loop")) {
      LoopRecord& rec = record_at(rl.location);
      if (rec.reason) {
        append_detail(rec, *rec.reason);
        rec.reason.reset();
      }
      rec.vectorized = true;
      std::string_view info = trim(std::string_view(msg).substr(std::string_view("vectorized loop").size()));
      if (info.starts_with("(") && info.ends_with(")")) info = info.substr(1, info.size() - 2);
      append_detail(rec, info);
      ++report.consumed_lines;
      continue;
    }

    bool failure = false;
    std::string reason;
    if (rl.pass == RemarkPass::Passed && msg.starts_with("interleaved loop")) {
      failure = true;
      reason = msg;
    } else if (msg.starts_with(kNotVectorized)) {
      failure = true;
      reason = strip_not_vectorized(msg);
    } else if (rl.pass == RemarkPass::Missed && contains(msg, "vectorization is not beneficial")) {
      failure = true;
      reason = msg;
    } else if (rl.pass == RemarkPass::Passed) {
      report.leftovers.emplace_back(trim(line));
      continue;
    }

    if (!failure) {
      details.push_back(std::move(rl));
      continue;
    }
    LoopRecord& rec = record_at(rl.location);
    ++report.consumed_lines;
    if (rec.vectorized) {
      append_detail(rec, reason);
    } else if (!rec.reason || (*rec.reason == kNotVectorized && reason != kNotVectorized)) {
      // A bare -Rpass-missed "loop not vectorized" yields to a specific reason.
      rec.reason = reason;
    } else if (reason != kNotVectorized && reason != *rec.reason) {
      append_detail(rec, reason);
    }
  }

  // Analysis details attach to the record sharing their location.
  for (const auto& d : details) {
    auto it = index.find(d.location);
    if (it == index.end()) {
      std::ostringstream orphan;
      orphan << d.location.line << ':' << d.location.column << ": remark: " << d.message;
      report.leftovers.push_back(orphan.str());
      continue;
    }
    append_detail(report.loops[it->second], d.message);
    ++report.consumed_lines;
  }
  return report;
}

bool is_fully_vectorized(const VectorizationReport& report, std::span<const SourceLocation> selection) {
  if (report.loops.empty()) return false;
  if (selection.empty()) {
    return std::all_of(report.loops.begin(), report.loops.end(), [](const LoopRecord& r) { return r.vectorized; });
  }
  for (const auto& loc : selection) {
    const LoopRecord* rec = report.find(loc);
    if (rec == nullptr || !rec->vectorized) return false;
  }
  return true;
}

std::string render_report(const VectorizationReport& report) {
  std::ostringstream out;
  if (report.loops.empty()) {
    out << "No loop-vectorize remarks were emitted: the compiler vectorized no loop.\n";
    return out.str();
  }
  for (const auto& rec : report.loops) {
    out << "- loop at line " << rec.location.line << ", column " << rec.location.column << ": ";
    if (rec.vectorized) {
      out << "vectorized";
      if (rec.detail) out << " (" << *rec.detail << ")";
    } else {
      out << "NOT vectorized. Reason: " << rec.reason.value_or("unknown");
      if (rec.detail) out << ". Analysis: " << *rec.detail;
    }
    out << '\n';
  }
  out << "Summary: " << report.vectorized_count() << " of " << report.loops.size()
      << " loops vectorized; fully vectorized: " << (is_fully_vectorized(report) ? "yes" : "no") << '\n';
  return out.str();
}

Compiler::Compiler(CompilerConfig config) : config_(std::move(config)) {
  auto resolved = find_executable(config_.executable);
  if (!resolved) throw ToolMissing("compiler not found: " + config_.executable);
  executable_ = *resolved;
  ProcessOptions opts;
  opts.timeout = std::chrono::seconds(30);
  ProcessResult r = run_process({executable_.string(), "--version"}, opts);
  if (!r.ok()) throw ToolMissing("compiler does not answer --version: " + executable_.string());
  version_ = first_line(r.out);
  if (!config_.version_pin.empty() && !contains(r.out, config_.version_pin)) {
    throw ConfigError("compiler version '" + version_ + "' does not match pin '" + config_.version_pin + "'");
  }
}

std::string Compiler::stamp() const { return executable_.string() + " | " + version_; }

std::vector<std::string> Compiler::profile_args(FlagsProfile profile) const {
  if (profile == FlagsProfile::EmitIr && !config_.emit_ir_flags.empty()) return config_.emit_ir_flags;
  return profile_flags(profile);
}

CompileResult Compiler::compile(std::string_view source, FlagsProfile profile, const std::filesystem::path& scratch,
                                std::string_view stem, std::span<const std::string> extra_flags) const {
  std::filesystem::create_directories(scratch);
  const std::string src_name = std::string(stem) + ".c";
  write_file(scratch / src_name, source);

  std::vector<std::string> argv{executable_.string()};
  for (auto& f : profile_args(profile)) argv.push_back(std::move(f));
  argv.insert(argv.end(), extra_flags.begin(), extra_flags.end());
  std::string artifact;
  if (profile == FlagsProfile::EmitIr) {
    artifact = std::string(stem) + ".ll";
    argv.insert(argv.end(), {"-S", "-emit-llvm", src_name, "-o", artifact});
  } else {
    artifact = std::string(stem) + ".o";
    argv.insert(argv.end(), {"-c", src_name, "-o", artifact});
  }
  return invoke(std::move(argv), scratch, scratch / artifact);
}

CompileResult Compiler::build_executable(std::string_view source, const std::filesystem::path& scratch,
                                         std::string_view stem, std::span<const std::string> extra_flags) const {
  std::filesystem::create_directories(scratch);
  const std::string src_name = std::string(stem) + ".c";
  write_file(scratch / src_name, source);
  std::vector<std::string> argv{executable_.string()};
  for (auto& f : profile_args(FlagsProfile::Bench)) argv.push_back(std::move(f));
  argv.insert(argv.end(), extra_flags.begin(), extra_flags.end());
  argv.insert(argv.end(), {src_name, "-o", std::string(stem), "-lm"});
  return invoke(std::move(argv), scratch, scratch / std::string(stem));
}

CompileResult Compiler::invoke(std::vector<std::string> argv, const std::filesystem::path& scratch,
                               std::filesystem::path artifact) const {
  ProcessOptions opts;
  opts.cwd = scratch;
  opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(config_.timeout);
  ProcessResult r = run_process(argv, opts);
  if (r.timed_out) {
    throw TimeoutError("compile exceeded " + std::to_string(config_.timeout.count()) + " s: " + quote_command(argv));
  }
  CompileResult result;
  result.command_line = std::move(argv);
  result.remarks_raw = r.err;
  if (r.ok()) {
    result.status = CompileStatus::Ok;
    result.artifact_path = std::move(artifact);
  } else {
    result.status = CompileStatus::Error;
    result.diagnostic = r.err.empty() ? "compiler exited with status " + std::to_string(r.exit_code) : r.err;
  }
  return result;
}

}  // namespace vectrans
