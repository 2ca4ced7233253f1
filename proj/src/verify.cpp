#include "vectrans/verify.hpp"

#include <cctype>
#include <regex>

#include "vectrans/error.hpp"
#include "vectrans/process.hpp"
#include "vectrans/text.hpp"

namespace vectrans {
namespace {

std::optional<long> summary_count(const std::string& text, const std::string& label) {
  std::smatch m;
  std::regex re("(\\d+) " + label);
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return std::stol(m[1].str());
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.'; }

}  // namespace

std::string_view to_string(FormalKind kind) {
  switch (kind) {
    case FormalKind::Equivalent: return "Equivalent";
    case FormalKind::Mismatch: return "Mismatch";
    case FormalKind::Timeout: return "Timeout";
    case FormalKind::ToolError: return "ToolError";
  }
  return "ToolError";
}

std::optional<FormalKind> formal_kind_from_string(std::string_view s) {
  for (auto k : {FormalKind::Equivalent, FormalKind::Mismatch, FormalKind::Timeout, FormalKind::ToolError}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

FormalVerdict unavailable_verdict() { return FormalVerdict{FormalKind::ToolError, "unavailable"}; }

FormalVerdict classify_tool_output(std::string_view out, std::string_view err, int exit_code, bool timed_out) {
  std::string all(out);
  if (!err.empty()) {
    if (!all.empty() && all.back() != '\n') all += '\n';
    all += err;
  }
  if (timed_out) return {FormalKind::Timeout, all};
  if (contains(all, "doesn't verify")) return {FormalKind::Mismatch, all};
  if (contains(all, "Timeout") || contains(all, "timed out")) {
    return {FormalKind::Timeout, all};
  }
  if (contains(all, "seems to be correct")) {
    auto incorrect = summary_count(all, "incorrect transformations");
    auto unproven = summary_count(all, "failed-to-prove transformations");
    auto errors = summary_count(all, "Alive2 errors");
    bool clean = incorrect.value_or(0) == 0 && unproven.value_or(0) == 0 && errors.value_or(0) == 0;
    if (clean && exit_code == 0) return {FormalKind::Equivalent, all};
  }
  return {FormalKind::ToolError, all};
}

std::string align_function_names(std::string_view ir, std::string_view function_name) {
  const std::string from = "@" + std::string(function_name) + "_opt";
  const std::string to = "@" + std::string(function_name);
  std::string out;
  out.reserve(ir.size());
  size_t pos = 0;
  while (pos < ir.size()) {
    size_t hit = ir.find(from, pos);
    if (hit == std::string_view::npos) break;
    size_t after = hit + from.size();
    out.append(ir.substr(pos, hit - pos));
    if (after < ir.size() && ident_char(ir[after])) {
      out.append(from);
    } else {
      out.append(to);
    }
    pos = after;
  }
  out.append(ir.substr(pos));
  return out;
}

Verifier::Verifier(VerifierConfig config) : config_(std::move(config)) {
  if (config_.executable && *config_.executable == "none") return;
  if (config_.executable) {
    executable_ = find_executable(*config_.executable);
    if (!executable_) throw ToolMissing("verifier not found: " + *config_.executable);
  } else {
    executable_ = find_executable("alive-tv");
  }
}

std::string Verifier::stamp() const { return executable_ ? executable_->string() : std::string("unavailable"); }

FormalVerdict Verifier::verify_pair_raw(const std::filesystem::path& original_ir, const std::filesystem::path& candidate_ir,
                                        std::string_view function_name, std::chrono::seconds budget, Raw& raw) const {
  if (!executable_) return unavailable_verdict();
  if (budget.count() <= 0) return {FormalKind::Timeout, "verification budget is zero"};
  auto aligned = candidate_ir;
  aligned.replace_extension(".aligned.ll");
  write_file(aligned, align_function_names(read_file(candidate_ir), function_name));

  std::vector<std::string> argv{executable_->string()};
  argv.insert(argv.end(), config_.extra_args.begin(), config_.extra_args.end());
  argv.push_back(original_ir.string());
  argv.push_back(aligned.string());
  ProcessOptions opts;
  opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(budget);
  ProcessResult r = run_process(argv, opts);
  raw.out = r.out;
  raw.err = r.err;
  if (!r.timed_out && r.term_signal != 0) {
    return {FormalKind::ToolError, "verifier killed by signal " + std::to_string(r.term_signal) + "\n" + r.out + r.err};
  }
  return classify_tool_output(r.out, r.err, r.exit_code, r.timed_out);
}

FormalVerdict Verifier::verify_pair(const std::filesystem::path& original_ir, const std::filesystem::path& candidate_ir,
                                    std::string_view function_name, std::chrono::seconds budget) const {
  Raw raw;
  return verify_pair_raw(original_ir, candidate_ir, function_name, budget, raw);
}

}  // namespace vectrans
