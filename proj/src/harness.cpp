#include "vectrans/harness.hpp"

#include <sstream>

#include "vectrans/assets.hpp"
#include "vectrans/candidate.hpp"
#include "vectrans/error.hpp"

namespace vectrans {
namespace {

std::string number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  std::string out = s.str();
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

std::string dims(const ParamInfo& p) {
  std::string out;
  for (const auto& e : p.extent_symbols) out += "[" + e + "]";
  return out;
}

std::string buffer(std::string_view prefix, const ParamInfo& p) { return "vt_" + std::string(prefix) + "_" + p.name; }

std::string scalar_var(const ParamInfo& p) { return "vt_s_" + p.name; }

std::string arguments(const FunctionSignature& sig, std::string_view prefix) {
  std::string out;
  for (const auto& p : sig.params) {
    if (!out.empty()) out += ", ";
    out += p.kind == ParamKind::ArrayInOut ? buffer(prefix, p) : scalar_var(p);
  }
  return out;
}

std::string draw(const ParamInfo& p, const ValueRange& r) {
  if (p.type.is_real()) return "(" + p.type.c_type + ")vt_real(" + number(r.lo) + ", " + number(r.hi) + ")";
  return "(" + p.type.c_type + ")vt_int(" + std::to_string(static_cast<long long>(r.lo)) + "LL, " +
         std::to_string(static_cast<long long>(r.hi)) + "LL)";
}

const ValueRange& range_for(const InputSpec& spec, const ParamInfo& p) {
  auto it = spec.value_ranges.find(p.name);
  if (it == spec.value_ranges.end()) throw ConfigError("input spec has no range for parameter '" + p.name + "'");
  return it->second;
}

// printf conversion and cast for a value of kind `k`.
std::pair<std::string, std::string> print_format(const NumericKind& k) {
  switch (k.cls) {
    case NumericClass::Real: return {"%.9g", "(double)"};
    case NumericClass::SignedInt: return {"%lld", "(long long)"};
    case NumericClass::UnsignedInt: return {"%llu", "(unsigned long long)"};
  }
  return {"%.9g", "(double)"};
}

std::string equal_expr(const NumericKind& k, const std::string& e, const std::string& a) {
  if (k.is_real()) return "vt_close((double)(" + e + "), (double)(" + a + "))";
  return "(" + e + ") == (" + a + ")";
}

std::string storage(const FunctionSignature& sig, std::initializer_list<std::string_view> prefixes) {
  std::ostringstream out;
  for (const auto& p : sig.params) {
    if (p.kind == ParamKind::ArrayInOut) {
      for (auto prefix : prefixes) {
        out << "static " << p.type.c_type << ' ' << buffer(prefix, p) << dims(p) << " __attribute__((aligned(64)));\n";
      }
    } else {
      out << "static " << p.type.c_type << ' ' << scalar_var(p) << ";\n";
    }
  }
  if (sig.return_kind) {
    out << "static " << sig.return_kind->c_type << " vt_ret_ref;\n";
    out << "static " << sig.return_kind->c_type << " vt_ret_opt;\n";
  }
  return out.str();
}

std::string fill_code(const FunctionSignature& sig, const InputSpec& spec) {
  std::ostringstream out;
  for (const auto& p : sig.params) {
    const ValueRange& r = range_for(spec, p);
    if (p.kind == ParamKind::ArrayInOut) {
      out << "  {\n"
          << "    " << p.type.c_type << " *p = (" << p.type.c_type << " *)" << buffer("in", p) << ";\n"
          << "    for (long i = 0; i < " << p.element_count() << "L; ++i) p[i] = " << draw(p, r) << ";\n"
          << "  }\n";
    } else {
      out << "  " << scalar_var(p) << " = " << draw(p, r) << ";\n";
    }
  }
  return out.str();
}

std::string reset_code(const FunctionSignature& sig, std::initializer_list<std::string_view> targets) {
  std::ostringstream out;
  for (const auto& p : sig.params) {
    if (p.kind != ParamKind::ArrayInOut) continue;
    for (auto t : targets) {
      out << "  memcpy(" << buffer(t, p) << ", " << buffer("in", p) << ", sizeof " << buffer("in", p) << ");\n";
    }
  }
  if (out.str().empty()) out << "  ;\n";
  return out.str();
}

std::string call(const FunctionCase& fc, std::string_view fn, std::string_view prefix, std::string_view ret_var,
                 std::string_view indent) {
  std::string args = arguments(fc.signature, prefix);
  std::string out(indent);
  if (fc.signature.return_kind) out += std::string(ret_var) + " = ";
  out += std::string(fn) + "(" + args + ");";
  return out;
}

std::string compare_code(const FunctionSignature& sig) {
  std::ostringstream out;
  if (sig.return_kind) {
    auto [fmt, cast] = print_format(*sig.return_kind);
    out << "    if (!(" << equal_expr(*sig.return_kind, "vt_ret_ref", "vt_ret_opt") << ")) {\n"
        << "      printf(\"TRIAL %d PARAM return EXPECTED " << fmt << " ACTUAL " << fmt << "\\n\", trial, " << cast
        << "vt_ret_ref, " << cast << "vt_ret_opt);\n"
        << "      bad = 1;\n"
        << "    }\n";
  }
  for (const auto& p : sig.params) {
    if (p.kind != ParamKind::ArrayInOut) continue;
    auto [fmt, cast] = print_format(p.type);
    const std::string& t = p.type.c_type;
    out << "    {\n"
        << "      const " << t << " *e = (const " << t << " *)" << buffer("ref", p) << ";\n"
        << "      const " << t << " *g = (const " << t << " *)" << buffer("opt", p) << ";\n"
        << "      for (long i = 0; i < " << p.element_count() << "L; ++i) {\n"
        << "        if (!(" << equal_expr(p.type, "e[i]", "g[i]") << ")) {\n"
        << "          printf(\"TRIAL %d PARAM " << p.name << "[%ld] EXPECTED " << fmt << " ACTUAL " << fmt
        << "\\n\", trial, i, " << cast << "e[i], " << cast << "g[i]);\n"
        << "          bad = 1;\n"
        << "          break;\n"
        << "        }\n"
        << "      }\n"
        << "    }\n";
  }
  return out.str();
}

std::string summary_code(const FunctionSignature& sig) {
  std::ostringstream out;
  for (const auto& p : sig.params) {
    auto [fmt, cast] = print_format(p.type);
    if (p.kind == ParamKind::ScalarIn) {
      out << "  printf(\"INPUT %d PARAM " << p.name << " VALUE " << fmt << "\\n\", trial, " << cast << scalar_var(p)
          << ");\n";
      continue;
    }
    const std::string& t = p.type.c_type;
    out << "  {\n"
        << "    const " << t << " *p = (const " << t << " *)" << buffer("in", p) << ";\n"
        << "    " << t << " lo = p[0], hi = p[0];\n"
        << "    long neg = 0;\n"
        << "    for (long i = 0; i < " << p.element_count() << "L; ++i) {\n"
        << "      if (p[i] < lo) lo = p[i];\n"
        << "      if (p[i] > hi) hi = p[i];\n"
        << "      if (p[i] < 0) ++neg;\n"
        << "    }\n"
        << "    printf(\"INPUT %d PARAM " << p.name << " MIN " << fmt << " MAX " << fmt << " NEG %ld\\n\", trial, "
        << cast << "lo, " << cast << "hi, neg);\n"
        << "  }\n";
  }
  if (out.str().empty()) out << "  ;\n";
  return out.str();
}

std::string compare_policy(const ComparePolicy& policy) {
  std::ostringstream out;
  out << "#define VT_REL_TOL " << number(policy.rel_tol) << "\n"
      << "#define VT_ABS_TOL " << number(policy.abs_tol) << "\n"
      << R"(static uint64_t vt_bits(double x) {
  uint64_t u;
  memcpy(&u, &x, sizeof u);
  return u;
}
static int vt_nonfinite(double x) { return ((vt_bits(x) >> 52) & 0x7FF) == 0x7FF; }
static int vt_isnan(double x) { return vt_nonfinite(x) && (vt_bits(x) & 0xFFFFFFFFFFFFFULL) != 0; }
static double vt_abs(double x) { return x < 0 ? -x : x; }
/* NaN and infinities are told apart by their bits: -ffast-math lets the
   compiler assume they never occur. */
static int vt_close(double e, double a) {
  if (vt_nonfinite(e) || vt_nonfinite(a)) {
    if (vt_isnan(e) || vt_isnan(a)) return vt_isnan(e) && vt_isnan(a);
    return vt_bits(e) == vt_bits(a);
  }
  double d = vt_abs(e - a);
  double m = vt_abs(e) > vt_abs(a) ? vt_abs(e) : vt_abs(a);
  return d <= VT_ABS_TOL || d <= VT_REL_TOL * m;
}
)";
  return out.str();
}

std::string checksum_code(const FunctionSignature& sig) {
  std::ostringstream out;
  for (const auto& p : sig.params) {
    if (p.kind != ParamKind::ArrayInOut) continue;
    const std::string& t = p.type.c_type;
    out << "  {\n"
        << "    const " << t << " *p = (const " << t << " *)" << buffer("work", p) << ";\n"
        << "    for (long i = 0; i < " << p.element_count() << "L; ++i) sum += (double)p[i];\n"
        << "  }\n";
  }
  if (sig.return_kind) out << "  sum += (double)vt_ret_ref;\n";
  return out.str();
}

}  // namespace

std::string parameter_list(const FunctionSignature& sig) {
  if (sig.params.empty()) return "void";
  std::string out;
  for (const auto& p : sig.params) {
    if (!out.empty()) out += ", ";
    out += p.type.c_type + " " + p.name + dims(p);
  }
  return out;
}

std::string mutant_function(const FunctionCase& fc) {
  const auto& sig = fc.signature;
  std::ostringstream out;
  std::string args;
  for (const auto& p : sig.params) {
    if (!args.empty()) args += ", ";
    args += p.name;
  }
  if (sig.returns_void()) {
    out << "void " << opt_name(sig.name) << "(" << parameter_list(sig) << ") {\n";
    for (const auto& p : sig.params) out << "  (void)" << p.name << ";\n";
    out << "}\n";
    return out.str();
  }
  const std::string& rt = sig.return_kind->c_type;
  out << rt << " " << opt_name(sig.name) << "(" << parameter_list(sig) << ") {\n"
      << "  " << rt << " vt_r = " << sig.name << "(" << args << ");\n"
      << "  unsigned char *vt_b = (unsigned char *)&vt_r;\n"
      << "  for (unsigned long vt_i = 0; vt_i < sizeof vt_r; ++vt_i) vt_b[vt_i] = (unsigned char)~vt_b[vt_i];\n"
      << "  return vt_r;\n"
      << "}\n";
  return out.str();
}

bool has_empty_body(const FunctionCase& fc) {
  std::string code = code_view(fc.source_text);
  size_t open = code.find('{');
  size_t close = code.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close <= open) return false;
  for (size_t i = open + 1; i < close; ++i) {
    char c = code[i];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != ';') return false;
  }
  return true;
}

SlotMap differential_slots(const FunctionCase& fc, const InputSpec& spec, const ComparePolicy& policy) {
  const auto& sig = fc.signature;
  SlotMap slots;
  slots["CONTEXT"] = fc.context_text;
  slots["ORIGINAL_FN"] = fc.source_text;
  slots["SLOT_NAME"] = opt_name(sig.name);
  slots["TRIALS"] = std::to_string(spec.trials);
  slots["SEED"] = std::to_string(spec.seed);
  slots["RANGES"] = fill_code(sig, spec);
  slots["COMPARE_POLICY"] = compare_policy(policy);
  slots["PARAM_STORAGE"] = storage(sig, {"in", "ref", "opt"});
  slots["RESET_STATE"] = reset_code(sig, {"ref", "opt"});
  slots["CALL_ORIGINAL"] = call(fc, sig.name, "ref", "vt_ret_ref", "    ");
  slots["CALL_CANDIDATE"] = call(fc, opt_name(sig.name), "opt", "vt_ret_opt", "    ");
  slots["COMPARE_OUTPUTS"] = compare_code(sig);
  slots["INPUT_SUMMARY"] = summary_code(sig);
  return slots;
}

std::string differential_harness(const FunctionCase& fc, const InputSpec& spec, const ComparePolicy& policy) {
  return instantiate_partial(assets::get("harness/differential.c.tmpl"), differential_slots(fc, spec, policy));
}

std::string fill_candidate(const std::string& harness, const std::string& candidate_fn) {
  return instantiate(harness, SlotMap{{"CANDIDATE_FN", candidate_fn}});
}

std::string timing_harness(const FunctionCase& fc, const std::string& candidate_fn, const InputSpec& spec) {
  const auto& sig = fc.signature;
  SlotMap slots;
  slots["CONTEXT"] = fc.context_text;
  slots["ORIGINAL_FN"] = fc.source_text;
  slots["CANDIDATE_FN"] = candidate_fn;
  slots["SEED"] = std::to_string(spec.seed);
  slots["RANGES"] = fill_code(sig, spec);
  std::string store = storage(sig, {"in", "work"});
  slots["PARAM_STORAGE"] = store;
  slots["RESET_STATE"] = reset_code(sig, {"work"});
  slots["CALL_ORIGINAL"] = call(fc, sig.name, "work", "vt_ret_ref", "    ");
  slots["CALL_CANDIDATE"] = call(fc, opt_name(sig.name), "work", "vt_ret_ref", "    ");
  slots["CHECKSUM"] = checksum_code(sig);
  return instantiate(assets::get("harness/timing.c.tmpl"), slots);
}

}  // namespace vectrans
