#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "vectrans/corpus.hpp"
#include "vectrans/text.hpp"

namespace vectrans {

struct ValueRange {
  double lo = -1.0;
  double hi = 1.0;
  bool operator==(const ValueRange&) const = default;
};

struct InputSpec {
  std::uint64_t seed = 0x5EEDF00DULL;
  int trials = 100;
  /// One entry per parameter of the case.
  std::map<std::string, ValueRange> value_ranges;
  bool operator==(const InputSpec&) const = default;
};

struct ComparePolicy {
  double rel_tol = 1e-4;
  double abs_tol = 1e-6;
};

/// "int iters, float a[LEN_1D]" as written from the parsed signature.
std::string parameter_list(const FunctionSignature& sig);

/// Definition of `<name>_opt` that disagrees with the original: the
/// original's result with every byte inverted for non-void functions, an
/// empty body for void ones.
std::string mutant_function(const FunctionCase& fc);

/// True when the body of the case's function holds no statement.
bool has_empty_body(const FunctionCase& fc);

/// Slot values for the differential template, everything except CANDIDATE_FN.
SlotMap differential_slots(const FunctionCase& fc, const InputSpec& spec, const ComparePolicy& policy);

/// The differential harness with the CANDIDATE_FN slot still open.
std::string differential_harness(const FunctionCase& fc, const InputSpec& spec, const ComparePolicy& policy);

/// A complete timing program for the case and an already renamed candidate.
std::string timing_harness(const FunctionCase& fc, const std::string& candidate_fn, const InputSpec& spec);

/// Fills the open CANDIDATE_FN slot of a suite harness.
std::string fill_candidate(const std::string& harness, const std::string& candidate_fn);

inline constexpr std::string_view kCandidateSlot = "@@CANDIDATE_FN@@";

}  // namespace vectrans
