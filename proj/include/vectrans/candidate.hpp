#pragma once

#include <string>
#include <string_view>

namespace vectrans {

inline constexpr std::string_view kBeginMarker = "// VECTRANS_BEGIN";
inline constexpr std::string_view kEndMarker = "// VECTRANS_END";
/// A line `// VECTRANS_NO_BENEFIT: <reason>` in place of code.
inline constexpr std::string_view kNoBenefitMarker = "// VECTRANS_NO_BENEFIT:";
/// A line `// VECTRANS_DONE` in place of code: the model claims the current
/// candidate needs no further work.
inline constexpr std::string_view kDoneMarker = "// VECTRANS_DONE";

struct CandidateCode {
  std::string text;
  int round = 0;

  bool operator==(const CandidateCode&) const = default;
};

/// Text between the first marker pair, each marker alone on its line.
/// Markdown fence lines inside the region are dropped. Throws MarkerNotFound.
CandidateCode extract_candidate(std::string_view llm_text);

/// `<name>_opt`, the slot every harness calls.
std::string opt_name(std::string_view function_name);

/// Renames the definition (and any self-reference) of `function_name` to
/// its `_opt` form. Text already using the `_opt` name is left as is.
std::string rename_to_opt(std::string_view source, std::string_view function_name);

/// True when `source` defines a function called `name`.
bool defines_function(std::string_view source, std::string_view name);

}  // namespace vectrans
