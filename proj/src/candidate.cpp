#include "vectrans/candidate.hpp"

#include "vectrans/corpus.hpp"
#include "vectrans/error.hpp"
#include "vectrans/text.hpp"

namespace vectrans {

CandidateCode extract_candidate(std::string_view llm_text) {
  auto lines = split_lines(llm_text);
  size_t begin = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]) == kBeginMarker) {
      begin = i;
      break;
    }
  }
  if (begin == lines.size()) throw MarkerNotFound("no '" + std::string(kBeginMarker) + "' line in response");
  std::string body;
  for (size_t i = begin + 1; i < lines.size(); ++i) {
    std::string_view t = trim(lines[i]);
    if (t == kEndMarker) {
      while (!body.empty() && body.back() == '\n') body.pop_back();
      return CandidateCode{body, 0};
    }
    if (t.starts_with("```")) continue;
    body.append(lines[i]);
    body.push_back('\n');
  }
  throw MarkerNotFound("'" + std::string(kBeginMarker) + "' without a matching '" + std::string(kEndMarker) + "'");
}

std::string opt_name(std::string_view function_name) { return std::string(function_name) + "_opt"; }

std::string rename_to_opt(std::string_view source, std::string_view function_name) {
  return replace_identifier(source, function_name, opt_name(function_name));
}

bool defines_function(std::string_view source, std::string_view name) {
  try {
    auto split = split_translation_unit(source);
    for (const auto& f : split.functions) {
      if (f.name == name) return true;
    }
  } catch (const ParseError&) {
  }
  return false;
}

}  // namespace vectrans
