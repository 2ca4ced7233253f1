#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vectrans/compiler.hpp"

namespace vectrans {

enum class NumericClass { Real, SignedInt, UnsignedInt };

/// A scalar C type as written in the source, with the class the harness
/// needs to draw values and compare results.
struct NumericKind {
  std::string c_type;  ///< spelling usable in the case's translation unit
  NumericClass cls = NumericClass::Real;

  bool is_real() const { return cls == NumericClass::Real; }
  bool operator==(const NumericKind&) const = default;
};

enum class ParamKind { ScalarIn, ArrayInOut };

struct ParamInfo {
  std::string name;
  ParamKind kind = ParamKind::ScalarIn;
  NumericKind type;
  /// ArrayInOut only: one symbol (or literal) per dimension, outermost first.
  std::vector<std::string> extent_symbols;
  std::vector<long long> extents;

  long long element_count() const;
  bool operator==(const ParamInfo&) const = default;
};

struct FunctionSignature {
  std::string name;
  std::optional<NumericKind> return_kind;  ///< nullopt means void
  std::vector<ParamInfo> params;

  bool returns_void() const { return !return_kind.has_value(); }
  bool operator==(const FunctionSignature&) const = default;
};

enum class CategoryTag {
  UnsafeDependentMemOps,
  UnidentifiedReduction,
  UnknownArrayBounds,
  UnknownTripCount,
  UnvectorizableInstr,
  SwitchInLoop,
  Other,
};

struct NonVectorizableCategory {
  CategoryTag tag = CategoryTag::Other;
  std::string other_text;  ///< raw reason when tag == Other

  bool operator==(const NonVectorizableCategory&) const = default;
};

std::string_view to_string(CategoryTag tag);
std::optional<CategoryTag> category_from_string(std::string_view s);
/// Report key: the tag name, or "Other(<text>)".
std::string category_key(const NonVectorizableCategory& category);

enum class CaseOrigin { Tsvc, UserFile };

struct FunctionCase {
  std::string id;
  std::string source_text;   ///< the function definition verbatim
  std::string context_text;  ///< everything else the function needs to compile
  FunctionSignature signature;
  std::optional<NonVectorizableCategory> category;
  CaseOrigin origin = CaseOrigin::UserFile;
  std::vector<std::string> extra_flags;
  /// Per-parameter input ranges for generated tests, overriding defaults.
  std::map<std::string, std::pair<double, double>> input_ranges;
  std::filesystem::path source_path;

  /// Context followed by the function: one standalone translation unit.
  std::string translation_unit() const;
  bool operator==(const FunctionCase&) const = default;
};

/// One function definition located by brace matching.
struct SourceFunction {
  std::string name;
  std::string text;
  size_t begin = 0;
  size_t end = 0;
};

struct SplitSource {
  std::string context;  ///< the file with every function definition removed
  std::vector<SourceFunction> functions;
};

/// Same length as `text`, with comments, preprocessor lines and the insides
/// of string/char literals replaced by spaces (newlines kept).
std::string code_view(std::string_view text);

/// Finds top-level function definitions (brace matching, comment and
/// literal aware). Throws ParseError on unbalanced braces.
SplitSource split_translation_unit(std::string_view text);

/// Evaluates an integer constant expression over `#define`s in `context`.
std::optional<long long> evaluate_constant(std::string_view expr, std::string_view context);

/// Parses the definition head of `function_text`. Array parameters must be
/// declared with their extents (`float a[LEN_1D]`); extents must resolve to
/// constants in `context`. Throws ParseError otherwise.
FunctionSignature parse_signature(std::string_view function_text, std::string_view context);

struct CorpusIssue {
  enum class Kind { NotFound, ParseError, CompileError };
  Kind kind = Kind::NotFound;
  std::string case_id;
  std::string message;
};

std::string_view to_string(CorpusIssue::Kind kind);

struct Corpus {
  std::vector<FunctionCase> cases;
  std::vector<CorpusIssue> issues;
};

/// Loads a C source file (every function definition becomes a case) or a
/// JSON manifest listing {id, file, function, extra_flags, category}.
/// An empty filter selects everything. Cases whose standalone translation
/// unit fails to compile are reported in `issues`, never silently dropped.
/// Throws IoError for unreadable paths and ParseError when no function can
/// be identified.
Corpus load_corpus(const std::filesystem::path& path, const std::vector<std::string>& filter,
                   const Compiler& compiler, const std::filesystem::path& scratch);

/// load_corpus without the ingestion compile check.
Corpus parse_corpus(const std::filesystem::path& path, const std::vector<std::string>& filter);

/// Maps the first non-vectorized loop's reason to the taxonomy by substring.
/// Throws std::invalid_argument if no loop carries a failure reason.
NonVectorizableCategory classify_case(const VectorizationReport& report);

/// Substring classifier for a single reason string.
NonVectorizableCategory classify_reason(std::string_view reason);

}  // namespace vectrans
