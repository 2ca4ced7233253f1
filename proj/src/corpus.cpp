#include "vectrans/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "vectrans/error.hpp"
#include "vectrans/text.hpp"

namespace vectrans {
namespace {

using json = nlohmann::json;

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

size_t skip_space(std::string_view code, size_t pos, size_t end) {
  while (pos < end && std::isspace(static_cast<unsigned char>(code[pos]))) ++pos;
  return pos;
}

// Position of the '(' opening the declarator's parameter list, skipping
// attribute groups. npos if the head has none.
size_t find_param_open(std::string_view head) {
  int depth = 0;
  for (size_t i = 0; i < head.size(); ++i) {
    char c = head[i];
    if (c == '(') {
      if (depth == 0) {
        size_t e = i;
        while (e > 0 && std::isspace(static_cast<unsigned char>(head[e - 1]))) --e;
        size_t b = e;
        while (b > 0 && ident_char(head[b - 1])) --b;
        std::string_view word = head.substr(b, e - b);
        if (!word.empty() && word != "__attribute__" && word != "__declspec" && word != "__asm__" &&
            word != "asm") {
          return i;
        }
      }
      ++depth;
    } else if (c == ')') {
      --depth;
    }
  }
  return std::string_view::npos;
}

std::string identifier_before(std::string_view head, size_t open) {
  size_t e = open;
  while (e > 0 && std::isspace(static_cast<unsigned char>(head[e - 1]))) --e;
  size_t b = e;
  while (b > 0 && ident_char(head[b - 1])) --b;
  return std::string(head.substr(b, e - b));
}

bool looks_like_function_head(std::string_view head) {
  head = trim(head);
  if (head.empty() || head.back() != ')') return false;
  int depth = 0;
  for (char c : head) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == '=' && depth == 0) return false;
  }
  return find_param_open(head) != std::string_view::npos;
}

std::vector<std::string> words_of(std::string_view s) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < s.size()) {
    if (ident_start(s[i])) {
      size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      words.emplace_back(s.substr(i, j - i));
      i = j;
    } else {
      ++i;
    }
  }
  return words;
}

// Removes `__attribute__((...))` groups.
std::string strip_attributes(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    size_t at = s.find("__attribute__", i);
    if (at == std::string_view::npos) break;
    out.append(s.substr(i, at - i));
    size_t j = s.find('(', at);
    if (j == std::string_view::npos) {
      i = at + 13;
      continue;
    }
    int depth = 0;
    for (; j < s.size(); ++j) {
      if (s[j] == '(') ++depth;
      if (s[j] == ')' && --depth == 0) break;
    }
    i = j + 1;
  }
  if (i < s.size()) out.append(s.substr(i));
  return out;
}

const std::set<std::string, std::less<>> kQualifiers = {
    "const",   "volatile", "restrict", "__restrict", "__restrict__", "static",       "inline",
    "__inline", "__inline__", "extern",  "register", "_Alignas",   "__extension__",
};

struct DefineTable {
  std::vector<std::pair<std::string, std::string>> entries;

  explicit DefineTable(std::string_view context) {
    for (std::string_view raw : split_lines(context)) {
      std::string_view line = trim(raw);
      if (!line.starts_with("#")) continue;
      line = trim(line.substr(1));
      if (!line.starts_with("define")) continue;
      line = line.substr(6);
      if (line.empty() || !std::isspace(static_cast<unsigned char>(line.front()))) continue;
      line = trim(line);
      size_t n = 0;
      while (n < line.size() && ident_char(line[n])) ++n;
      if (n == 0 || (n < line.size() && line[n] == '(')) continue;  // function-like macro
      std::string_view value = line.substr(n);
      size_t cmt = std::min(value.find("//"), value.find("/*"));
      if (cmt != std::string_view::npos) value = value.substr(0, cmt);
      entries.emplace_back(std::string(line.substr(0, n)), std::string(trim(value)));
    }
  }

  const std::string* lookup(std::string_view name) const {
    // Later definitions win, as with redefinition after #undef.
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }
};

class ConstantEvaluator {
 public:
  ConstantEvaluator(const DefineTable& defines, int depth) : defines_(defines), depth_(depth) {}

  std::optional<long long> run(std::string_view expr) {
    if (depth_ > 32) return std::nullopt;
    text_ = expr;
    pos_ = 0;
    auto v = additive();
    skip();
    if (!v || pos_ != text_.size()) return std::nullopt;
    return v;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::optional<long long> additive() {
    auto lhs = multiplicative();
    while (lhs) {
      skip();
      if (pos_ >= text_.size() || (text_[pos_] != '+' && text_[pos_] != '-')) break;
      char op = text_[pos_++];
      auto rhs = multiplicative();
      if (!rhs) return std::nullopt;
      lhs = op == '+' ? *lhs + *rhs : *lhs - *rhs;
    }
    return lhs;
  }

  std::optional<long long> multiplicative() {
    auto lhs = unary();
    while (lhs) {
      skip();
      if (pos_ >= text_.size() || (text_[pos_] != '*' && text_[pos_] != '/' && text_[pos_] != '%')) break;
      char op = text_[pos_++];
      auto rhs = unary();
      if (!rhs) return std::nullopt;
      if (op == '*') {
        lhs = *lhs * *rhs;
      } else {
        if (*rhs == 0) return std::nullopt;
        lhs = op == '/' ? *lhs / *rhs : *lhs % *rhs;
      }
    }
    return lhs;
  }

  std::optional<long long> unary() {
    skip();
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      char op = text_[pos_++];
      auto v = unary();
      if (!v) return std::nullopt;
      return op == '-' ? -*v : *v;
    }
    return primary();
  }

  std::optional<long long> primary() {
    skip();
    if (pos_ >= text_.size()) return std::nullopt;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto v = additive();
      skip();
      if (!v || pos_ >= text_.size() || text_[pos_] != ')') return std::nullopt;
      ++pos_;
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t begin = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string lit(text_.substr(begin, pos_ - begin));
      while (!lit.empty() && (lit.back() == 'u' || lit.back() == 'U' || lit.back() == 'l' || lit.back() == 'L')) {
        lit.pop_back();
      }
      try {
        size_t used = 0;
        long long v = std::stoll(lit, &used, 0);
        if (used != lit.size()) return std::nullopt;
        return v;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    if (ident_start(c)) {
      size_t begin = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      const std::string* def = defines_.lookup(text_.substr(begin, pos_ - begin));
      if (def == nullptr) return std::nullopt;
      return ConstantEvaluator(defines_, depth_ + 1).run(*def);
    }
    return std::nullopt;
  }

  const DefineTable& defines_;
  int depth_;
  std::string_view text_;
  size_t pos_ = 0;
};

std::optional<NumericClass> builtin_class(const std::vector<std::string>& words) {
  bool has_unsigned = false;
  bool has_int_word = false;
  for (const auto& w : words) {
    if (w == "float" || w == "double") return NumericClass::Real;
    if (w == "unsigned") has_unsigned = true;
    if (w == "int" || w == "long" || w == "short" || w == "char" || w == "signed" || w == "_Bool") has_int_word = true;
  }
  if (has_unsigned) return NumericClass::UnsignedInt;
  if (has_int_word) return NumericClass::SignedInt;
  if (words.size() == 1) {
    const std::string& w = words.front();
    if (w == "int8_t" || w == "int16_t" || w == "int32_t" || w == "int64_t" || w == "ptrdiff_t" ||
        w == "intptr_t" || w == "ssize_t") {
      return NumericClass::SignedInt;
    }
    if (w == "uint8_t" || w == "uint16_t" || w == "uint32_t" || w == "uint64_t" || w == "size_t" ||
        w == "uintptr_t") {
      return NumericClass::UnsignedInt;
    }
  }
  return std::nullopt;
}

// Resolves `typedef <type> NAME;` chains in the context.
std::optional<NumericClass> typedef_class(std::string_view name, std::string_view context_code, int depth) {
  if (depth > 8) return std::nullopt;
  size_t pos = 0;
  while ((pos = context_code.find("typedef", pos)) != std::string_view::npos) {
    size_t semi = context_code.find(';', pos);
    if (semi == std::string_view::npos) break;
    auto words = words_of(context_code.substr(pos + 7, semi - pos - 7));
    pos = semi;
    if (words.size() < 2 || words.back() != name) continue;
    words.pop_back();
    std::erase_if(words, [](const std::string& w) { return kQualifiers.count(w) != 0; });
    if (auto cls = builtin_class(words)) return cls;
    if (words.size() == 1) return typedef_class(words.front(), context_code, depth + 1);
  }
  return std::nullopt;
}

NumericKind resolve_type(const std::vector<std::string>& type_words, std::string_view context_code,
                         std::string_view what) {
  std::vector<std::string> words;
  for (const auto& w : type_words) {
    if (kQualifiers.count(w) == 0) words.push_back(w);
  }
  if (words.empty()) throw ParseError("missing type for " + std::string(what));
  std::string spelled;
  for (const auto& w : words) {
    if (!spelled.empty()) spelled += ' ';
    spelled += w;
  }
  auto cls = builtin_class(words);
  if (!cls && words.size() == 1) cls = typedef_class(words.front(), context_code, 0);
  if (!cls) throw ParseError("unsupported type '" + spelled + "' for " + std::string(what));
  return NumericKind{spelled, *cls};
}

std::vector<std::string_view> split_params(std::string_view list) {
  std::vector<std::string_view> parts;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < list.size(); ++i) {
    char c = list[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(list.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(list.substr(start)));
  return parts;
}

ParamInfo parse_param(std::string_view decl, std::string_view context, std::string_view context_code) {
  ParamInfo p;
  std::string cleaned = strip_attributes(decl);
  std::string_view d = trim(cleaned);
  if (d.find('*') != std::string_view::npos) {
    auto words = words_of(d);
    std::string name = words.empty() ? std::string(d) : words.back();
    throw ParseError("parameter '" + name + "' is a pointer; declare it with its extent, e.g. " + name + "[LEN]");
  }
  size_t bracket = d.find('[');
  std::string_view base = trim(d.substr(0, bracket));
  auto words = words_of(base);
  if (words.size() < 2) throw ParseError("cannot parse parameter '" + std::string(decl) + "'");
  p.name = words.back();
  words.pop_back();
  p.type = resolve_type(words, context_code, "parameter '" + p.name + "'");
  if (bracket == std::string_view::npos) {
    p.kind = ParamKind::ScalarIn;
    return p;
  }
  p.kind = ParamKind::ArrayInOut;
  size_t pos = bracket;
  while (pos < d.size() && d[pos] == '[') {
    size_t close = d.find(']', pos);
    if (close == std::string_view::npos) throw ParseError("unterminated extent in '" + std::string(decl) + "'");
    std::string extent(trim(d.substr(pos + 1, close - pos - 1)));
    for (std::string_view q : {"restrict", "__restrict__", "__restrict", "static", "const", "volatile"}) {
      extent = replace_identifier(extent, q, "");
    }
    extent = std::string(trim(extent));
    if (extent.empty()) throw ParseError("array parameter '" + p.name + "' has no extent");
    auto value = evaluate_constant(extent, context);
    if (!value || *value <= 0) {
      throw ParseError("extent '" + extent + "' of parameter '" + p.name + "' does not resolve to a positive constant");
    }
    p.extent_symbols.push_back(extent);
    p.extents.push_back(*value);
    pos = skip_space(d, close + 1, d.size());
  }
  if (pos != d.size()) throw ParseError("trailing text in parameter '" + std::string(decl) + "'");
  return p;
}

const std::pair<std::string_view, CategoryTag> kReasonTable[] = {
    {"unsafe dependent memory operations", CategoryTag::UnsafeDependentMemOps},
    {"could not identify reduction", CategoryTag::UnidentifiedReduction},
    {"unable to identify reduction", CategoryTag::UnidentifiedReduction},
    {"could not be identified as reduction", CategoryTag::UnidentifiedReduction},
    {"cannot identify array bounds", CategoryTag::UnknownArrayBounds},
    {"unable to identify array bounds", CategoryTag::UnknownArrayBounds},
    {"could not determine number of loop iterations", CategoryTag::UnknownTripCount},
    {"unable to determine number of loop iterations", CategoryTag::UnknownTripCount},
    {"instruction cannot be vectorized", CategoryTag::UnvectorizableInstr},
    {"instructions cannot be vectorized", CategoryTag::UnvectorizableInstr},
    {"switch statement", CategoryTag::SwitchInLoop},
};

CaseOrigin guess_origin(const std::filesystem::path& file) {
  std::string name = file.filename().string();
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  return contains(name, "tsvc") ? CaseOrigin::Tsvc : CaseOrigin::UserFile;
}

struct Selection {
  std::string id;
  std::string function;
  std::filesystem::path file;
  std::vector<std::string> extra_flags;
  std::optional<NonVectorizableCategory> category;
  std::optional<CaseOrigin> origin;
  std::map<std::string, std::pair<double, double>> input_ranges;
};

void add_case(Corpus& corpus, const Selection& sel, const SplitSource& split) {
  auto it = std::find_if(split.functions.begin(), split.functions.end(),
                         [&](const SourceFunction& f) { return f.name == sel.function; });
  if (it == split.functions.end()) {
    corpus.issues.push_back({CorpusIssue::Kind::NotFound, sel.id,
                             "function '" + sel.function + "' not found in " + sel.file.string()});
    return;
  }
  FunctionCase c;
  c.id = sel.id;
  c.source_text = it->text;
  c.context_text = split.context;
  c.category = sel.category;
  c.origin = sel.origin.value_or(guess_origin(sel.file));
  c.extra_flags = sel.extra_flags;
  c.input_ranges = sel.input_ranges;
  c.source_path = sel.file;
  try {
    c.signature = parse_signature(c.source_text, c.context_text);
  } catch (const ParseError& e) {
    corpus.issues.push_back({CorpusIssue::Kind::ParseError, sel.id, e.what()});
    return;
  }
  corpus.cases.push_back(std::move(c));
}

Corpus parse_source_file(const std::filesystem::path& path, const std::vector<std::string>& filter) {
  std::string text = read_file(path);
  SplitSource split = split_translation_unit(text);
  if (split.functions.empty()) throw ParseError("no function definition found in " + path.string());
  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& f : split.functions) {
    if (!seen.insert(f.name).second) throw ParseError("duplicate function '" + f.name + "' in " + path.string());
  }
  if (filter.empty()) {
    for (const auto& f : split.functions) add_case(corpus, Selection{f.name, f.name, path, {}, {}, {}, {}}, split);
    return corpus;
  }
  for (const auto& id : filter) {
    add_case(corpus, Selection{id, id, path, {}, {}, {}, {}}, split);
  }
  return corpus;
}

Corpus parse_manifest(const std::filesystem::path& path, const std::vector<std::string>& filter) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("corpus manifest " + path.string() + ": " + e.what());
  }
  if (!doc.contains("cases") || !doc["cases"].is_array()) {
    throw ParseError("corpus manifest " + path.string() + " has no 'cases' array");
  }
  const auto base = path.parent_path();
  std::vector<Selection> selections;
  std::set<std::string> ids;
  for (const auto& entry : doc["cases"]) {
    Selection sel;
    sel.function = entry.at("function").get<std::string>();
    sel.id = entry.value("id", sel.function);
    sel.file = base / entry.at("file").get<std::string>();
    sel.extra_flags = entry.value("extra_flags", std::vector<std::string>{});
    if (entry.contains("category")) {
      auto tag = category_from_string(entry["category"].get<std::string>());
      if (!tag) throw ParseError("unknown category '" + entry["category"].get<std::string>() + "'");
      sel.category = NonVectorizableCategory{*tag, {}};
    }
    if (entry.contains("origin")) {
      sel.origin = entry["origin"].get<std::string>() == "tsvc" ? CaseOrigin::Tsvc : CaseOrigin::UserFile;
    }
    if (entry.contains("ranges")) {
      for (const auto& [param, range] : entry["ranges"].items()) {
        if (!range.is_array() || range.size() != 2) throw ParseError("range for '" + param + "' must be [lo, hi]");
        sel.input_ranges[param] = {range[0].get<double>(), range[1].get<double>()};
      }
    }
    if (!ids.insert(sel.id).second) throw ParseError("duplicate case id '" + sel.id + "' in " + path.string());
    selections.push_back(std::move(sel));
  }

  Corpus corpus;
  std::map<std::filesystem::path, SplitSource> files;
  auto split_for = [&](const std::filesystem::path& file) -> const SplitSource& {
    auto it = files.find(file);
    if (it == files.end()) it = files.emplace(file, split_translation_unit(read_file(file))).first;
    return it->second;
  };
  if (filter.empty()) {
    for (const auto& sel : selections) add_case(corpus, sel, split_for(sel.file));
    return corpus;
  }
  for (const auto& id : filter) {
    auto it = std::find_if(selections.begin(), selections.end(), [&](const Selection& s) { return s.id == id; });
    if (it == selections.end()) {
      corpus.issues.push_back({CorpusIssue::Kind::NotFound, id, "case '" + id + "' not listed in " + path.string()});
      continue;
    }
    add_case(corpus, *it, split_for(it->file));
  }
  return corpus;
}

}  // namespace

std::string code_view(std::string_view text) {
  std::string code(text);
  size_t i = 0;
  bool line_start = true;
  auto blank = [&](size_t from, size_t to) {
    for (size_t k = from; k < to && k < code.size(); ++k) {
      if (code[k] != '\n') code[k] = ' ';
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (line_start && (c == ' ' || c == '\t' || c == '\r')) {
      ++i;
      continue;
    }
    if (line_start && c == '#') {
      size_t j = i;
      for (;;) {
        size_t nl = text.find('\n', j);
        if (nl == std::string_view::npos) {
          j = text.size();
          break;
        }
        size_t k = nl;
        while (k > j && (text[k - 1] == '\r')) --k;
        if (k > j && text[k - 1] == '\\') {
          j = nl + 1;
          continue;
        }
        j = nl;
        break;
      }
      blank(i, j);
      i = j;
      continue;
    }
    line_start = false;
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      size_t nl = text.find('\n', i);
      size_t j = nl == std::string_view::npos ? text.size() : nl;
      blank(i, j);
      i = j;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      size_t close = text.find("*/", i + 2);
      size_t j = close == std::string_view::npos ? text.size() : close + 2;
      blank(i, j);
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != c && text[j] != '\n') {
        if (text[j] == '\\') ++j;
        ++j;
      }
      blank(i + 1, j);
      i = j + 1;
      continue;
    }
    ++i;
  }
  return code;
}

long long ParamInfo::element_count() const {
  long long n = 1;
  for (auto e : extents) n *= e;
  return n;
}

std::string FunctionCase::translation_unit() const { return context_text + "\n" + source_text + "\n"; }

std::string_view to_string(CategoryTag tag) {
  switch (tag) {
    case CategoryTag::UnsafeDependentMemOps: return "UnsafeDependentMemOps";
    case CategoryTag::UnidentifiedReduction: return "UnidentifiedReduction";
    case CategoryTag::UnknownArrayBounds: return "UnknownArrayBounds";
    case CategoryTag::UnknownTripCount: return "UnknownTripCount";
    case CategoryTag::UnvectorizableInstr: return "UnvectorizableInstr";
    case CategoryTag::SwitchInLoop: return "SwitchInLoop";
    case CategoryTag::Other: return "Other";
  }
  return "Other";
}

std::optional<CategoryTag> category_from_string(std::string_view s) {
  for (auto tag : {CategoryTag::UnsafeDependentMemOps, CategoryTag::UnidentifiedReduction,
                   CategoryTag::UnknownArrayBounds, CategoryTag::UnknownTripCount, CategoryTag::UnvectorizableInstr,
                   CategoryTag::SwitchInLoop, CategoryTag::Other}) {
    if (to_string(tag) == s) return tag;
  }
  return std::nullopt;
}

std::string category_key(const NonVectorizableCategory& category) {
  if (category.tag == CategoryTag::Other) return "Other(" + category.other_text + ")";
  return std::string(to_string(category.tag));
}

std::string_view to_string(CorpusIssue::Kind kind) {
  switch (kind) {
    case CorpusIssue::Kind::NotFound: return "not-found";
    case CorpusIssue::Kind::ParseError: return "parse-error";
    case CorpusIssue::Kind::CompileError: return "compile-error";
  }
  return "unknown";
}

SplitSource split_translation_unit(std::string_view text) {
  const std::string code = code_view(text);
  SplitSource out;
  int depth = 0;
  size_t stmt_start = 0;
  bool in_function = false;
  size_t fn_begin = 0;
  std::string fn_name;
  size_t context_cursor = 0;

  for (size_t i = 0; i < code.size(); ++i) {
    char c = code[i];
    if (c == '{') {
      if (depth == 0) {
        std::string_view head = std::string_view(code).substr(stmt_start, i - stmt_start);
        if (looks_like_function_head(head)) {
          in_function = true;
          fn_begin = skip_space(code, stmt_start, i);
          std::string_view trimmed = trim(head);
          fn_name = identifier_before(trimmed, find_param_open(trimmed));
        }
      }
      ++depth;
    } else if (c == '}') {
      if (depth == 0) throw ParseError("unbalanced '}' at offset " + std::to_string(i));
      if (--depth == 0) {
        if (in_function) {
          out.context.append(text.substr(context_cursor, fn_begin - context_cursor));
          out.functions.push_back(SourceFunction{fn_name, std::string(text.substr(fn_begin, i + 1 - fn_begin)),
                                                 fn_begin, i + 1});
          context_cursor = i + 1;
          in_function = false;
        }
        stmt_start = i + 1;
      }
    } else if (c == ';' && depth == 0) {
      stmt_start = i + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced braces: " + std::to_string(depth) + " left open");
  out.context.append(text.substr(context_cursor));
  return out;
}

std::optional<long long> evaluate_constant(std::string_view expr, std::string_view context) {
  DefineTable defines(context);
  return ConstantEvaluator(defines, 0).run(expr);
}

FunctionSignature parse_signature(std::string_view function_text, std::string_view context) {
  const std::string code = code_view(function_text);
  const std::string context_code = code_view(context);
  size_t brace = code.find('{');
  if (brace == std::string::npos) throw ParseError("function has no body");
  std::string_view head = trim(std::string_view(code).substr(0, brace));
  size_t open = find_param_open(head);
  if (open == std::string_view::npos) throw ParseError("no parameter list in function head");
  FunctionSignature sig;
  sig.name = identifier_before(head, open);
  if (sig.name.empty()) throw ParseError("cannot find function name");

  int depth = 0;
  size_t close = open;
  for (; close < head.size(); ++close) {
    if (head[close] == '(') ++depth;
    if (head[close] == ')' && --depth == 0) break;
  }
  if (close >= head.size()) throw ParseError("unterminated parameter list of " + sig.name);

  std::string ret_text = strip_attributes(head.substr(0, open));
  size_t name_at = ret_text.rfind(sig.name);
  if (name_at != std::string::npos) ret_text.erase(name_at);
  if (ret_text.find('*') != std::string::npos) throw ParseError("pointer return type of " + sig.name + " unsupported");
  auto ret_words = words_of(ret_text);
  std::erase_if(ret_words, [](const std::string& w) { return kQualifiers.count(w) != 0; });
  if (ret_words.empty()) throw ParseError("missing return type of " + sig.name);
  if (!(ret_words.size() == 1 && ret_words.front() == "void")) {
    sig.return_kind = resolve_type(ret_words, context_code, "return of " + sig.name);
  }

  std::string_view params = trim(std::string_view(code).substr(open + 1, close - open - 1));
  if (!params.empty() && params != "void") {
    for (auto decl : split_params(params)) {
      if (decl.empty()) throw ParseError("empty parameter in " + sig.name);
      sig.params.push_back(parse_param(decl, context, context_code));
    }
  }
  std::set<std::string> names;
  for (const auto& p : sig.params) {
    if (!names.insert(p.name).second) throw ParseError("duplicate parameter '" + p.name + "' in " + sig.name);
  }
  return sig;
}

Corpus parse_corpus(const std::filesystem::path& path, const std::vector<std::string>& filter) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw IoError("corpus path is not a readable file: " + path.string());
  if (path.extension() == ".json") return parse_manifest(path, filter);
  return parse_source_file(path, filter);
}

Corpus load_corpus(const std::filesystem::path& path, const std::vector<std::string>& filter,
                   const Compiler& compiler, const std::filesystem::path& scratch) {
  Corpus parsed = parse_corpus(path, filter);
  Corpus out;
  out.issues = std::move(parsed.issues);
  for (auto& c : parsed.cases) {
    CompileResult r = compiler.compile(c.translation_unit(), FlagsProfile::Bench, scratch / c.id, "ingest", c.extra_flags);
    if (!r.ok()) {
      out.issues.push_back({CorpusIssue::Kind::CompileError, c.id, r.diagnostic});
      continue;
    }
    out.cases.push_back(std::move(c));
  }
  return out;
}

NonVectorizableCategory classify_reason(std::string_view reason) {
  for (auto [needle, tag] : kReasonTable) {
    if (contains(reason, needle)) return NonVectorizableCategory{tag, {}};
  }
  return NonVectorizableCategory{CategoryTag::Other, std::string(reason)};
}

NonVectorizableCategory classify_case(const VectorizationReport& report) {
  for (const auto& loop : report.loops) {
    if (!loop.vectorized && loop.reason) return classify_reason(*loop.reason);
  }
  throw std::invalid_argument("report has no non-vectorized loop with a reason");
}

}  // namespace vectrans
