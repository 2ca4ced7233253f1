#include "vectrans/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "vectrans/error.hpp"

namespace vectrans {
namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_slot_name_char(char c) {
  return std::isupper(static_cast<unsigned char>(c)) != 0 || std::isdigit(static_cast<unsigned char>(c)) != 0 ||
         c == '_';
}

template <typename OnSlot>
std::string substitute(std::string_view tmpl, OnSlot&& on_slot) {
  std::string out;
  out.reserve(tmpl.size());
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t open = tmpl.find(kSlotSigil, pos);
    if (open == std::string_view::npos) break;
    size_t name_begin = open + kSlotSigil.size();
    size_t name_end = name_begin;
    while (name_end < tmpl.size() && is_slot_name_char(tmpl[name_end])) ++name_end;
    if (name_end == name_begin || tmpl.substr(name_end, kSlotSigil.size()) != kSlotSigil) {
      out.append(tmpl.substr(pos, name_begin - pos));
      pos = name_begin;
      continue;
    }
    out.append(tmpl.substr(pos, open - pos));
    on_slot(tmpl.substr(name_begin, name_end - name_begin), tmpl.substr(open, name_end + kSlotSigil.size() - open),
            out);
    pos = name_end + kSlotSigil.size();
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace

std::string_view trim(std::string_view s) {
  size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < s.size()) lines.push_back(s.substr(pos));
      break;
    }
    std::string_view line = s.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string replace_identifier(std::string_view text, std::string_view from, std::string_view to) {
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t hit = text.find(from, pos);
    if (hit == std::string_view::npos) break;
    bool left_ok = hit == 0 || !is_ident_char(text[hit - 1]);
    size_t after = hit + from.size();
    bool right_ok = after >= text.size() || !is_ident_char(text[after]);
    out.append(text.substr(pos, hit - pos));
    if (left_ok && right_ok) {
      out.append(to);
    } else {
      out.append(from);
    }
    pos = after;
  }
  out.append(text.substr(pos));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::set<std::string> template_slots(std::string_view tmpl) {
  std::set<std::string> names;
  substitute(tmpl, [&](std::string_view name, std::string_view raw, std::string& out) {
    names.emplace(name);
    out.append(raw);
  });
  return names;
}

std::string instantiate(std::string_view tmpl, const SlotMap& slots) {
  return substitute(tmpl, [&](std::string_view name, std::string_view, std::string& out) {
    auto it = slots.find(name);
    if (it == slots.end()) throw SlotMissing("template slot " + std::string(name) + " has no value");
    out.append(it->second);
  });
}

std::string instantiate_partial(std::string_view tmpl, const SlotMap& slots) {
  return substitute(tmpl, [&](std::string_view name, std::string_view raw, std::string& out) {
    auto it = slots.find(name);
    out.append(it == slots.end() ? raw : std::string_view(it->second));
  });
}

}  // namespace vectrans
