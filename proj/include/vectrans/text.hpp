#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vectrans {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Replaces whole-identifier occurrences of `from` (C identifier rules).
std::string replace_identifier(std::string_view text, std::string_view from, std::string_view to);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

using SlotMap = std::map<std::string, std::string, std::less<>>;

/// Slots are written `@@NAME@@`; '@' never appears in C outside literals,
/// so templates can embed arbitrary C around them.
inline constexpr std::string_view kSlotSigil = "@@";

/// Names of every slot referenced by the template.
std::set<std::string> template_slots(std::string_view tmpl);

/// Single-pass substitution of every slot. Throws SlotMissing naming the
/// first slot without a value. Inserted values are not rescanned.
std::string instantiate(std::string_view tmpl, const SlotMap& slots);

/// Like instantiate() but leaves unknown slots in place.
std::string instantiate_partial(std::string_view tmpl, const SlotMap& slots);

}  // namespace vectrans
