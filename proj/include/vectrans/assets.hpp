#pragma once

#include <string_view>

namespace vectrans::assets {

/// Text assets compiled into the library (harness templates, prompt
/// templates). `name` is the path relative to the repo's assets/ directory.
std::string_view get(std::string_view name);

}  // namespace vectrans::assets
