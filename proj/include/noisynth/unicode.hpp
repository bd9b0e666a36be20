#pragma once

#include <string>

namespace noisynth {

// String values are held as UTF-8, but every edit/noise operation works at
// unicode scalar granularity; these helpers convert at the boundary.
std::u32string utf8_decode(const std::string& s);
std::string utf8_encode(const std::u32string& s);
std::string utf8_encode(char32_t c);

}  // namespace noisynth
