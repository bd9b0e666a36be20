#pragma once

#include <vector>

#include "noisynth/grammar.hpp"
#include "noisynth/program.hpp"

namespace noisynth {

// Every start-rooted program of height <= d, exactly once, in a fixed order:
// bottom-up by height, then by production index, then lexicographically over
// child choices. Throws ConfigError when the count would exceed `cap`.
std::vector<Program> enumerate_programs(const Grammar& g, int d,
                                        size_t cap = 2'000'000);

// Same enumeration rooted at an arbitrary symbol (used by oracles/tests).
std::vector<Program> enumerate_at_symbol(const Grammar& g,
                                         const std::string& symbol, int d,
                                         size_t cap = 2'000'000);

}  // namespace noisynth
