#pragma once

#include <string>

#include "noisynth/grammar.hpp"
#include "noisynth/program.hpp"

namespace noisynth::testing {

inline std::string source_dir() { return NOISYNTH_SOURCE_DIR; }

inline std::string grammar_path(const std::string& name) {
  return source_dir() + "/grammars/" + name;
}

inline Grammar arith_grammar() { return Grammar::load(grammar_path("arith.json")); }
inline Grammar pair_grammar() {
  return Grammar::load(grammar_path("strings_pair.json"));
}
inline Grammar ab_grammar() {
  return Grammar::load(grammar_path("strings_ab.json"));
}
inline Grammar suffix_grammar() {
  return Grammar::load(grammar_path("strings_suffix.json"));
}

inline InputEnv int_env(int64_t x) { return {{"x", Value(x)}}; }
inline InputEnv str_env(const std::string& x) { return {{"x", Value(x)}}; }

}  // namespace noisynth::testing
