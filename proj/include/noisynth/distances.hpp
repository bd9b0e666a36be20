#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisynth/value.hpp"

namespace noisynth {

// Number of positions where two equal-length vectors disagree.
int64_t counting_distance(const std::vector<Value>& a,
                          const std::vector<Value>& b);

// Number of positions holding strings of unequal length.
int64_t length_distance(const std::vector<Value>& a,
                        const std::vector<Value>& b);

// Damerau-Levenshtein distance, restricted-transposition (optimal string
// alignment) variant: single-character deletions, insertions, substitutions,
// and adjacent transpositions, O(|a||b|) dynamic program over unicode
// scalars.
int64_t dl_metric(const std::string& a, const std::string& b);

// Number of positions whose strings are at Damerau-Levenshtein distance >= k.
int64_t dl_k_distance(int k, const std::vector<Value>& a,
                      const std::vector<Value>& b);

// Sum of per-position Damerau-Levenshtein distances.
int64_t dl_sum_distance(const std::vector<Value>& a,
                        const std::vector<Value>& b);

// Metric selected by name + parameters in experiment configs:
//   {"kind": "counting"} | {"kind": "length"} |
//   {"kind": "dl_k", "k": 2} | {"kind": "dl_sum"}
class DistanceFn {
 public:
  static DistanceFn from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int64_t eval(const std::vector<Value>& a, const std::vector<Value>& b) const;

 private:
  enum class Kind { Counting, Length, DlK, DlSum } kind_ = Kind::Counting;
  int k_ = 1;
};

}  // namespace noisynth
