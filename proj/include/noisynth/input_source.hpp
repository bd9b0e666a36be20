#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisynth/rng.hpp"
#include "noisynth/value.hpp"

namespace noisynth {

// Input source: i.i.d. sampler over input environments.
//
// Config:
//   {"kind": "int_uniform", "var": "x", "lo": 0, "hi": 9}
//   {"kind": "str_random", "var": "x", "alphabet": "abc",
//    "min_len": 0, "max_len": 4}
//   {"kind": "bool_bernoulli", "var": "b", "p": 1.0}
//   {"kind": "categorical", "envs": [{...}, ...], "probs": [...]}  (probs
//    optional, default uniform)
//   {"kind": "product", "components": [...]}   (one component per variable)
class InputSource {
 public:
  static InputSource from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  InputEnv sample(Rng& rng) const;

  // Variables this source binds.
  std::vector<std::string> variables() const;

  // The positive-probability environments when enumerable within `cap`;
  // nullopt otherwise. Deterministic order.
  std::optional<std::vector<InputEnv>> support(size_t cap = 4096) const;

 private:
  enum class Kind { IntUniform, StrRandom, BoolBernoulli, Categorical, Product };
  Kind kind_ = Kind::IntUniform;
  std::string var_;
  int64_t lo_ = 0, hi_ = 0;            // int_uniform
  std::u32string alphabet_;            // str_random
  int min_len_ = 0, max_len_ = 0;      // str_random
  double p_ = 0.5;                     // bool_bernoulli
  std::vector<InputEnv> envs_;         // categorical
  std::vector<double> probs_;          // categorical (normalized)
  std::vector<InputSource> components_;  // product
};

}  // namespace noisynth
