#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noisynth/logreal.hpp"
#include "noisynth/rng.hpp"
#include "noisynth/value.hpp"

namespace noisynth {

// Noise source: a sampler over corrupted outputs paired with its exact
// probability mass function. The three string sources corrupt each output
// independently; a mixture first draws one component, then corrupts the
// whole vector with it.
//
// Config:
//   {"kind": "identity"}
//   {"kind": "n_substitution", "delta": 0.2, "alphabet": "abc"}
//       delta may also be an array (per string position)
//   {"kind": "one_delete", "delta": 0.1}
//   {"kind": "first_char_delete"}
//   {"kind": "mixture", "components":
//       [{"weight": 0.5, "model": {...}}, ...]}
class NoiseModel {
 public:
  static NoiseModel identity();
  static NoiseModel n_substitution(std::vector<double> delta,
                                   const std::string& alphabet_utf8);
  static NoiseModel n_substitution(double delta, const std::string& alphabet);
  static NoiseModel one_delete(double delta);
  static NoiseModel first_char_delete();
  static NoiseModel mixture(std::vector<std::pair<NoiseModel, double>> parts);

  static NoiseModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string describe() const;

  // Sample y from rho(. | z). Deterministic given the generator.
  std::vector<Value> corrupt(const std::vector<Value>& z, Rng& rng) const;

  // Exact rho(y | z).
  LogReal pmf(const std::vector<Value>& y, const std::vector<Value>& z) const;

  // Full support of rho(. | z) with probabilities, ordered by value
  // serialization. Errors when it would exceed `cap`.
  std::vector<std::pair<std::vector<Value>, double>> exhaustive_support(
      const std::vector<Value>& z, size_t cap = 100000) const;

 private:
  enum class Kind { Identity, NSub, OneDelete, FirstCharDelete, Mixture };
  Kind kind_ = Kind::Identity;
  std::vector<double> delta_;     // n_substitution: per position, cycled if 1
  std::u32string alphabet_;       // n_substitution
  double delete_delta_ = 0.0;     // one_delete
  std::vector<std::pair<NoiseModel, double>> components_;  // mixture

  double delta_at(size_t pos, size_t len) const;
  Value corrupt_one(const Value& z, Rng& rng) const;
  LogReal pmf_one(const Value& y, const Value& z) const;
  std::vector<std::pair<Value, double>> support_one(const Value& z,
                                                    size_t cap) const;
};

}  // namespace noisynth
