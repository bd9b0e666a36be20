#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noisynth/noise.hpp"
#include "noisynth/value.hpp"

namespace noisynth {

// Loss function catalog. Values are extended nonnegative reals (+inf allowed
// and absorbing); every loss depends only on the candidate outputs z and the
// noisy outputs y.
//
// Config:
//   {"kind": "zero_one"} | {"kind": "zero_infty"} | {"kind": "dl"} |
//   {"kind": "l_ab"} |
//   {"kind": "n_substitution", "delta": 0.2}   (delta may be an array)
//   {"kind": "one_delete", "delta": 0.1}
//   {"kind": "optimal", "noise": {...}}
//   {"kind": "mixture_optimal", "components":
//       [{"weight": 0.5, "noise": {...}}, ...]}
// Bare names are accepted for the parameterless kinds.
class LossFn {
 public:
  static LossFn zero_one();
  static LossFn zero_infty();
  static LossFn n_substitution(std::vector<double> delta);
  static LossFn n_substitution(double delta);
  static LossFn one_delete(double delta);
  static LossFn dl();
  static LossFn l_ab();
  static LossFn optimal(NoiseModel noise);
  static LossFn mixture_optimal(std::vector<std::pair<NoiseModel, double>>);

  static LossFn from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string describe() const;

  double eval(const std::vector<Value>& z, const std::vector<Value>& y) const;

 private:
  enum class Kind {
    ZeroOne,
    ZeroInfty,
    NSub,
    OneDelete,
    Dl,
    LAb,
    Optimal,
    MixtureOptimal
  };
  Kind kind_ = Kind::ZeroOne;
  std::vector<double> delta_;
  std::vector<std::pair<NoiseModel, double>> noises_;  // optimal/mixture

  double delta_at(size_t pos) const;
};

}  // namespace noisynth
