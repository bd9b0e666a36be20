#pragma once

#include <vector>

#include "noisynth/enumerate.hpp"
#include "noisynth/grammar.hpp"
#include "noisynth/logreal.hpp"
#include "noisynth/program.hpp"
#include "noisynth/rng.hpp"

namespace noisynth {

// Prior distribution over programs of height <= d: normalized grammar
// weights. The normalizer is computed by a symbol-by-height recursion in log
// space (no enumeration); exact enumeration backs the sampler.
class Prior {
 public:
  Prior(const Grammar& g, int d, size_t sampler_cap = 2'000'000);

  const Grammar& grammar() const { return *grammar_; }
  int depth() const { return depth_; }

  // Sum of w(s0, p) over all programs of height <= d.
  LogReal total_weight() const { return total_; }

  // Product of w_G over the terminals and productions in p's derivation.
  LogReal program_weight(const Program& p) const;

  double rho_p(const Program& p) const;      // errors when height > d
  double log_rho_p(const Program& p) const;  // log of the above

  // Exact sampling: cumulative table over the full enumeration. Deterministic
  // given the generator state.
  const Program& sample(Rng& rng) const;

  // The enumeration backing the sampler (height <= d, canonical order).
  const std::vector<Program>& programs() const;

 private:
  const Grammar* grammar_;
  int depth_;
  LogReal total_;
  std::vector<Program> programs_;
  std::vector<double> cumulative_;  // normalized cumulative weights
  bool sampler_ready_ = false;
};

}  // namespace noisynth
