#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisynth/distances.hpp"
#include "noisynth/grammar.hpp"
#include "noisynth/input_source.hpp"
#include "noisynth/loss.hpp"
#include "noisynth/noise.hpp"
#include "noisynth/prior.hpp"
#include "noisynth/program.hpp"
#include "noisynth/synthesizer.hpp"

namespace noisynth {

struct WilsonInterval {
  double lo = 0;
  double hi = 1;
};

// 95% Wilson score interval; valid at small counts.
WilsonInterval wilson95(int successes, int trials);

// Program equivalence, decided exhaustively when the input source's support
// is small enough and otherwise on a fixed probe set drawn from the source
// with an audit seed (an approximation, flagged in report metadata).
class EquivalenceChecker {
 public:
  EquivalenceChecker(const Grammar& g, const InputSource& source,
                     size_t probe_size, uint64_t audit_seed,
                     size_t max_exhaustive = 512);

  bool equivalent(const Program& a, const Program& b) const;
  // Canonical rendering of a program's behaviour on the probe inputs.
  std::string signature(const Program& p) const;

  bool exhaustive() const { return exhaustive_; }
  size_t probe_count() const { return probes_.size(); }

 private:
  const Grammar* grammar_;
  std::vector<InputEnv> probes_;
  bool exhaustive_ = false;
};

struct Dataset {
  Program hidden;
  std::vector<InputEnv> inputs;
  std::vector<Value> clean;  // hidden[x]
  std::vector<Value> noisy;  // sampled from the noise source
};

// One draw of the generative process: hidden program from the prior (unless
// fixed), i.i.d. inputs, clean outputs, then noise. Fully determined by
// `seed`.
Dataset generate_dataset(const Prior& prior, const InputSource& source,
                         const NoiseModel& noise, int n, uint64_t seed,
                         const Program* fixed_hidden = nullptr);

struct ExperimentConfig {
  Grammar grammar;
  int depth = 2;
  InputSource input_source;
  NoiseModel noise;
  LossFn loss;
  CostModel costs;
  std::vector<int> n_grid;
  int trials = 100;
  uint64_t seed = 0;
  std::optional<Program> hidden;  // fixed hidden program
  // Worst-case mode: estimate a curve per program-equivalence class and
  // report the minimum at every n (per-class curves go to metadata).
  bool worst_case = false;
  size_t probe_size = 1000;
  std::string label;

  // Paths inside the config resolve relative to `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::string& base_dir);
  static ExperimentConfig load(const std::string& path);
};

struct ConvergenceRow {
  int n = 0;
  int trials = 0;
  int successes = 0;
  int errors = 0;  // aborted trials, reported separately from failures
  double p_hat = 0;
  double ci_lo = 0;
  double ci_hi = 1;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  nlohmann::json metadata;
};

// Convergence estimate over the n grid. A trial succeeds when the
// synthesized program carries information (not the all-infinite fallback)
// and is equivalent to the hidden program. Trials derive their seeds from
// (seed, n, trial), so results do not depend on `jobs`.
ConvergenceReport estimate_convergence(const ExperimentConfig& config,
                                       int jobs = 1);

struct DiffEstimate {
  int trials = 0;
  int successes = 0;
  double p_hat = 0;
  double ci_lo = 0;
  double ci_hi = 1;
};

// Monte-Carlo estimate that a sampled input vector of size n separates the
// hidden program from every inequivalent program by more than epsilon.
// Whether a rival counts as inequivalent is decided over the full input
// domain: `equivalence_source` (the sampling source when null) supplies that
// domain, which matters when the sampler deliberately avoids separating
// inputs.
DiffEstimate check_input_differentiating(
    const Grammar& g, int d, const InputSource& source,
    const DistanceFn& distance, const Program& hidden, int n, double epsilon,
    int trials, uint64_t seed, const InputSource* equivalence_source = nullptr,
    size_t enumeration_cap = 1'000'000);

// Monte-Carlo estimate of the differentiating-noise predicate: over noisy
// draws y | z_h, every candidate output vector z in G[x] with loss gap
// L(z, y) - L(z_h, y) <= gamma stays within distance epsilon of z_h.
// Candidates are the automaton's accepting classes (program outputs), and
// the gap convention is inf - inf = 0.
DiffEstimate check_noise_differentiating(
    const Grammar& g, int d, const std::vector<InputEnv>& inputs,
    const NoiseModel& noise, const LossFn& loss, const DistanceFn& distance,
    const std::vector<Value>& z_h, double gamma, double epsilon, int trials,
    uint64_t seed);

// Exact posterior mass of output class c given (x, y): prior class mass
// times noise likelihood, normalized over all classes. Errors when y is
// unreachable from every class.
double expected_reward(const Grammar& g, int d, const Prior& prior,
                       const NoiseModel& noise,
                       const std::vector<InputEnv>& inputs,
                       const std::vector<Value>& y,
                       const std::vector<Value>& c);

// CSV with header n,trials,successes,p_hat,ci_lo,ci_hi; metadata goes to a
// .meta.json sidecar when written to disk.
std::string report_csv(const ConvergenceReport& report);
ConvergenceReport parse_report_csv(const std::string& csv);
void export_report(const ConvergenceReport& report, const std::string& path);

}  // namespace noisynth
