#pragma once

#include <string>
#include <vector>

#include "noisynth/fta.hpp"
#include "noisynth/grammar.hpp"
#include "noisynth/loss.hpp"
#include "noisynth/prior.hpp"
#include "noisynth/program.hpp"
#include "noisynth/value.hpp"

namespace noisynth {

struct SynthesisProblem {
  const Grammar* grammar = nullptr;
  int depth = 0;
  const Prior* prior = nullptr;
  const LossFn* loss = nullptr;
  const CostModel* costs = nullptr;
  std::vector<InputEnv> inputs;
  std::vector<Value> outputs;
};

struct SynthesisResult {
  Program program;
  double objective = 0;              // L(c, y) - log pi(q*)
  std::vector<Value> output_values;  // c = program[x]
  // Set when every candidate class scored +inf; the returned program is the
  // tie-break minimum and carries no information about the data.
  bool all_infinite = false;

  struct Diagnostics {
    size_t state_count = 0;
    size_t transition_count = 0;
    size_t skipped_candidates = 0;
    size_t class_count = 0;
    long long micros = 0;
  } diagnostics;
};

// Candidate objectives within a 1e-12 relative band count as tied, and ties
// go to the smaller value-vector serialization; the in-class pick then
// minimizes (cost, s-expression). The oracle applies the identical rule, so
// the two paths are comparable program-for-program.
bool objective_close(double a, double b);

// Algorithm: build the FTA over the inputs, score every accepting state with
// L(c, y) - log pi, take the minimum, and extract the minimum-complexity
// program it accepts.
SynthesisResult synthesize(const SynthesisProblem& problem);

// Independent reference: enumerate every program of height <= depth, group
// by output vector, score classes by summed weight, and minimize with the
// same tie-breaks. Errors when the space exceeds `cap`.
SynthesisResult oracle_synthesize(const SynthesisProblem& problem,
                                  size_t cap = 1'000'000);

}  // namespace noisynth
