#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "noisynth/grammar.hpp"
#include "noisynth/logreal.hpp"
#include "noisynth/prior.hpp"
#include "noisynth/program.hpp"
#include "noisynth/value.hpp"

namespace noisynth {

// Values-indexed tree automaton over an input vector. States are
// (nonterminal, output-vector) pairs, hash-consed; terminal states are
// elided in favor of leaf transitions (terminal production applied to a
// state) and direct terminal arguments inside function transitions, so a
// program of height h corresponds to a derivation using transitions of
// height <= h.
class Fta {
 public:
  struct State {
    int symbol;                 // index into grammar nonterminals
    std::vector<Value> values;  // one entry per input
    int min_height;             // height of the smallest accepted program
  };

  // Function-transition argument: either another state or a terminal
  // standing directly in the production's rhs.
  struct ArgRef {
    bool is_state;
    int index;  // state index or terminal index
  };

  struct LeafTransition {
    int production;  // terminal production
    int dst;         // state index
  };

  struct Transition {
    int production;  // function production
    std::vector<ArgRef> args;
    int dst;
    int height;  // 1 + max over argument min-heights
  };

  // Least fixpoint of the construction rules restricted to states first
  // reachable at height <= d. Evaluation failures during closure (overflow,
  // type mismatch) skip the candidate and are recorded as diagnostics.
  static Fta build(const Grammar& g, const std::vector<InputEnv>& inputs,
                   int d);

  const Grammar& grammar() const { return *grammar_; }
  int depth() const { return depth_; }
  const std::vector<InputEnv>& inputs() const { return inputs_; }

  const std::vector<State>& states() const { return states_; }
  const std::vector<LeafTransition>& leaf_transitions() const {
    return leaf_transitions_;
  }
  const std::vector<Transition>& transitions() const { return transitions_; }

  // Accepting states (start symbol), ordered by value-vector serialization.
  const std::vector<int>& accepting() const { return accepting_; }
  bool is_accepting(int state) const;

  int find_state(int symbol, const std::vector<Value>& values) const;  // -1

  size_t skipped_candidates() const { return skipped_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  // Verification hook: permutes the stored transition lists. Weight and
  // extraction results must not depend on transition order.
  void shuffle_transitions(Rng& rng);

  nlohmann::json dump() const;
  nlohmann::json dump(const class StateWeightTable& weights) const;

 private:
  const Grammar* grammar_;
  int depth_ = 0;
  std::vector<InputEnv> inputs_;
  std::vector<State> states_;
  std::vector<LeafTransition> leaf_transitions_;
  std::vector<Transition> transitions_;
  std::vector<int> accepting_;
  size_t skipped_ = 0;
  std::vector<std::string> diagnostics_;

  struct StateKey {
    int symbol;
    size_t value_hash;
    bool operator==(const StateKey& o) const {
      return symbol == o.symbol && value_hash == o.value_hash;
    }
  };
  struct StateKeyHash {
    size_t operator()(const StateKey& k) const {
      return std::hash<size_t>{}(k.value_hash * 31 + k.symbol);
    }
  };
  std::unordered_map<StateKey, std::vector<int>, StateKeyHash> index_;

  int intern_state(int symbol, std::vector<Value> values, int height);
};

// w(q, m) for m = 0..d: total weight of programs of height <= m accepted at
// q, computed bottom-up from the grammar weights. Contributions are summed
// in a canonical order, so permuting the transition list does not change the
// result.
class StateWeightTable {
 public:
  StateWeightTable(const Fta& fta, const Prior& prior);

  LogReal weight(int state, int m) const;

  // log pi(q) = log w(q, d) - log sum over accepting states.
  double log_pi(int accepting_state) const;
  double pi(int accepting_state) const;

 private:
  const Fta* fta_;
  std::vector<std::vector<LogReal>> w_;  // [state][m]
  LogReal normalizer_;
};

// Minimum-complexity program accepted at `state`, by bottom-up dynamic
// programming over (state, height) with ties broken by the lexicographically
// smallest s-expression. Height-exact: only derivations of height <= d are
// considered.
Program extract_min_complexity(const Fta& fta, int state,
                               const CostModel& costs);

}  // namespace noisynth
