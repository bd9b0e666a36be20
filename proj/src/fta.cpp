#include "noisynth/fta.hpp"

#include <algorithm>

#include "noisynth/errors.hpp"

namespace noisynth {

int Fta::intern_state(int symbol, std::vector<Value> values, int height) {
  StateKey key{symbol, hash_values(values)};
  auto& bucket = index_[key];
  for (int idx : bucket) {
    if (states_[idx].symbol == symbol && states_[idx].values == values) {
      return idx;
    }
  }
  int idx = static_cast<int>(states_.size());
  states_.push_back(State{symbol, std::move(values), height});
  bucket.push_back(idx);
  return idx;
}

Fta Fta::build(const Grammar& g, const std::vector<InputEnv>& inputs, int d) {
  if (inputs.empty()) throw ConfigError("FTA requires at least one input");
  if (d < 0) throw ConfigError("FTA height bound must be >= 0");
  for (const std::string& var : g.variables()) {
    for (size_t i = 0; i < inputs.size(); ++i) {
      if (!inputs[i].count(var)) {
        throw ConfigError("input " + std::to_string(i) +
                          " does not bind variable " + var);
      }
    }
  }

  Fta fta;
  fta.grammar_ = &g;
  fta.depth_ = d;
  fta.inputs_ = inputs;

  auto record_skip = [&fta](const std::string& what) {
    ++fta.skipped_;
    if (fta.diagnostics_.size() < 32) fta.diagnostics_.push_back(what);
  };

  // Term rule: one state per terminal production, from the terminal's values.
  for (size_t pi = 0; pi < g.productions.size(); ++pi) {
    const Production& prod = g.productions[pi];
    if (!prod.is_terminal) continue;
    const Terminal& t = g.terminals[prod.terminal];
    std::vector<Value> values;
    values.reserve(inputs.size());
    bool ok = true;
    for (const InputEnv& env : inputs) {
      if (t.is_var) {
        auto it = env.find(t.name);
        if (it->second.type() != t.type) {
          record_skip("variable " + t.name + " bound to wrong type");
          ok = false;
          break;
        }
        values.push_back(it->second);
      } else {
        values.push_back(t.value);
      }
    }
    if (!ok) continue;
    int dst = fta.intern_state(g.nonterminal_index(prod.lhs),
                               std::move(values), 0);
    fta.leaf_transitions_.push_back(
        LeafTransition{static_cast<int>(pi), dst});
  }

  // Prod rule, level by level: at level m every argument tuple whose height
  // is exactly m yields a transition (and possibly a new state).
  std::vector<Value> column(inputs.size());
  for (int m = 1; m <= d; ++m) {
    size_t existing_states = fta.states_.size();
    for (size_t pi = 0; pi < g.productions.size(); ++pi) {
      const Production& prod = g.productions[pi];
      if (prod.is_terminal) continue;
      const Builtin& fn = builtin(prod.fn);

      struct Slot {
        bool is_terminal;
        int terminal;
        std::vector<int> state_choices;  // states with matching symbol
      };
      std::vector<Slot> slots;
      bool feasible = true;
      bool has_nonterminal = false;
      for (const std::string& rhs : prod.rhs) {
        Slot slot;
        if (g.is_nonterminal(rhs)) {
          slot.is_terminal = false;
          slot.terminal = -1;
          has_nonterminal = true;
          int sym = g.nonterminal_index(rhs);
          for (size_t si = 0; si < existing_states; ++si) {
            if (fta.states_[si].symbol == sym &&
                fta.states_[si].min_height <= m - 1) {
              slot.state_choices.push_back(static_cast<int>(si));
            }
          }
          if (slot.state_choices.empty()) feasible = false;
        } else {
          slot.is_terminal = true;
          slot.terminal = g.terminal_index(rhs);
        }
        slots.push_back(std::move(slot));
      }
      if (!feasible) continue;
      if (!has_nonterminal && m != 1) continue;  // all-terminal tuples: height 1

      std::vector<ArgRef> args(slots.size());
      auto emit = [&]() {
        // Evaluate the production columnwise; skip on evaluation errors.
        std::vector<Value> arg_values(slots.size());
        for (size_t j = 0; j < inputs.size(); ++j) {
          for (size_t a = 0; a < slots.size(); ++a) {
            const Value& v = args[a].is_state
                                 ? fta.states_[args[a].index].values[j]
                                 : (g.terminals[args[a].index].is_var
                                        ? inputs[j].at(g.terminals[args[a].index].name)
                                        : g.terminals[args[a].index].value);
            if (v.type() != fn.arg_types[a]) {
              record_skip("type mismatch applying " + prod.fn);
              return;
            }
            arg_values[a] = v;
          }
          try {
            column[j] = fn.apply(arg_values);
          } catch (const EvalError& e) {
            record_skip(e.what());
            return;
          }
        }
        int dst = fta.intern_state(g.nonterminal_index(prod.lhs), column, m);
        fta.transitions_.push_back(
            Transition{static_cast<int>(pi), args, dst, m});
      };

      auto recurse = [&](auto&& self, size_t a, int max_h) -> void {
        if (a == slots.size()) {
          if (!has_nonterminal || max_h == m - 1) emit();
          return;
        }
        const Slot& s = slots[a];
        if (s.is_terminal) {
          args[a] = ArgRef{false, s.terminal};
          self(self, a + 1, max_h);
          return;
        }
        for (int si : s.state_choices) {
          args[a] = ArgRef{true, si};
          self(self, a + 1, std::max(max_h, fta.states_[si].min_height));
        }
      };
      recurse(recurse, 0, 0);
    }
  }

  int start_sym = g.nonterminal_index(g.start);
  for (size_t si = 0; si < fta.states_.size(); ++si) {
    if (fta.states_[si].symbol == start_sym) {
      fta.accepting_.push_back(static_cast<int>(si));
    }
  }
  std::sort(fta.accepting_.begin(), fta.accepting_.end(), [&](int a, int b) {
    return repr(fta.states_[a].values) < repr(fta.states_[b].values);
  });
  return fta;
}

void Fta::shuffle_transitions(Rng& rng) {
  for (size_t i = transitions_.size(); i > 1; --i) {
    std::swap(transitions_[i - 1], transitions_[rng.uniform_below(i)]);
  }
  for (size_t i = leaf_transitions_.size(); i > 1; --i) {
    std::swap(leaf_transitions_[i - 1], leaf_transitions_[rng.uniform_below(i)]);
  }
}

bool Fta::is_accepting(int state) const {
  return states_[state].symbol == grammar_->nonterminal_index(grammar_->start);
}

int Fta::find_state(int symbol, const std::vector<Value>& values) const {
  StateKey key{symbol, hash_values(values)};
  auto it = index_.find(key);
  if (it == index_.end()) return -1;
  for (int idx : it->second) {
    if (states_[idx].symbol == symbol && states_[idx].values == values) {
      return idx;
    }
  }
  return -1;
}

namespace {

nlohmann::json dump_fta(const Fta& fta, const StateWeightTable* weights) {
  const Grammar& g = fta.grammar();
  nlohmann::json j;
  j["depth"] = fta.depth();
  j["inputs"] = nlohmann::json::array();
  for (const InputEnv& env : fta.inputs()) j["inputs"].push_back(env_to_json(env));
  j["states"] = nlohmann::json::array();
  for (size_t i = 0; i < fta.states().size(); ++i) {
    const Fta::State& s = fta.states()[i];
    nlohmann::json sj;
    sj["id"] = i;
    sj["symbol"] = g.nonterminals[s.symbol];
    sj["values"] = values_to_json(s.values);
    sj["min_height"] = s.min_height;
    sj["accepting"] = fta.is_accepting(static_cast<int>(i));
    if (weights && fta.is_accepting(static_cast<int>(i))) {
      sj["pi"] = weights->pi(static_cast<int>(i));
    }
    j["states"].push_back(sj);
  }
  j["leaf_transitions"] = nlohmann::json::array();
  for (const auto& lt : fta.leaf_transitions()) {
    nlohmann::json tj;
    tj["terminal"] = g.terminals[g.productions[lt.production].terminal].repr();
    tj["dst"] = lt.dst;
    j["leaf_transitions"].push_back(tj);
  }
  j["transitions"] = nlohmann::json::array();
  for (const auto& tr : fta.transitions()) {
    nlohmann::json tj;
    tj["fn"] = g.productions[tr.production].fn;
    tj["args"] = nlohmann::json::array();
    for (const auto& arg : tr.args) {
      if (arg.is_state) {
        tj["args"].push_back(nlohmann::json{{"state", arg.index}});
      } else {
        tj["args"].push_back(
            nlohmann::json{{"terminal", g.terminals[arg.index].repr()}});
      }
    }
    tj["dst"] = tr.dst;
    tj["height"] = tr.height;
    j["transitions"].push_back(tj);
  }
  j["skipped_candidates"] = fta.skipped_candidates();
  return j;
}

}  // namespace

nlohmann::json Fta::dump() const { return dump_fta(*this, nullptr); }

nlohmann::json Fta::dump(const StateWeightTable& weights) const {
  return dump_fta(*this, &weights);
}

StateWeightTable::StateWeightTable(const Fta& fta, const Prior& prior)
    : fta_(&fta) {
  const Grammar& g = fta.grammar();
  if (&prior.grammar() != &g) {
    throw ConfigError("weight table: prior built for a different grammar");
  }
  if (prior.depth() != fta.depth()) {
    throw ConfigError("weight table: prior depth differs from FTA depth");
  }
  int d = fta.depth();
  size_t n = fta.states().size();
  w_.assign(n, std::vector<LogReal>(d + 1, LogReal::zero()));

  // Leaf contributions, grouped per state in canonical (production) order.
  std::vector<LogReal> leaf_sum(n, LogReal::zero());
  {
    auto leafs = fta.leaf_transitions();
    std::sort(leafs.begin(), leafs.end(),
              [](const Fta::LeafTransition& a, const Fta::LeafTransition& b) {
                return a.production < b.production;
              });
    for (const auto& lt : leafs) {
      const Production& prod = g.productions[lt.production];
      leaf_sum[lt.dst] +=
          LogReal::from_linear(g.terminals[prod.terminal].weight);
    }
  }

  // Incoming function transitions per state, in canonical order.
  std::vector<std::vector<const Fta::Transition*>> incoming(n);
  for (const auto& tr : fta.transitions()) incoming[tr.dst].push_back(&tr);
  for (auto& list : incoming) {
    std::sort(list.begin(), list.end(),
              [](const Fta::Transition* a, const Fta::Transition* b) {
                if (a->production != b->production) {
                  return a->production < b->production;
                }
                for (size_t i = 0; i < a->args.size(); ++i) {
                  if (a->args[i].is_state != b->args[i].is_state) {
                    return a->args[i].is_state < b->args[i].is_state;
                  }
                  if (a->args[i].index != b->args[i].index) {
                    return a->args[i].index < b->args[i].index;
                  }
                }
                return false;
              });
  }

  for (size_t q = 0; q < n; ++q) w_[q][0] = leaf_sum[q];
  for (int m = 1; m <= d; ++m) {
    for (size_t q = 0; q < n; ++q) {
      LogReal total = leaf_sum[q];
      for (const Fta::Transition* tr : incoming[q]) {
        LogReal term = LogReal::from_linear(g.productions[tr->production].weight);
        for (const Fta::ArgRef& arg : tr->args) {
          if (arg.is_state) {
            term *= w_[arg.index][m - 1];
          } else {
            term *= LogReal::from_linear(g.terminals[arg.index].weight);
          }
        }
        total += term;
      }
      w_[q][m] = total;
    }
  }

  // Normalizer over accepting states; fta.accepting() is already in
  // canonical order.
  normalizer_ = LogReal::zero();
  for (int q : fta.accepting()) normalizer_ += w_[q][d];
}

LogReal StateWeightTable::weight(int state, int m) const {
  return w_[state][m];
}

double StateWeightTable::log_pi(int state) const {
  if (!fta_->is_accepting(state)) {
    throw ConfigError("pi is defined on accepting states only");
  }
  return w_[state][fta_->depth()].log() - normalizer_.log();
}

double StateWeightTable::pi(int state) const {
  return std::exp(log_pi(state));
}

Program extract_min_complexity(const Fta& fta, int state,
                               const CostModel& costs) {
  const Grammar& g = fta.grammar();
  int d = fta.depth();
  size_t n = fta.states().size();

  struct Best {
    double cost = kInfinity;
    std::string sexpr;
    Program program;
    bool valid = false;
  };
  // best[q] is maintained per level: entering level m it holds the optimum
  // over derivations of height <= m-1.
  std::vector<Best> best(n);

  auto better = [](double cost, const std::string& sexpr, const Best& cur) {
    if (!cur.valid) return true;
    if (cost != cur.cost) return cost < cur.cost;
    return sexpr < cur.sexpr;
  };

  // Height 0: leaf transitions.
  for (const auto& lt : fta.leaf_transitions()) {
    const Production& prod = g.productions[lt.production];
    double c = costs.terminal_cost(g, prod.terminal);
    std::string s = g.terminals[prod.terminal].repr();
    if (better(c, s, best[lt.dst])) {
      best[lt.dst] = Best{c, s, Program::leaf(lt.production, prod.terminal),
                          true};
    }
  }

  for (int m = 1; m <= d; ++m) {
    // Snapshot so that this level only consumes height <= m-1 optima.
    std::vector<Best> prev = best;
    for (const auto& tr : fta.transitions()) {
      const Production& prod = g.productions[tr.production];
      double cost = costs.builtin_cost(prod.fn);
      std::string sexpr = "(" + prod.fn;
      std::vector<Program> children;
      children.reserve(tr.args.size());
      bool ok = true;
      for (const Fta::ArgRef& arg : tr.args) {
        if (arg.is_state) {
          const Best& b = prev[arg.index];
          if (!b.valid) {
            ok = false;
            break;
          }
          cost += b.cost;
          sexpr += " " + b.sexpr;
          children.push_back(b.program);
        } else {
          cost += costs.terminal_cost(g, arg.index);
          sexpr += " " + g.terminals[arg.index].repr();
          children.push_back(Program::direct_leaf(arg.index));
        }
      }
      if (!ok) continue;
      sexpr += ")";
      if (better(cost, sexpr, best[tr.dst])) {
        best[tr.dst] =
            Best{cost, sexpr, Program::node(tr.production, std::move(children)),
                 true};
      }
    }
  }

  if (!best[state].valid) {
    throw ConfigError("state accepts no program within the height bound");
  }
  return best[state].program;
}

}  // namespace noisynth
