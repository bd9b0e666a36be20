#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisynth/value.hpp"

namespace noisynth {

// Built-in function: fixed name, arity, and type signature. Applications are
// checked at evaluation time; integer arithmetic is overflow-checked.
struct Builtin {
  std::string name;
  std::vector<ValueType> arg_types;
  ValueType result_type;
  std::function<Value(const std::vector<Value>&)> apply;
};

const Builtin& builtin(const std::string& name);
bool is_builtin(const std::string& name);

// Terminal symbol: either an input variable (value comes from the
// environment) or a constant.
struct Terminal {
  std::string name;
  bool is_var = false;
  Value value;          // constants only
  ValueType type = ValueType::Int;
  double weight = 1.0;  // w_G(t), strictly positive
  double cost = 1.0;

  // Rendering used in s-expressions: variables by name, constants by value.
  std::string repr() const { return is_var ? name : value.repr(); }
};

// Production rule. Two forms:
//   terminal production   lhs -> t            (is_terminal, terminal set)
//   function production   lhs -> f(rhs...)    (fn set, rhs symbol names)
// rhs entries may name nonterminals or terminals; a terminal in rhs position
// is a fixed leaf argument. Terminal productions carry no weight of their
// own; the terminal's weight applies.
struct Production {
  std::string lhs;
  bool is_terminal = false;
  int terminal = -1;             // index into Grammar::terminals
  std::string fn;                // builtin name (function productions)
  std::vector<std::string> rhs;  // symbol names (function productions)
  double weight = 1.0;           // w_G(pd), function productions only

  std::string id() const {
    return lhs + (is_terminal ? ":t" + std::to_string(terminal) : ":" + fn);
  }
};

// Weighted DSL grammar. Immutable after construction; shared freely.
class Grammar {
 public:
  std::string name;
  std::vector<Terminal> terminals;
  std::vector<std::string> nonterminals;
  std::vector<Production> productions;
  std::string start;
  std::map<std::string, double> builtin_costs;  // by builtin name, default 1

  static Grammar from_json(const nlohmann::json& j);
  static Grammar load(const std::string& path);
  nlohmann::json to_json() const;

  int terminal_index(const std::string& name) const;  // -1 when absent
  bool is_nonterminal(const std::string& name) const;
  int start_symbol() const { return nonterminal_index(start); }
  int nonterminal_index(const std::string& name) const;  // -1 when absent

  // Production indices with the given lhs, in file order.
  const std::vector<int>& productions_of(const std::string& lhs) const;
  // First function production (lhs, fn); -1 when absent. Grammars may carry
  // several such productions differing in rhs.
  int production_for(const std::string& lhs, const std::string& fn) const;

  // Names of variable terminals; every input environment must bind them all.
  std::vector<std::string> variables() const;

  double builtin_cost(const std::string& fn) const;

 private:
  void validate() const;
  void build_indexes();

  std::map<std::string, int> terminal_by_name_;
  std::map<std::string, int> nonterminal_by_name_;
  std::map<std::string, std::vector<int>> productions_by_lhs_;
};

// Complexity cost table keyed by terminal and builtin name. Loaders always
// produce complete tables; lookups on missing entries are an error.
class CostModel {
 public:
  CostModel() = default;

  // All costs 1: the Size measure.
  static CostModel size_costs(const Grammar& g);
  // File costs (grammar "costs" field or a separate JSON object) layered
  // over the all-ones default.
  static CostModel from_json(const Grammar& g, const nlohmann::json& j);

  double terminal_cost(const Grammar& g, int terminal) const;
  double builtin_cost(const std::string& fn) const;

  nlohmann::json to_json() const;

 private:
  std::map<std::string, double> by_name_;
};

}  // namespace noisynth
