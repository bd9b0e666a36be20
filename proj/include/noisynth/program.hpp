#pragma once

#include <string>
#include <vector>

#include "noisynth/grammar.hpp"
#include "noisynth/value.hpp"

namespace noisynth {

// Parse tree over a grammar. A node is either
//   - a leaf derived through a terminal production (production >= 0,
//     terminal >= 0, no children),
//   - a leaf standing directly in a production's rhs terminal slot
//     (production == -1, terminal >= 0), or
//   - a function application (production >= 0, terminal == -1, one child per
//     rhs symbol).
// Terminal productions add neither height nor a parse-tree node of their
// own: height(leaf) = 0, height(node) = 1 + max over children.
struct Program {
  int production = -1;
  int terminal = -1;
  std::vector<Program> children;

  bool is_leaf() const { return terminal >= 0; }

  static Program leaf(int production, int terminal) {
    Program p;
    p.production = production;
    p.terminal = terminal;
    return p;
  }
  static Program direct_leaf(int terminal) {
    Program p;
    p.terminal = terminal;
    return p;
  }
  static Program node(int production, std::vector<Program> children) {
    Program p;
    p.production = production;
    p.children = std::move(children);
    return p;
  }

  int height() const {
    if (is_leaf()) return 0;
    int h = 0;
    for (const Program& c : children) h = std::max(h, c.height());
    return 1 + h;
  }

  friend bool operator==(const Program& a, const Program& b) {
    return a.production == b.production && a.terminal == b.terminal &&
           a.children == b.children;
  }
};

// Executes p on env: constants evaluate to themselves, variables to their
// binding, function nodes to the builtin applied to evaluated children.
Value evaluate(const Grammar& g, const Program& p, const InputEnv& env);

// Elementwise evaluate; errors are rethrown with the failing index.
std::vector<Value> evaluate_vec(const Grammar& g, const Program& p,
                                const std::vector<InputEnv>& inputs);

// Recursive node-cost sum: cost(terminal) at leaves, cost(builtin) plus the
// children's sums at function nodes. All costs 1 gives program size.
double complexity(const Grammar& g, const Program& p, const CostModel& costs);

std::string to_sexpr(const Grammar& g, const Program& p);

// Grammar-directed parse of a to_sexpr rendering. `symbol` is the expected
// root symbol; defaults to the start symbol.
Program parse_sexpr(const Grammar& g, const std::string& text);
Program parse_sexpr(const Grammar& g, const std::string& text,
                    const std::string& symbol);

// True when the tree conforms to the grammar rooted at `symbol`.
bool conforms(const Grammar& g, const Program& p, const std::string& symbol);

}  // namespace noisynth
