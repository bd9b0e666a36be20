#include "noisynth/program.hpp"

#include "noisynth/errors.hpp"

namespace noisynth {

namespace {

Value eval_terminal(const Grammar& g, int terminal, const InputEnv& env) {
  const Terminal& t = g.terminals[terminal];
  if (!t.is_var) return t.value;
  auto it = env.find(t.name);
  if (it == env.end()) throw EvalError("unbound variable: " + t.name);
  if (it->second.type() != t.type) {
    throw EvalError("variable " + t.name + " bound to " +
                    type_name(it->second.type()) + ", declared " +
                    type_name(t.type));
  }
  return it->second;
}

}  // namespace

Value evaluate(const Grammar& g, const Program& p, const InputEnv& env) {
  if (p.is_leaf()) return eval_terminal(g, p.terminal, env);
  const Production& prod = g.productions[p.production];
  const Builtin& b = builtin(prod.fn);
  std::vector<Value> args;
  args.reserve(p.children.size());
  for (const Program& c : p.children) args.push_back(evaluate(g, c, env));
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i].type() != b.arg_types[i]) {
      throw EvalError("type mismatch at " + to_sexpr(g, p) + ": argument " +
                      std::to_string(i + 1) + " of " + b.name + " is " +
                      type_name(args[i].type()) + ", expected " +
                      type_name(b.arg_types[i]));
    }
  }
  try {
    return b.apply(args);
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " at " + to_sexpr(g, p));
  }
}

std::vector<Value> evaluate_vec(const Grammar& g, const Program& p,
                                const std::vector<InputEnv>& inputs) {
  std::vector<Value> out;
  out.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    try {
      out.push_back(evaluate(g, p, inputs[i]));
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " (input index " +
                      std::to_string(i) + ")");
    }
  }
  return out;
}

double complexity(const Grammar& g, const Program& p, const CostModel& costs) {
  if (p.is_leaf()) return costs.terminal_cost(g, p.terminal);
  double total = costs.builtin_cost(g.productions[p.production].fn);
  for (const Program& c : p.children) total += complexity(g, c, costs);
  return total;
}

std::string to_sexpr(const Grammar& g, const Program& p) {
  if (p.is_leaf()) return g.terminals[p.terminal].repr();
  std::string out = "(" + g.productions[p.production].fn;
  for (const Program& c : p.children) {
    out += " ";
    out += to_sexpr(g, c);
  }
  out += ")";
  return out;
}

namespace {

struct Tokenizer {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return text[pos];
  }
  std::string next_atom() {
    skip_ws();
    size_t start = pos;
    if (text[pos] == '"') {
      ++pos;
      while (pos < text.size()) {
        if (text[pos] == '\\') {
          pos += 2;
        } else if (text[pos] == '"') {
          ++pos;
          break;
        } else {
          ++pos;
        }
      }
    } else {
      while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
             text[pos] != '(' && text[pos] != ')') {
        ++pos;
      }
    }
    if (pos == start) throw ConfigError("empty token in program text");
    return text.substr(start, pos - start);
  }
};

Program parse_at_symbol(const Grammar& g, Tokenizer& tok,
                        const std::string& symbol);

Program parse_leaf_token(const Grammar& g, const std::string& atom,
                         const std::string& symbol) {
  // At a nonterminal, the atom must render some terminal reachable through a
  // terminal production; at a terminal rhs slot, it must render that
  // terminal itself.
  int tidx = -1;
  if (g.is_nonterminal(symbol)) {
    int prod_idx = -1;
    for (int pi : g.productions_of(symbol)) {
      const Production& prod = g.productions[pi];
      if (prod.is_terminal && g.terminals[prod.terminal].repr() == atom) {
        prod_idx = pi;
        tidx = prod.terminal;
      }
    }
    if (prod_idx < 0) {
      throw ConfigError("token \"" + atom + "\" is not derivable from symbol " +
                        symbol);
    }
    return Program::leaf(prod_idx, tidx);
  }
  tidx = g.terminal_index(symbol);
  if (tidx < 0 || g.terminals[tidx].repr() != atom) {
    throw ConfigError("token \"" + atom + "\" does not match terminal slot " +
                      symbol);
  }
  return Program::direct_leaf(tidx);
}

Program parse_at_symbol(const Grammar& g, Tokenizer& tok,
                        const std::string& symbol) {
  if (tok.done()) throw ConfigError("unexpected end of program text");
  if (tok.peek() != '(') return parse_leaf_token(g, tok.next_atom(), symbol);

  ++tok.pos;  // consume '('
  std::string fn = tok.next_atom();
  if (!g.is_nonterminal(symbol)) {
    throw ConfigError("application (" + fn + " ...) cannot fill terminal slot " +
                      symbol);
  }
  // Several productions may share (lhs, fn) and differ in rhs terminals;
  // try them in order, rewinding on mismatch.
  size_t mark = tok.pos;
  std::string last_error;
  for (int pi : g.productions_of(symbol)) {
    const Production& prod = g.productions[pi];
    if (prod.is_terminal || prod.fn != fn) continue;
    tok.pos = mark;
    try {
      std::vector<Program> children;
      for (const std::string& rhs : prod.rhs) {
        children.push_back(parse_at_symbol(g, tok, rhs));
      }
      if (tok.done() || tok.peek() != ')') {
        throw ConfigError("expected ')' closing " + fn + " application");
      }
      ++tok.pos;
      return Program::node(pi, std::move(children));
    } catch (const ConfigError& e) {
      last_error = e.what();
    }
  }
  if (last_error.empty()) {
    throw ConfigError("no production " + symbol + " -> " + fn + "(...)");
  }
  throw ConfigError(last_error);
}

}  // namespace

Program parse_sexpr(const Grammar& g, const std::string& text,
                    const std::string& symbol) {
  Tokenizer tok{text};
  Program p = parse_at_symbol(g, tok, symbol);
  if (!tok.done()) {
    throw ConfigError("trailing text after program: " +
                      text.substr(tok.pos));
  }
  return p;
}

Program parse_sexpr(const Grammar& g, const std::string& text) {
  return parse_sexpr(g, text, g.start);
}

bool conforms(const Grammar& g, const Program& p, const std::string& symbol) {
  if (p.is_leaf()) {
    if (p.terminal < 0 || p.terminal >= static_cast<int>(g.terminals.size())) {
      return false;
    }
    if (p.production >= 0) {
      if (p.production >= static_cast<int>(g.productions.size())) return false;
      const Production& prod = g.productions[p.production];
      return prod.is_terminal && prod.terminal == p.terminal &&
             prod.lhs == symbol;
    }
    return g.terminals[p.terminal].name == symbol;
  }
  if (p.production < 0 || p.production >= static_cast<int>(g.productions.size())) {
    return false;
  }
  const Production& prod = g.productions[p.production];
  if (prod.is_terminal || prod.lhs != symbol) return false;
  if (prod.rhs.size() != p.children.size()) return false;
  for (size_t i = 0; i < p.children.size(); ++i) {
    if (!conforms(g, p.children[i], prod.rhs[i])) return false;
  }
  return true;
}

}  // namespace noisynth
