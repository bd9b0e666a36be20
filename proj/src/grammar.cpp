#include "noisynth/grammar.hpp"

#include <fstream>
#include <set>

#include "noisynth/errors.hpp"

namespace noisynth {

namespace {

Value checked_add(const std::vector<Value>& args) {
  int64_t r;
  if (__builtin_add_overflow(args[0].as_int(), args[1].as_int(), &r)) {
    throw EvalError("integer overflow in add");
  }
  return Value(r);
}

Value checked_mul(const std::vector<Value>& args) {
  int64_t r;
  if (__builtin_mul_overflow(args[0].as_int(), args[1].as_int(), &r)) {
    throw EvalError("integer overflow in mul");
  }
  return Value(r);
}

const std::vector<Builtin>& builtin_table() {
  static const std::vector<Builtin> table = {
      {"add", {ValueType::Int, ValueType::Int}, ValueType::Int, checked_add},
      {"mul", {ValueType::Int, ValueType::Int}, ValueType::Int, checked_mul},
      {"concat",
       {ValueType::Str, ValueType::Str},
       ValueType::Str,
       [](const std::vector<Value>& args) {
         return Value(args[0].as_str() + args[1].as_str());
       }},
      {"ite",
       {ValueType::Bool, ValueType::Str, ValueType::Str},
       ValueType::Str,
       [](const std::vector<Value>& args) {
         return args[0].as_bool() ? args[1] : args[2];
       }},
  };
  return table;
}

}  // namespace

const Builtin& builtin(const std::string& name) {
  for (const Builtin& b : builtin_table()) {
    if (b.name == name) return b;
  }
  throw ConfigError("unknown builtin: " + name);
}

bool is_builtin(const std::string& name) {
  for (const Builtin& b : builtin_table()) {
    if (b.name == name) return true;
  }
  return false;
}

Grammar Grammar::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grammar must be a JSON object");
  Grammar g;
  g.name = j.value("name", std::string{});

  if (!j.contains("terminals") || !j["terminals"].is_array()) {
    throw ConfigError("grammar requires a \"terminals\" array");
  }
  for (const auto& t : j["terminals"]) {
    Terminal term;
    term.name = t.at("name").get<std::string>();
    std::string kind = t.at("kind").get<std::string>();
    if (kind == "var") {
      term.is_var = true;
      std::string ty = t.at("type").get<std::string>();
      if (ty == "int") {
        term.type = ValueType::Int;
      } else if (ty == "bool") {
        term.type = ValueType::Bool;
      } else if (ty == "str") {
        term.type = ValueType::Str;
      } else {
        throw ConfigError("terminal " + term.name + ": unknown type " + ty);
      }
    } else if (kind == "const") {
      term.value = Value::from_json(t.at("value"));
      term.type = term.value.type();
    } else {
      throw ConfigError("terminal " + term.name + ": kind must be var|const");
    }
    g.terminals.push_back(std::move(term));
  }

  if (!j.contains("nonterminals") || !j["nonterminals"].is_array()) {
    throw ConfigError("grammar requires a \"nonterminals\" array");
  }
  for (const auto& n : j["nonterminals"]) {
    g.nonterminals.push_back(n.get<std::string>());
  }
  g.start = j.at("start").get<std::string>();

  if (!j.contains("productions") || !j["productions"].is_array()) {
    throw ConfigError("grammar requires a \"productions\" array");
  }
  for (const auto& p : j["productions"]) {
    Production prod;
    prod.lhs = p.at("lhs").get<std::string>();
    if (p.contains("terminal")) {
      prod.is_terminal = true;
      std::string tname = p["terminal"].get<std::string>();
      prod.terminal = -1;
      for (size_t i = 0; i < g.terminals.size(); ++i) {
        if (g.terminals[i].name == tname) prod.terminal = static_cast<int>(i);
      }
      if (prod.terminal < 0) {
        throw ConfigError("production " + prod.lhs +
                          " references unknown terminal " + tname);
      }
    } else {
      prod.fn = p.at("fn").get<std::string>();
      if (!p.contains("rhs") || !p["rhs"].is_array()) {
        throw ConfigError("production " + prod.lhs + ":" + prod.fn +
                          " requires an \"rhs\" array");
      }
      for (const auto& s : p["rhs"]) prod.rhs.push_back(s.get<std::string>());
      // Inline weight; the top-level "weights" map can still override by
      // lhs:fn (then it applies to every production sharing that pair).
      prod.weight = p.value("weight", 1.0);
    }
    g.productions.push_back(std::move(prod));
  }

  // Weights: keyed by terminal name or "lhs:fn" production id; default 1.
  if (j.contains("weights")) {
    for (auto it = j["weights"].begin(); it != j["weights"].end(); ++it) {
      double w = it.value().get<double>();
      std::string key = it.key();
      bool found = false;
      for (auto& t : g.terminals) {
        if (t.name == key) {
          t.weight = w;
          found = true;
        }
      }
      auto colon = key.find(':');
      if (!found && colon != std::string::npos) {
        std::string lhs = key.substr(0, colon);
        std::string fn = key.substr(colon + 1);
        for (auto& p : g.productions) {
          if (!p.is_terminal && p.lhs == lhs && p.fn == fn) {
            p.weight = w;
            found = true;
          }
        }
      }
      if (!found) {
        throw ConfigError("weight key matches no terminal or production: " +
                          key);
      }
    }
  }

  // Costs: keyed by terminal name or builtin name; default 1.
  if (j.contains("costs")) {
    for (auto it = j["costs"].begin(); it != j["costs"].end(); ++it) {
      double c = it.value().get<double>();
      std::string key = it.key();
      bool found = false;
      for (auto& t : g.terminals) {
        if (t.name == key) {
          t.cost = c;
          found = true;
        }
      }
      if (!found && is_builtin(key)) {
        g.builtin_costs[key] = c;
        found = true;
      }
      if (!found) {
        throw ConfigError("cost key matches no terminal or builtin: " + key);
      }
    }
  }

  g.build_indexes();
  g.validate();
  return g;
}

Grammar Grammar::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grammar file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("grammar file " + path + ": " + e.what());
  }
  Grammar g = from_json(j);
  if (g.name.empty()) g.name = path;
  return g;
}

nlohmann::json Grammar::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["terminals"] = nlohmann::json::array();
  for (const auto& t : terminals) {
    nlohmann::json tj;
    tj["name"] = t.name;
    tj["kind"] = t.is_var ? "var" : "const";
    if (t.is_var) {
      tj["type"] = type_name(t.type);
    } else {
      tj["value"] = t.value.to_json();
    }
    j["terminals"].push_back(tj);
  }
  j["nonterminals"] = nonterminals;
  j["start"] = start;
  j["productions"] = nlohmann::json::array();
  for (const auto& p : productions) {
    nlohmann::json pj;
    pj["lhs"] = p.lhs;
    if (p.is_terminal) {
      pj["terminal"] = terminals[p.terminal].name;
    } else {
      pj["fn"] = p.fn;
      pj["rhs"] = p.rhs;
    }
    j["productions"].push_back(pj);
  }
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& t : terminals) {
    if (t.weight != 1.0) weights[t.name] = t.weight;
  }
  for (const auto& p : productions) {
    if (!p.is_terminal && p.weight != 1.0) weights[p.lhs + ":" + p.fn] = p.weight;
  }
  if (!weights.empty()) j["weights"] = weights;
  nlohmann::json costs = nlohmann::json::object();
  for (const auto& t : terminals) {
    if (t.cost != 1.0) costs[t.name] = t.cost;
  }
  for (const auto& [fn, c] : builtin_costs) costs[fn] = c;
  if (!costs.empty()) j["costs"] = costs;
  return j;
}

int Grammar::terminal_index(const std::string& n) const {
  auto it = terminal_by_name_.find(n);
  return it == terminal_by_name_.end() ? -1 : it->second;
}

bool Grammar::is_nonterminal(const std::string& n) const {
  return nonterminal_by_name_.count(n) > 0;
}

int Grammar::nonterminal_index(const std::string& n) const {
  auto it = nonterminal_by_name_.find(n);
  return it == nonterminal_by_name_.end() ? -1 : it->second;
}

const std::vector<int>& Grammar::productions_of(const std::string& lhs) const {
  static const std::vector<int> empty;
  auto it = productions_by_lhs_.find(lhs);
  return it == productions_by_lhs_.end() ? empty : it->second;
}

int Grammar::production_for(const std::string& lhs,
                            const std::string& fn) const {
  for (int i : productions_of(lhs)) {
    if (!productions[i].is_terminal && productions[i].fn == fn) return i;
  }
  return -1;
}

std::vector<std::string> Grammar::variables() const {
  std::vector<std::string> vars;
  for (const auto& t : terminals) {
    if (t.is_var) vars.push_back(t.name);
  }
  return vars;
}

double Grammar::builtin_cost(const std::string& fn) const {
  auto it = builtin_costs.find(fn);
  return it == builtin_costs.end() ? 1.0 : it->second;
}

void Grammar::build_indexes() {
  for (size_t i = 0; i < terminals.size(); ++i) {
    terminal_by_name_[terminals[i].name] = static_cast<int>(i);
  }
  for (size_t i = 0; i < nonterminals.size(); ++i) {
    nonterminal_by_name_[nonterminals[i]] = static_cast<int>(i);
  }
  for (size_t i = 0; i < productions.size(); ++i) {
    productions_by_lhs_[productions[i].lhs].push_back(static_cast<int>(i));
  }
}

void Grammar::validate() const {
  std::set<std::string> names;
  for (const auto& t : terminals) {
    if (!names.insert(t.name).second) {
      throw ConfigError("duplicate terminal name: " + t.name);
    }
  }
  for (const auto& n : nonterminals) {
    if (!names.insert(n).second) {
      throw ConfigError("symbol name used twice (terminal/nonterminal): " + n);
    }
  }
  if (!is_nonterminal(start)) {
    throw ConfigError("start symbol must be a nonterminal: " + start);
  }
  // (lhs, builtin, rhs) triples must be distinct so that every parse tree
  // has a unique derivation and the weight recursion is a plain product.
  std::set<std::string> rules;
  for (const auto& p : productions) {
    if (!is_nonterminal(p.lhs)) {
      throw ConfigError("production lhs must be a nonterminal: " + p.lhs);
    }
    if (p.is_terminal) continue;
    const Builtin& b = builtin(p.fn);
    if (b.arg_types.size() != p.rhs.size()) {
      throw ConfigError("production " + p.lhs + ":" + p.fn + " has " +
                        std::to_string(p.rhs.size()) + " rhs symbols, builtin " +
                        p.fn + " takes " + std::to_string(b.arg_types.size()));
    }
    std::string rule = p.lhs + "->" + p.fn;
    for (const auto& s : p.rhs) rule += " " + s;
    if (!rules.insert(rule).second) {
      throw ConfigError("duplicate production: " + rule);
    }
    for (const auto& s : p.rhs) {
      if (!is_nonterminal(s) && terminal_index(s) < 0) {
        throw ConfigError("production " + p.lhs + ":" + p.fn +
                          " references unknown symbol " + s);
      }
    }
  }
  for (const auto& t : terminals) {
    if (!(t.weight > 0)) {
      throw ConfigError("terminal weight must be strictly positive: " + t.name);
    }
  }
  for (const auto& p : productions) {
    if (!p.is_terminal && !(p.weight > 0)) {
      throw ConfigError("production weight must be strictly positive: " +
                        p.lhs + ":" + p.fn);
    }
  }
}

CostModel CostModel::size_costs(const Grammar& g) {
  CostModel m;
  for (const auto& t : g.terminals) m.by_name_[t.name] = 1.0;
  for (const auto& p : g.productions) {
    if (!p.is_terminal) m.by_name_[p.fn] = 1.0;
  }
  return m;
}

CostModel CostModel::from_json(const Grammar& g, const nlohmann::json& j) {
  CostModel m;
  for (const auto& t : g.terminals) m.by_name_[t.name] = t.cost;
  for (const auto& p : g.productions) {
    if (!p.is_terminal) m.by_name_[p.fn] = g.builtin_cost(p.fn);
  }
  if (!j.is_null()) {
    if (!j.is_object()) throw ConfigError("costs must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!m.by_name_.count(it.key())) {
        throw ConfigError("cost key matches no terminal or builtin: " +
                          it.key());
      }
      m.by_name_[it.key()] = it.value().get<double>();
    }
  }
  for (const auto& [k, v] : m.by_name_) {
    if (!(v > 0)) throw ConfigError("costs must be strictly positive: " + k);
  }
  return m;
}

double CostModel::terminal_cost(const Grammar& g, int terminal) const {
  auto it = by_name_.find(g.terminals[terminal].name);
  if (it == by_name_.end()) {
    throw ConfigError("missing cost entry for terminal " +
                      g.terminals[terminal].name);
  }
  return it->second;
}

double CostModel::builtin_cost(const std::string& fn) const {
  auto it = by_name_.find(fn);
  if (it == by_name_.end()) {
    throw ConfigError("missing cost entry for builtin " + fn);
  }
  return it->second;
}

nlohmann::json CostModel::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : by_name_) j[k] = v;
  return j;
}

}  // namespace noisynth
