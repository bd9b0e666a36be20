#include "noisynth/prior.hpp"

#include <map>

#include "noisynth/errors.hpp"

namespace noisynth {

namespace {

// W[sym][m] = total weight of programs rooted at sym with height <= m.
std::map<std::string, std::vector<LogReal>> weight_by_symbol(const Grammar& g,
                                                             int d) {
  std::map<std::string, std::vector<LogReal>> table;
  for (const std::string& sym : g.nonterminals) {
    table[sym].assign(d + 1, LogReal::zero());
  }
  for (int m = 0; m <= d; ++m) {
    for (const std::string& sym : g.nonterminals) {
      LogReal total = LogReal::zero();
      for (int pi : g.productions_of(sym)) {
        const Production& prod = g.productions[pi];
        if (prod.is_terminal) {
          total += LogReal::from_linear(g.terminals[prod.terminal].weight);
          continue;
        }
        if (m == 0) continue;
        LogReal w = LogReal::from_linear(prod.weight);
        for (const std::string& rhs : prod.rhs) {
          if (g.is_nonterminal(rhs)) {
            w *= table[rhs][m - 1];
          } else {
            w *= LogReal::from_linear(g.terminals[g.terminal_index(rhs)].weight);
          }
        }
        total += w;
      }
      table[sym][m] = total;
    }
  }
  return table;
}

}  // namespace

Prior::Prior(const Grammar& g, int d, size_t sampler_cap)
    : grammar_(&g), depth_(d) {
  if (d < 0) throw ConfigError("prior height bound must be >= 0");
  auto table = weight_by_symbol(g, d);
  total_ = table[g.start][d];
  if (total_.is_zero()) {
    throw ConfigError("grammar generates no program of height <= " +
                      std::to_string(d));
  }
  try {
    programs_ = enumerate_programs(g, d, sampler_cap);
    cumulative_.reserve(programs_.size());
    double acc = 0;
    double total_lin = total_.linear();
    for (const Program& p : programs_) {
      acc += program_weight(p).linear() / total_lin;
      cumulative_.push_back(acc);
    }
    sampler_ready_ = true;
  } catch (const ConfigError&) {
    // Enumeration above the cap: the prior still works, sampling does not.
    sampler_ready_ = false;
  }
}

LogReal Prior::program_weight(const Program& p) const {
  const Grammar& g = *grammar_;
  if (p.is_leaf()) {
    return LogReal::from_linear(g.terminals[p.terminal].weight);
  }
  const Production& prod = g.productions[p.production];
  LogReal w = LogReal::from_linear(prod.weight);
  for (const Program& c : p.children) w *= program_weight(c);
  return w;
}

double Prior::rho_p(const Program& p) const {
  return std::exp(log_rho_p(p));
}

double Prior::log_rho_p(const Program& p) const {
  if (p.height() > depth_) {
    throw ConfigError("program height " + std::to_string(p.height()) +
                      " exceeds prior height bound " + std::to_string(depth_));
  }
  return program_weight(p).log() - total_.log();
}

const Program& Prior::sample(Rng& rng) const {
  if (!sampler_ready_) {
    throw ConfigError("prior sampler unavailable: enumeration exceeded cap");
  }
  double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  size_t idx = std::min<size_t>(it - cumulative_.begin(), programs_.size() - 1);
  return programs_[idx];
}

const std::vector<Program>& Prior::programs() const {
  if (!sampler_ready_) {
    throw ConfigError("prior enumeration unavailable: exceeded cap");
  }
  return programs_;
}

}  // namespace noisynth
