#include "noisynth/enumerate.hpp"

#include <map>

#include "noisynth/errors.hpp"

namespace noisynth {

namespace {

// programs-by-exact-height table, one row per nonterminal.
struct HeightTable {
  // by_height[sym][h] lists programs rooted at sym with height exactly h.
  std::map<std::string, std::vector<std::vector<Program>>> by_height;
  size_t total = 0;
};

void extend_to_height(const Grammar& g, HeightTable& table, int h, size_t cap) {
  for (const std::string& sym : g.nonterminals) {
    auto& rows = table.by_height[sym];
    if (static_cast<int>(rows.size()) > h) continue;
    rows.resize(h + 1);
    std::vector<Program>& out = rows[h];
    for (int pi : g.productions_of(sym)) {
      const Production& prod = g.productions[pi];
      if (prod.is_terminal) {
        if (h == 0) out.push_back(Program::leaf(pi, prod.terminal));
        continue;
      }
      if (h == 0) continue;
      // Children range over programs of height <= h-1 at their slot, with at
      // least one child of height exactly h-1 (terminal slots have height 0).
      struct Slot {
        bool is_terminal;
        int terminal;
        const std::vector<std::vector<Program>>* rows;
      };
      std::vector<Slot> slots;
      bool has_nonterminal = false;
      for (const std::string& rhs : prod.rhs) {
        if (g.is_nonterminal(rhs)) {
          slots.push_back({false, -1, &table.by_height[rhs]});
          has_nonterminal = true;
        } else {
          slots.push_back({true, g.terminal_index(rhs), nullptr});
        }
      }
      if (!has_nonterminal) {
        if (h == 1) out.push_back(Program::node(pi, [&] {
          std::vector<Program> cs;
          for (const Slot& s : slots) cs.push_back(Program::direct_leaf(s.terminal));
          return cs;
        }()));
        continue;
      }
      // Odometer over child choices, children ordered by (height, position).
      std::vector<Program> chosen(slots.size());
      std::vector<int> child_height(slots.size(), 0);
      auto recurse = [&](auto&& self, size_t slot_idx, int max_h) -> void {
        if (slot_idx == slots.size()) {
          if (max_h == h - 1) {
            out.push_back(Program::node(pi, chosen));
            if (++table.total > cap) {
              throw ConfigError("program enumeration exceeds cap of " +
                                std::to_string(cap));
            }
          }
          return;
        }
        const Slot& s = slots[slot_idx];
        if (s.is_terminal) {
          chosen[slot_idx] = Program::direct_leaf(s.terminal);
          self(self, slot_idx + 1, max_h);
          return;
        }
        for (int ch = 0; ch <= h - 1 && ch < static_cast<int>(s.rows->size()); ++ch) {
          for (const Program& p : (*s.rows)[ch]) {
            chosen[slot_idx] = p;
            self(self, slot_idx + 1, std::max(max_h, ch));
          }
        }
      };
      recurse(recurse, 0, 0);
    }
  }
}

}  // namespace

std::vector<Program> enumerate_at_symbol(const Grammar& g,
                                         const std::string& symbol, int d,
                                         size_t cap) {
  if (d < 0) throw ConfigError("height bound must be >= 0");
  if (!g.is_nonterminal(symbol)) {
    throw ConfigError("enumeration root must be a nonterminal: " + symbol);
  }
  HeightTable table;
  std::vector<Program> out;
  for (int h = 0; h <= d; ++h) {
    extend_to_height(g, table, h, cap);
    for (const Program& p : table.by_height[symbol][h]) {
      out.push_back(p);
      if (out.size() > cap) {
        throw ConfigError("program enumeration exceeds cap of " +
                          std::to_string(cap));
      }
    }
  }
  return out;
}

std::vector<Program> enumerate_programs(const Grammar& g, int d, size_t cap) {
  return enumerate_at_symbol(g, g.start, d, cap);
}

}  // namespace noisynth
