#pragma once

// Prefixed-tableau state: prefixes name worlds of the model under
// construction; a branch maps prefixes to the formulas asserted there.

#include <map>
#include <string>
#include <vector>

#include "boxsat/formula.hpp"

namespace boxsat {

// Agent sequence; the empty sequence is the root, rendered "0".
using Prefix = std::vector<int>;

inline std::string prefix_to_string(const Prefix& p) {
  std::string s = "0";
  for (int a : p) {
    s += '.';
    s += std::to_string(a);
  }
  return s;
}

inline bool is_proper_prefix_of(const Prefix& a, const Prefix& b) {
  if (a.size() >= b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

struct Branch {
  std::map<Prefix, FormulaSet> entries;
  std::map<Prefix, Prefix> back_edges;  // source prefix -> ancestor it folds onto
  bool closed = false;
};

}  // namespace boxsat
