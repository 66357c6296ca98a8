#pragma once

// Kripke models: the satisfaction relation, frame-condition verification,
// and model extraction from accepting tableau branches.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "boxsat/branch.hpp"
#include "boxsat/formula.hpp"
#include "boxsat/logic.hpp"

namespace boxsat {

struct KripkeModel {
  std::vector<std::string> worlds;  // sorted, unique
  std::map<int, std::set<std::pair<std::string, std::string>>> relations;
  std::map<std::string, std::set<std::string>> valuation;

  bool has_world(const std::string& w) const {
    return std::binary_search(worlds.begin(), worlds.end(), w);
  }
  void sort_worlds() {
    std::sort(worlds.begin(), worlds.end());
    worlds.erase(std::unique(worlds.begin(), worlds.end()), worlds.end());
  }
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Index-based view of a model for fast repeated evaluation.
struct ModelIndex {
  std::vector<std::string> worlds;
  std::unordered_map<std::string, int> index;
  std::map<int, std::vector<std::vector<int>>> succs;  // agent -> per-world list
  std::map<std::string, std::vector<bool>> val;

  explicit ModelIndex(const KripkeModel& m) {
    worlds = m.worlds;
    for (std::size_t i = 0; i < worlds.size(); ++i)
      index.emplace(worlds[i], static_cast<int>(i));
    for (auto& [agent, rel] : m.relations) {
      auto& s = succs[agent];
      s.assign(worlds.size(), {});
      for (auto& [a, b] : rel) {
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end() || ib == index.end())
          throw ModelError("relation pair references unknown world");
        s[ia->second].push_back(ib->second);
      }
    }
    for (auto& [var, set] : m.valuation) {
      auto& v = val[var];
      v.assign(worlds.size(), false);
      for (auto& w : set) {
        auto it = index.find(w);
        if (it == index.end())
          throw ModelError("valuation references unknown world " + w);
        v[it->second] = true;
      }
    }
  }

  const std::vector<int>& successors(int agent, int w) const {
    auto it = succs.find(agent);
    if (it == succs.end()) throw ModelError("unknown agent " + std::to_string(agent));
    return it->second[w];
  }

  bool holds(const std::string& var, int w) const {
    auto it = val.find(var);
    return it != val.end() && it->second[w];
  }
};

inline bool check_rec(const ModelIndex& m, int w, Formula f,
                      std::map<std::pair<const FormulaNode*, int>, bool>& memo) {
  auto key = std::make_pair(f.raw(), w);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  bool r = false;
  switch (f.kind()) {
    case Kind::Bottom: r = false; break;
    case Kind::Top: r = true; break;
    case Kind::Lit: r = m.holds(f.name(), w) != f.negated(); break;
    case Kind::And:
      r = check_rec(m, w, f.left(), memo) && check_rec(m, w, f.right(), memo);
      break;
    case Kind::Or:
      r = check_rec(m, w, f.left(), memo) || check_rec(m, w, f.right(), memo);
      break;
    case Kind::Box: {
      r = true;
      for (int v : m.successors(f.agent(), w))
        if (!check_rec(m, v, f.sub(), memo)) { r = false; break; }
      break;
    }
    case Kind::Dia: {
      r = false;
      for (int v : m.successors(f.agent(), w))
        if (check_rec(m, v, f.sub(), memo)) { r = true; break; }
      break;
    }
  }
  memo.emplace(key, r);
  return r;
}

inline bool check_input_rec(const ModelIndex& m, int w, const InputFormula& f) {
  switch (f->kind) {
    case InKind::Bottom: return false;
    case InKind::Top: return true;
    case InKind::Atom: return m.holds(f->name, w);
    case InKind::Not: return !check_input_rec(m, w, f->a);
    case InKind::And:
      return check_input_rec(m, w, f->a) && check_input_rec(m, w, f->b);
    case InKind::Or:
      return check_input_rec(m, w, f->a) || check_input_rec(m, w, f->b);
    case InKind::Implies:
      return !check_input_rec(m, w, f->a) || check_input_rec(m, w, f->b);
    case InKind::Box: {
      for (int v : m.successors(f->agent, w))
        if (!check_input_rec(m, v, f->a)) return false;
      return true;
    }
    case InKind::Dia: {
      for (int v : m.successors(f->agent, w))
        if (check_input_rec(m, v, f->a)) return true;
      return false;
    }
  }
  throw std::logic_error("check: bad kind");
}

inline int world_index(const ModelIndex& m, const std::string& w) {
  auto it = m.index.find(w);
  if (it == m.index.end()) throw ModelError("unknown world " + w);
  return it->second;
}

}  // namespace detail

inline bool check(const KripkeModel& m, const std::string& world, Formula f) {
  detail::ModelIndex idx(m);
  std::map<std::pair<const FormulaNode*, int>, bool> memo;
  return detail::check_rec(idx, detail::world_index(idx, world), f, memo);
}

inline bool check(const KripkeModel& m, const std::string& world,
                  const InputFormula& f) {
  detail::ModelIndex idx(m);
  return detail::check_input_rec(idx, detail::world_index(idx, world), f);
}

// ---------------------------------------------------------------------------
// Frame verification.

struct FrameViolation {
  int agent;
  std::string condition;  // "serial", "reflexive", "transitive", "symmetric",
                          // "inclusion R<i> <= R<j>"
  std::string world_a, world_b;

  std::string to_string() const {
    std::ostringstream os;
    os << "agent " << agent << ": " << condition << " violated at " << world_a;
    if (!world_b.empty()) os << " -> " << world_b;
    return os.str();
  }
};

inline std::vector<FrameViolation> verify_frame(const KripkeModel& m,
                                                const LogicSpec& spec) {
  std::vector<FrameViolation> out;
  auto relation = [&](int agent) -> const std::set<std::pair<std::string, std::string>>& {
    static const std::set<std::pair<std::string, std::string>> empty;
    auto it = m.relations.find(agent);
    return it == m.relations.end() ? empty : it->second;
  };
  for (int i = 1; i <= spec.agent_count(); ++i) {
    const auto& rel = relation(i);
    FrameClass c = spec.frame(i);
    if (spec.vacuous(i)) {
      // A vacuous agent keeps its original class (K or K4); only
      // transitivity can be demanded.
      if (c != FrameClass::K4) continue;
    }
    if (!spec.vacuous(i) && serial_class(c)) {
      for (const auto& w : m.worlds) {
        auto it = rel.lower_bound({w, ""});
        if (it == rel.end() || it->first != w)
          out.push_back({i, "serial", w, ""});
      }
    }
    if (!spec.vacuous(i) && reflexive_class(c)) {
      for (const auto& w : m.worlds)
        if (!rel.count({w, w})) out.push_back({i, "reflexive", w, ""});
    }
    if (transitive_class(c)) {
      for (const auto& [a, b] : rel) {
        auto it = rel.lower_bound({b, ""});
        for (; it != rel.end() && it->first == b; ++it)
          if (!rel.count({a, it->second}))
            out.push_back({i, "transitive", a, it->second});
      }
    }
    if (c == FrameClass::S5 && !spec.vacuous(i)) {
      for (const auto& [a, b] : rel)
        if (!rel.count({b, a})) out.push_back({i, "symmetric", a, b});
    }
  }
  for (auto& [i, j] : spec.inclusion()) {
    const auto& ri = relation(i);
    const auto& rj = relation(j);
    for (const auto& p : ri)
      if (!rj.count(p))
        out.push_back({i, "inclusion R" + std::to_string(i) + " <= R" + std::to_string(j),
                       p.first, p.second});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relation closures on string pairs.

namespace detail {

using PairSet = std::set<std::pair<std::string, std::string>>;

inline void reflexive_close(PairSet& rel, const std::vector<std::string>& worlds) {
  for (const auto& w : worlds) rel.insert({w, w});
}

inline void transitive_close(PairSet& rel) {
  bool changed = true;
  while (changed) {
    changed = false;
    PairSet add;
    for (const auto& [a, b] : rel) {
      auto it = rel.lower_bound({b, ""});
      for (; it != rel.end() && it->first == b; ++it)
        if (!rel.count({a, it->second})) add.insert({a, it->second});
    }
    if (!add.empty()) {
      changed = true;
      rel.insert(add.begin(), add.end());
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model construction from an accepting branch. Worlds are the branch
// prefixes with back-edged prefixes identified with their targets. Minimal
// agents draw their edges from n_i; every non-minimal agent takes the union
// of the relations below it. Closures demanded by the frame class are
// applied after the fold (reflexive before transitive).

inline Prefix n_i_prefix(const LogicSpec& spec, int agent, const Prefix& sigma) {
  if (reflexive_class(spec.frame(agent))) return sigma;
  if (!sigma.empty() && sigma.back() == agent &&
      transitive_class(spec.frame(agent)))
    return sigma;
  Prefix out = sigma;
  out.push_back(agent);
  return out;
}

inline std::pair<KripkeModel, std::string> extract_model(const Branch& branch,
                                                         const LogicSpec& spec) {
  if (branch.closed)
    throw ModelError("cannot extract a model from a closed branch");
  if (branch.entries.empty())
    throw ModelError("cannot extract a model from an empty branch");

  // kept prefixes = entries minus back-edged ones
  std::vector<Prefix> kept;
  for (auto& [p, _] : branch.entries)
    if (!branch.back_edges.count(p)) kept.push_back(p);

  auto collapse = [&](const Prefix& p) -> const Prefix& {
    auto it = branch.back_edges.find(p);
    return it == branch.back_edges.end() ? p : it->second;
  };

  KripkeModel m;
  for (auto& p : kept) m.worlds.push_back(prefix_to_string(p));
  m.sort_worlds();

  // base relations for effective-min agents
  std::map<int, detail::PairSet> rel;
  for (int a = 1; a <= spec.agent_count(); ++a) rel[a];  // ensure keys
  for (int a : spec.min_eff_all()) {
    auto& r = rel[a];
    for (auto& w : kept) {
      std::string ws = prefix_to_string(w);
      if (reflexive_class(spec.frame(a))) {
        r.insert({ws, ws});
        continue;
      }
      Prefix t = n_i_prefix(spec, a, w);
      if (t == w) {
        r.insert({ws, ws});
      } else if (branch.entries.count(t)) {
        r.insert({ws, prefix_to_string(collapse(t))});
      } else {
        r.insert({ws, ws});
      }
    }
  }

  // fold upward in topological order, then close per frame class
  for (int a : spec.agents_topological()) {
    if (spec.vacuous(a)) {
      rel[a].clear();
      continue;
    }
    auto& r = rel[a];
    for (int j : spec.nonvacuous_predecessors(a))
      r.insert(rel[j].begin(), rel[j].end());
    if (reflexive_class(spec.frame(a))) detail::reflexive_close(r, m.worlds);
    if (transitive_class(spec.frame(a))) detail::transitive_close(r);
  }
  for (auto& [a, r] : rel) m.relations[a] = std::move(r);

  // valuation from positive literals
  for (auto& p : kept) {
    const FormulaSet& set = branch.entries.at(p);
    for (const Formula& f : set)
      if (f.kind() == Kind::Lit && !f.negated())
        m.valuation[f.name()].insert(prefix_to_string(p));
  }
  return {std::move(m), "0"};
}

}  // namespace boxsat
