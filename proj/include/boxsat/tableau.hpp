#pragma once

// Prefixed-tableau decision procedures: the general diamond-free engine for
// any validated logic description, and the full-language unimodal K engine.
//
// General rules, applied at a prefix sigma holding [i]f:
//   R1: sigma [j]f            for every j < i            (inclusion)
//   R2: n_i(sigma) f          when i is effective-minimal (seriality step)
//   R3: sigma f               when F(i) is a reflexive class
//   R4: n_j(sigma) [i]f       for j in min(i), when F(i) is a transitive
//                             class and i is not itself minimal (for minimal
//                             i the n_i collapse already makes R2 cover the
//                             whole chain)
// plus the propositional rules: conjunctions split, disjunctions branch.
//
// Termination: a fully saturated child whose formula set equals that of a
// proper ancestor with the same final agent is not expanded; a back-edge is
// recorded and model extraction folds the loop.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxsat/branch.hpp"
#include "boxsat/formula.hpp"
#include "boxsat/logic.hpp"
#include "boxsat/model.hpp"

namespace boxsat {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Prefix n_i(const LogicSpec& spec, int agent, const Prefix& sigma) {
  if (spec.vacuous(agent))
    throw SolveError("n_i is undefined for vacuous agent " + std::to_string(agent));
  return n_i_prefix(spec, agent, sigma);
}

enum class Rule : std::uint8_t { Conj, Disj, R1, R2, R3, R4 };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Conj: return "and";
    case Rule::Disj: return "or";
    case Rule::R1: return "R1";
    case Rule::R2: return "R2";
    case Rule::R3: return "R3";
    case Rule::R4: return "R4";
  }
  return "?";
}

struct TraceRecord {
  Rule rule;
  Prefix source;
  Formula premise;
  Formula produced;
  Prefix target;

  std::string to_string() const {
    std::ostringstream os;
    os << rule_name(rule) << ' ' << prefix_to_string(source) << ' '
       << print(premise) << " => " << prefix_to_string(target) << ' '
       << print(produced);
    return os.str();
  }
};

struct Verdict {
  bool sat = false;
  KripkeModel model;  // meaningful iff sat
  std::string world;  // meaningful iff sat
};

struct SolveDetail {
  Verdict verdict;
  Branch branch;
  std::vector<TraceRecord> trace;
};

namespace detail {

class TableauEngine {
 public:
  explicit TableauEngine(const LogicSpec& spec) : spec_(spec) {}

  SolveDetail run(Formula root_formula) {
    SolveDetail out;
    Frame root;
    root.prefix = {};
    add(root, root_formula);
    bool ok = saturate(root);
    if (ok) {
      out.branch = std::move(branch_);
      out.branch.closed = false;
      out.trace = std::move(trace_);
      auto [model, world] = extract_model(out.branch, spec_);
      out.verdict.sat = true;
      out.verdict.model = std::move(model);
      out.verdict.world = world;
    } else {
      out.branch.closed = true;
      out.trace = std::move(trace_);
      out.verdict.sat = false;
    }
    return out;
  }

 private:
  struct Frame {
    Prefix prefix;
    FormulaSet set;
    std::vector<Formula> trail;  // insertion order, for queue + undo
    std::size_t qpos = 0;        // next trail index to process
  };

  // Adds a formula; returns true if it was new.
  static bool add(Frame& f, Formula g) {
    if (f.set.insert(g).second) {
      f.trail.push_back(g);
      return true;
    }
    return false;
  }

  void record(Rule rule, const Prefix& source, Formula premise,
              Formula produced, const Prefix& target) {
    trace_.push_back(TraceRecord{rule, source, premise, produced, target});
  }

  bool closed_by(const Frame& f, Formula g) const {
    if (g.kind() == Kind::Bottom) return true;
    if (g.kind() == Kind::Lit)
      return f.set.count(Formula::lit(g.name(), !g.negated())) > 0;
    return false;
  }

  // A disjunct that can never be consistently added.
  bool dead(const Frame& f, Formula g) const {
    return g.kind() == Kind::Bottom ||
           (g.kind() == Kind::Lit &&
            f.set.count(Formula::lit(g.name(), !g.negated())) > 0);
  }

  // Deterministic per-formula consequences. Returns false on propositional
  // closure.
  bool drain(Frame& f) {
    while (f.qpos < f.trail.size()) {
      Formula g = f.trail[f.qpos++];
      if (closed_by(f, g)) return false;
      switch (g.kind()) {
        case Kind::And:
          if (add(f, g.left()))
            record(Rule::Conj, f.prefix, g, g.left(), f.prefix);
          if (add(f, g.right()))
            record(Rule::Conj, f.prefix, g, g.right(), f.prefix);
          break;
        case Kind::Box: {
          int i = g.agent();
          if (!spec_.valid_agent(i))
            throw SolveError("agent " + std::to_string(i) + " out of range");
          if (spec_.vacuous(i)) break;  // discharged by default
          for (int j : spec_.nonvacuous_predecessors(i)) {
            Formula h = Formula::box(j, g.sub());
            if (add(f, h)) record(Rule::R1, f.prefix, g, h, f.prefix);
          }
          if (reflexive_class(spec_.frame(i))) {
            if (add(f, g.sub()))
              record(Rule::R3, f.prefix, g, g.sub(), f.prefix);
          }
          if (is_min(i) && n_i_prefix(spec_, i, f.prefix) == f.prefix) {
            if (add(f, g.sub()))
              record(Rule::R2, f.prefix, g, g.sub(), f.prefix);
          }
          break;
        }
        case Kind::Dia:
          throw SolveError(
              "diamond operator is outside the diamond-free fragment: " +
              print(g));
        default:
          break;
      }
    }
    return true;
  }

  bool is_min(int agent) const {
    const auto& mins = spec_.min_eff_all();
    return std::binary_search(mins.begin(), mins.end(), agent);
  }

  // Saturation: deterministic closure, unit-forced disjunctions, then a
  // branching choice on the first open disjunction (left disjunct first).
  // When no disjunction is open the frame is stable and children are built.
  bool saturate(Frame& f) {
    for (;;) {
      if (!drain(f)) return false;
      Formula open;
      bool forced = false;
      for (const Formula& g : f.set) {
        if (g.kind() != Kind::Or) continue;
        Formula l = g.left(), r = g.right();
        if (f.set.count(l) || f.set.count(r)) continue;  // satisfied
        if (dead(f, l)) {
          if (add(f, r)) record(Rule::Disj, f.prefix, g, r, f.prefix);
          forced = true;
          break;
        }
        if (dead(f, r)) {
          if (add(f, l)) record(Rule::Disj, f.prefix, g, l, f.prefix);
          forced = true;
          break;
        }
        if (!open.valid()) open = g;
      }
      if (forced) continue;
      if (!open.valid()) break;
      // branch: left disjunct first
      for (Formula side : {open.left(), open.right()}) {
        Marks m = mark(f);
        if (add(f, side)) record(Rule::Disj, f.prefix, open, side, f.prefix);
        if (saturate_from(f)) return true;
        rollback(f, m);
      }
      return false;
    }
    return expand_children(f);
  }

  // Continue saturation after a choice without re-entering the choice that
  // produced us (the loop in saturate() rescans, which is fine: the chosen
  // disjunct satisfies its disjunction).
  bool saturate_from(Frame& f) { return saturate(f); }

  struct Marks {
    std::size_t trail, qpos, trace;
  };

  Marks mark(const Frame& f) const {
    return Marks{f.trail.size(), f.qpos, trace_.size()};
  }

  void rollback(Frame& f, const Marks& m) {
    while (f.trail.size() > m.trail) {
      f.set.erase(f.trail.back());
      f.trail.pop_back();
    }
    f.qpos = m.qpos;
    trace_.resize(m.trace);
    erase_subtree(branch_.entries, f.prefix);
    erase_subtree(branch_.back_edges, f.prefix);
  }

  template <typename MapT>
  static void erase_subtree(MapT& map, const Prefix& root) {
    auto it = map.lower_bound(root);
    while (it != map.end() &&
           (it->first == root || is_proper_prefix_of(root, it->first)))
      it = map.erase(it);
  }

  // Deterministic-only closure used to reject a doomed child before any
  // sibling subtree is explored: conjunction splitting, the box rules and
  // unit-forced disjunctions, but no branching. Returns false when the frame
  // is propositionally closed no matter how its open disjunctions resolve.
  bool probe(Frame& f) {
    for (;;) {
      if (!drain(f)) return false;
      bool forced = false;
      for (const Formula& g : f.set) {
        if (g.kind() != Kind::Or) continue;
        Formula l = g.left(), r = g.right();
        if (f.set.count(l) || f.set.count(r)) continue;
        if (dead(f, l)) {
          if (dead(f, r)) return false;
          add(f, r);
          forced = true;
          break;
        }
        if (dead(f, r)) {
          add(f, l);
          forced = true;
          break;
        }
      }
      if (!forced) return true;
    }
  }

  bool expand_children(Frame& f) {
    // loop check against same-final-agent ancestors
    if (!f.prefix.empty()) {
      for (const Frame* anc : path_) {
        if (anc->prefix.empty() || anc->prefix.back() != f.prefix.back())
          continue;
        if (anc->set == f.set) {
          branch_.entries[f.prefix] = f.set;
          branch_.back_edges[f.prefix] = anc->prefix;
          return true;
        }
      }
    }
    branch_.entries[f.prefix] = f.set;

    // collect child deposits
    std::map<int, std::vector<Formula>> buckets;
    std::map<int, FormulaSet> bucket_sets;
    auto deposit = [&](int j, Formula g) {
      if (bucket_sets[j].insert(g).second) buckets[j].push_back(g);
    };
    for (const Formula& g : f.set) {
      if (g.kind() != Kind::Box) continue;
      int i = g.agent();
      if (spec_.vacuous(i)) continue;
      if (is_min(i)) {
        Prefix t = n_i_prefix(spec_, i, f.prefix);
        if (t != f.prefix) {
          record(Rule::R2, f.prefix, g, g.sub(), t);
          deposit(i, g.sub());
        }
      } else if (transitive_class(spec_.frame(i))) {
        for (int j : spec_.min_eff(i)) {
          Prefix t = n_i_prefix(spec_, j, f.prefix);
          if (t != f.prefix) {
            record(Rule::R4, f.prefix, g, g, t);
            deposit(j, g);
          }
        }
      }
    }

    // child order: ascending agents, but defer the "last prefix" (a child x
    // sharing a transitive parent's min set with our own final agent)
    std::vector<int> order;
    for (auto& [j, _] : buckets) order.push_back(j);
    if (!f.prefix.empty()) {
      int y = f.prefix.back();
      auto is_last = [&](int x) {
        if (x == y) return false;
        for (int i = 1; i <= spec_.agent_count(); ++i) {
          if (spec_.vacuous(i) || !transitive_class(spec_.frame(i))) continue;
          const auto& mins = spec_.min_eff(i);
          if (std::binary_search(mins.begin(), mins.end(), x) &&
              std::binary_search(mins.begin(), mins.end(), y))
            return true;
        }
        return false;
      };
      std::stable_partition(order.begin(), order.end(),
                            [&](int x) { return !is_last(x); });
    }

    // fail fast: a child whose deterministic closure already clashes dooms
    // this frame, so find it before any sibling subtree is explored
    std::size_t probe_trace_mark = trace_.size();
    for (int j : order) {
      Frame child;
      child.prefix = f.prefix;
      child.prefix.push_back(j);
      for (Formula g : buckets[j]) add(child, g);
      bool alive = probe(child);
      trace_.resize(probe_trace_mark);
      if (!alive) {
        erase_subtree(branch_.entries, f.prefix);
        return false;
      }
    }

    path_.push_back(&f);
    bool ok = true;
    for (int j : order) {
      Frame child;
      child.prefix = f.prefix;
      child.prefix.push_back(j);
      for (Formula g : buckets[j]) add(child, g);
      if (!saturate(child)) {
        ok = false;
        break;
      }
    }
    path_.pop_back();
    return ok;
  }

  const LogicSpec& spec_;
  Branch branch_;
  std::vector<TraceRecord> trace_;
  std::vector<const Frame*> path_;
};

inline void validate_solve_input(const LogicSpec& spec, Formula f) {
  if (!f.diamond_free())
    throw SolveError("the general tableau accepts diamond-free input only");
  int a = max_agent(f);
  if (a > spec.agent_count())
    throw SolveError("formula uses agent " + std::to_string(a) +
                     " but the logic has only " +
                     std::to_string(spec.agent_count()) + " agents");
}

}  // namespace detail

inline SolveDetail solve_detailed(const LogicSpec& spec, Formula f) {
  detail::validate_solve_input(spec, f);
  detail::TableauEngine engine(spec);
  SolveDetail out = engine.run(f);
  if (out.verdict.sat) {
    // Every Sat verdict ships a checked certificate.
    auto violations = verify_frame(out.verdict.model, spec);
    if (!violations.empty())
      throw std::logic_error("internal error: extracted model violates frame: " +
                             violations.front().to_string());
    if (!check(out.verdict.model, out.verdict.world, f))
      throw std::logic_error(
          "internal error: extracted model does not satisfy the input");
  }
  return out;
}

inline Verdict solve(const LogicSpec& spec, Formula f) {
  return solve_detailed(spec, f).verdict;
}

inline std::vector<TraceRecord> trace(const LogicSpec& spec, Formula f) {
  return solve_detailed(spec, f).trace;
}

// ---------------------------------------------------------------------------
// Unimodal K, full language (boxes and diamonds). Each diamond at sigma
// spawns a fresh child holding its body plus every box payload at sigma;
// modal depth strictly decreases, so no loop check is needed.

namespace detail {

class KEngine {
 public:
  bool run(Formula root_formula, KripkeModel& model) {
    Frame root;
    root.prefix = {};
    add(root, root_formula);
    nodes_.clear();
    if (!saturate(root)) return false;
    build_model(model);
    return true;
  }

 private:
  struct Frame {
    Prefix prefix;
    FormulaSet set;
    std::vector<Formula> trail;
    std::size_t qpos = 0;
  };

  static bool add(Frame& f, Formula g) {
    if (f.set.insert(g).second) {
      f.trail.push_back(g);
      return true;
    }
    return false;
  }

  bool dead(const Frame& f, Formula g) const {
    return g.kind() == Kind::Bottom ||
           (g.kind() == Kind::Lit &&
            f.set.count(Formula::lit(g.name(), !g.negated())) > 0);
  }

  bool drain(Frame& f) {
    while (f.qpos < f.trail.size()) {
      Formula g = f.trail[f.qpos++];
      if (g.kind() == Kind::Bottom) return false;
      if (g.kind() == Kind::Lit &&
          f.set.count(Formula::lit(g.name(), !g.negated())))
        return false;
      if (g.kind() == Kind::And) {
        add(f, g.left());
        add(f, g.right());
      }
      if ((g.kind() == Kind::Box || g.kind() == Kind::Dia) && g.agent() != 1)
        throw SolveError("solve_k accepts unimodal input (agent 1 only)");
    }
    return true;
  }

  bool saturate(Frame& f) {
    for (;;) {
      if (!drain(f)) return false;
      Formula open;
      bool forced = false;
      for (const Formula& g : f.set) {
        if (g.kind() != Kind::Or) continue;
        Formula l = g.left(), r = g.right();
        if (f.set.count(l) || f.set.count(r)) continue;
        if (dead(f, l)) { add(f, r); forced = true; break; }
        if (dead(f, r)) { add(f, l); forced = true; break; }
        if (!open.valid()) open = g;
      }
      if (forced) continue;
      if (!open.valid()) break;
      for (Formula side : {open.left(), open.right()}) {
        std::size_t tmark = f.trail.size(), qmark = f.qpos;
        std::size_t nmark = nodes_.size();
        add(f, side);
        if (saturate(f)) return true;
        while (f.trail.size() > tmark) {
          f.set.erase(f.trail.back());
          f.trail.pop_back();
        }
        f.qpos = qmark;
        nodes_.resize(nmark);
      }
      return false;
    }
    return expand(f);
  }

  bool expand(Frame& f) {
    std::vector<Formula> boxes, dias;
    for (const Formula& g : f.set) {
      if (g.kind() == Kind::Box) boxes.push_back(g.sub());
      if (g.kind() == Kind::Dia) dias.push_back(g.sub());
    }
    std::size_t self = nodes_.size();
    nodes_.push_back({f.prefix, {}, {}});
    for (const Formula& g : f.set)
      if (g.kind() == Kind::Lit && !g.negated())
        nodes_[self].lits.push_back(g.name());
    int idx = 0;
    for (Formula body : dias) {
      Frame child;
      child.prefix = f.prefix;
      child.prefix.push_back(++idx);
      add(child, body);
      for (Formula b : boxes) add(child, b);
      nodes_[self].children.push_back(prefix_to_string(child.prefix));
      if (!saturate(child)) return false;
    }
    return true;
  }

  void build_model(KripkeModel& m) const {
    m = KripkeModel{};
    m.relations[1];
    for (auto& n : nodes_) {
      std::string w = prefix_to_string(n.prefix);
      m.worlds.push_back(w);
      for (auto& c : n.children) m.relations[1].insert({w, c});
      for (auto& v : n.lits) m.valuation[v].insert(w);
    }
    m.sort_worlds();
  }

  struct NodeInfo {
    Prefix prefix;
    std::vector<std::string> children;
    std::vector<std::string> lits;
  };
  std::vector<NodeInfo> nodes_;
};

}  // namespace detail

inline Verdict solve_k(Formula f) {
  detail::KEngine engine;
  Verdict v;
  if (engine.run(f, v.model)) {
    v.sat = true;
    v.world = "0";
    if (!check(v.model, v.world, f))
      throw std::logic_error("internal error: K model does not satisfy input");
  }
  return v;
}

}  // namespace boxsat
