#pragma once

// Shared test helpers: formula corpora (exhaustive and random), the
// independent evaluators the engines are checked against, and the machine
// acceptance oracle.

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "boxsat/atm.hpp"
#include "boxsat/formula.hpp"
#include "boxsat/logic.hpp"

namespace testsupport {

using namespace boxsat;

// ---------------------------------------------------------------------------
// Exhaustive diamond-free corpus: every NNF formula over the given leaves
// with at most `max_ops` internal nodes (and/or/box) and modal depth at most
// `max_depth`. Formulas are enumerated by internal-node count.

struct CorpusParams {
  int agents = 3;
  int max_ops = 3;
  int max_depth = 2;
  std::vector<Formula> leaves;  // default: q, ~q, false, true
};

inline std::vector<Formula> default_leaves() {
  return {Formula::lit("q"), Formula::lit("q", true), Formula::bottom(),
          Formula::top()};
}

inline std::vector<Formula> exhaustive_diamond_free(const CorpusParams& p) {
  std::vector<std::vector<Formula>> by_ops(p.max_ops + 1);
  by_ops[0] = p.leaves.empty() ? default_leaves() : p.leaves;
  for (int n = 1; n <= p.max_ops; ++n) {
    auto& out = by_ops[n];
    for (int a = 1; a <= p.agents; ++a)
      for (Formula f : by_ops[n - 1])
        if (static_cast<int>(f.modal_depth()) < p.max_depth)
          out.push_back(Formula::box(a, f));
    for (int l = 0; l < n; ++l) {
      int r = n - 1 - l;
      for (Formula a : by_ops[l])
        for (Formula b : by_ops[r]) {
          out.push_back(Formula::conj(a, b));
          out.push_back(Formula::disj(a, b));
        }
    }
  }
  std::vector<Formula> all;
  for (auto& v : by_ops) all.insert(all.end(), v.begin(), v.end());
  return all;
}

// Random diamond-free NNF formula with ~ops internal nodes.
inline Formula random_diamond_free(std::mt19937_64& rng, int ops, int agents,
                                   int max_depth, int vars) {
  std::uniform_int_distribution<int> var_pick(1, vars);
  std::uniform_int_distribution<int> agent_pick(1, agents);
  std::uniform_int_distribution<int> leaf_pick(0, 5);
  std::function<Formula(int, int)> gen = [&](int budget, int depth) -> Formula {
    if (budget <= 0) {
      switch (leaf_pick(rng)) {
        case 0: return Formula::bottom();
        case 1: return Formula::top();
        default: {
          int v = var_pick(rng);
          std::string name = "p" + std::to_string(v);
          return Formula::lit(name, leaf_pick(rng) % 2 == 0);
        }
      }
    }
    std::uniform_int_distribution<int> op(0, depth < max_depth ? 2 : 1);
    switch (op(rng)) {
      case 0:
        return Formula::conj(gen(budget / 2, depth), gen((budget - 1) / 2, depth));
      case 1:
        return Formula::disj(gen(budget / 2, depth), gen((budget - 1) / 2, depth));
      default:
        return Formula::box(agent_pick(rng), gen(budget - 1, depth + 1));
    }
  };
  return gen(ops, 0);
}

// Random unimodal NNF formula, diamonds allowed.
inline Formula random_unimodal(std::mt19937_64& rng, int ops, int vars) {
  std::uniform_int_distribution<int> var_pick(1, vars);
  std::uniform_int_distribution<int> leaf_pick(0, 5);
  std::function<Formula(int)> gen = [&](int budget) -> Formula {
    if (budget <= 0) {
      switch (leaf_pick(rng)) {
        case 0: return Formula::bottom();
        case 1: return Formula::top();
        default: {
          std::string name = vars == 1 ? "p" : "p" + std::to_string(var_pick(rng));
          return Formula::lit(name, leaf_pick(rng) % 2 == 0);
        }
      }
    }
    std::uniform_int_distribution<int> op(0, 3);
    switch (op(rng)) {
      case 0: return Formula::conj(gen(budget / 2), gen((budget - 1) / 2));
      case 1: return Formula::disj(gen(budget / 2), gen((budget - 1) / 2));
      case 2: return Formula::box(1, gen(budget - 1));
      default: return Formula::dia(1, gen(budget - 1));
    }
  };
  return gen(ops);
}

// ---------------------------------------------------------------------------
// Linear-time evaluation of variable-free diamond-free formulas: every box
// over a non-vacuous agent reduces to its body, vacuous boxes hold.

inline bool var_free_eval(const LogicSpec& spec, Formula f) {
  switch (f.kind()) {
    case Kind::Bottom: return false;
    case Kind::Top: return true;
    case Kind::And: return var_free_eval(spec, f.left()) && var_free_eval(spec, f.right());
    case Kind::Or: return var_free_eval(spec, f.left()) || var_free_eval(spec, f.right());
    case Kind::Box:
      return spec.vacuous(f.agent()) ? true : var_free_eval(spec, f.sub());
    default:
      throw std::logic_error("var_free_eval: variables or diamonds present");
  }
}

// ---------------------------------------------------------------------------
// Hand-built machines shared between the unit and acceptance suites. All of
// them move the tape-1 head monotonically (never revisiting a cell), so the
// verbatim sigma'-encoding is exact for them.

inline ATMSpec atm_immediate_accept() {
  ATMSpec m;
  m.states = {"y", "n"};
  m.existential = {"y", "n"};
  m.alphabet = {"b"};
  m.start = "y";
  m.accept = "y";
  m.reject = "n";
  m.input = "b";
  m.space_bound = 1;
  return m;
}

inline ATMSpec atm_immediate_reject() {
  ATMSpec m = atm_immediate_accept();
  m.start = "n";
  return m;
}

inline ATMSpec atm_universal_both_accept() {
  ATMSpec m;
  m.states = {"s", "y", "n"};
  m.existential = {"y", "n"};
  m.universal = {"s"};
  m.alphabet = {"b", "a"};
  m.start = "s";
  m.accept = "y";
  m.reject = "n";
  m.input = "a";
  m.space_bound = 1;
  for (const auto& a : m.alphabet)
    for (const auto& b : m.alphabet) {
      m.delta1[{"s", a, b}] = {"y", "a", 0, 0};
      m.delta2[{"s", a, b}] = {"y", "b", 0, 0};
    }
  return m;
}

inline ATMSpec atm_universal_one_rejects() {
  ATMSpec m = atm_universal_both_accept();
  for (const auto& a : m.alphabet)
    for (const auto& b : m.alphabet) m.delta2[{"s", a, b}] = {"n", "b", 0, 0};
  return m;
}

inline ATMSpec atm_det_write_then_accept() {
  ATMSpec m;
  m.states = {"s", "y", "n"};
  m.existential = {"s", "y", "n"};
  m.alphabet = {"b", "a"};
  m.start = "s";
  m.accept = "y";
  m.reject = "n";
  m.input = "a";
  m.space_bound = 1;
  for (const auto& a : m.alphabet)
    for (const auto& b : m.alphabet) {
      m.delta1[{"s", a, b}] = {"y", "a", 1, 0};
      m.delta2[{"s", a, b}] = {"y", "a", 1, 0};
    }
  return m;
}

inline ATMSpec atm_det_reject(const ATMSpec& base) {
  ATMSpec m = base;
  for (auto& [k, st] : m.delta1)
    if (st.state == "y") st.state = "n";
  for (auto& [k, st] : m.delta2)
    if (st.state == "y") st.state = "n";
  return m;
}

// A two-step deterministic worker: writes its tape-2 cell, moves along the
// input, then accepts after reading the second input cell.
inline ATMSpec atm_det_two_steps() {
  ATMSpec m;
  m.states = {"s", "t", "y", "n"};
  m.existential = {"s", "t", "y", "n"};
  m.alphabet = {"b", "a"};
  m.start = "s";
  m.accept = "y";
  m.reject = "n";
  m.input = "ab";
  m.space_bound = 2;
  for (const auto& a : m.alphabet)
    for (const auto& b : m.alphabet) {
      m.delta1[{"s", a, b}] = {"t", "a", 1, 1};
      m.delta2[{"s", a, b}] = {"t", "a", 1, 1};
      // accept exactly when the second input cell holds 'b'
      m.delta1[{"t", a, b}] = {a == "b" ? "y" : "n", "b", 1, 0};
      m.delta2[{"t", a, b}] = {a == "b" ? "y" : "n", "b", 1, 0};
    }
  return m;
}

// ---------------------------------------------------------------------------
// Alternating-machine acceptance, evaluated over the (finite) configuration
// graph by least fixpoint: accepting configurations grow from the accept
// state; an existential configuration accepts when some legal successor
// does, a universal one when both do (an out-of-range head move makes a
// universal configuration non-accepting and is skipped for existential
// choices).

struct AtmConfig {
  std::string state;
  int h1, h2;
  std::string tape2;
  bool operator<(const AtmConfig& o) const {
    return std::tie(state, h1, h2, tape2) < std::tie(o.state, o.h1, o.h2, o.tape2);
  }
};

inline bool atm_accepts(const ATMSpec& m, bool deterministic = false) {
  AtmConfig init{m.start, 1, m.tape2_lo(),
                 std::string(m.space_bound, m.alphabet[0][0])};

  auto step = [&](const AtmConfig& c, const AtmStep& st,
                  std::vector<AtmConfig>& out) -> bool {
    int n1 = c.h1 + st.move1, n2 = c.h2 + st.move2;
    if (n1 < m.tape1_lo() || n1 > m.tape1_hi() || n2 < m.tape2_lo() ||
        n2 > m.tape2_hi())
      return false;
    AtmConfig next = c;
    next.state = st.state;
    next.tape2[c.h2 - m.tape2_lo()] = st.write2[0];
    next.h1 = n1;
    next.h2 = n2;
    out.push_back(std::move(next));
    return true;
  };

  // reachable configuration graph
  std::map<AtmConfig, std::vector<std::vector<AtmConfig>>> graph;
  std::vector<AtmConfig> todo{init};
  while (!todo.empty()) {
    AtmConfig c = todo.back();
    todo.pop_back();
    if (graph.count(c)) continue;
    auto& branches = graph[c];
    if (c.state == m.accept || c.state == m.reject) continue;
    std::string a = m.tape1_symbol(c.h1);
    std::string b(1, c.tape2[c.h2 - m.tape2_lo()]);
    auto key = std::make_tuple(c.state, a, b);
    std::vector<const AtmStep*> steps{&m.delta1.at(key)};
    if (!deterministic) steps.push_back(&m.delta2.at(key));
    for (const AtmStep* st : steps) {
      std::vector<AtmConfig> out;
      step(c, *st, out);  // empty when out of range
      branches.push_back(out);
      for (auto& n : out) todo.push_back(n);
    }
  }

  std::set<AtmConfig> accepting;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [c, branches] : graph) {
      if (accepting.count(c)) continue;
      bool acc = false;
      if (c.state == m.accept) {
        acc = true;
      } else if (c.state == m.reject) {
        acc = false;
      } else {
        bool universal = m.universal.count(c.state) > 0 && !deterministic;
        if (universal) {
          acc = true;
          for (auto& branch : branches) {
            bool branch_ok = false;
            for (auto& n : branch)
              if (accepting.count(n)) branch_ok = true;
            if (!branch_ok) acc = false;
          }
        } else {
          for (auto& branch : branches)
            for (auto& n : branch)
              if (accepting.count(n)) acc = true;
        }
      }
      if (acc) {
        accepting.insert(c);
        changed = true;
      }
    }
  }
  return accepting.count(init) > 0;
}

}  // namespace testsupport
