#pragma once

// Bounded brute-force Kripke-model search: the independent ground truth the
// solver and the translations are tested against.
//
// For diamond-free NNF input the search space is thinned without losing
// completeness: truth of diamond-free NNF formulas survives edge removal, so
// serial relations shrink to total functions, serial-transitive ones to
// idempotent functions, reflexive ones to the identity, and every non-minimal
// relation to the demanded closure of the union below it. For input with
// diamonds the oracle falls back to enumerating closures of arbitrary
// generator relations (feasible only for very small bounds).

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxsat/formula.hpp"
#include "boxsat/logic.hpp"
#include "boxsat/model.hpp"

namespace boxsat {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool found = false;
  KripkeModel model;  // meaningful iff found
  std::string world;  // meaningful iff found
  int bound = 0;
};

namespace detail {

using Mask = std::uint32_t;

// succ[agent][world] = bitmask of successors; agents are 1-based.
struct RelUniverse {
  int n = 0;
  std::vector<std::vector<Mask>> succ;
};

inline Mask full_mask(int n) { return n >= 32 ? ~Mask(0) : ((Mask(1) << n) - 1); }

inline void transitive_close_masks(std::vector<Mask>& s) {
  int n = static_cast<int>(s.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int w = 0; w < n; ++w) {
      Mask m = s[w];
      Mask acc = m;
      for (int v = 0; v < n; ++v)
        if (m & (Mask(1) << v)) acc |= s[v];
      if (acc != s[w]) {
        s[w] = acc;
        changed = true;
      }
    }
  }
}

inline void symmetric_close_masks(std::vector<Mask>& s) {
  int n = static_cast<int>(s.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int w = 0; w < n; ++w)
      for (int v = 0; v < n; ++v)
        if ((s[w] & (Mask(1) << v)) && !(s[v] & (Mask(1) << w))) {
          s[v] |= Mask(1) << w;
          changed = true;
        }
  }
}

struct EvalCtx {
  const RelUniverse* rels;
  const std::map<std::string, Mask>* val;
  Mask full;
};

inline Mask eval_mask(Formula f, const EvalCtx& c) {
  switch (f.kind()) {
    case Kind::Bottom:
      return 0;
    case Kind::Top:
      return c.full;
    case Kind::Lit: {
      auto it = c.val->find(f.name());
      Mask v = it == c.val->end() ? 0 : it->second;
      return f.negated() ? (~v & c.full) : v;
    }
    case Kind::And:
      return eval_mask(f.left(), c) & eval_mask(f.right(), c);
    case Kind::Or:
      return eval_mask(f.left(), c) | eval_mask(f.right(), c);
    case Kind::Box: {
      Mask sub = eval_mask(f.sub(), c);
      Mask out = 0;
      const auto& s = c.rels->succ[f.agent()];
      for (int w = 0; w < c.rels->n; ++w)
        if ((sub & s[w]) == s[w]) out |= Mask(1) << w;
      return out;
    }
    case Kind::Dia: {
      Mask sub = eval_mask(f.sub(), c);
      Mask out = 0;
      const auto& s = c.rels->succ[f.agent()];
      for (int w = 0; w < c.rels->n; ++w)
        if (sub & s[w]) out |= Mask(1) << w;
      return out;
    }
  }
  return 0;
}

inline KripkeModel masks_to_model(const LogicSpec& spec, const RelUniverse& u,
                                  const std::vector<std::string>& vars,
                                  const std::vector<Mask>& valmasks) {
  KripkeModel m;
  for (int w = 0; w < u.n; ++w) m.worlds.push_back("w" + std::to_string(w));
  for (int a = 1; a <= spec.agent_count(); ++a) {
    auto& rel = m.relations[a];
    for (int w = 0; w < u.n; ++w)
      for (int v = 0; v < u.n; ++v)
        if (u.succ[a][w] & (Mask(1) << v))
          rel.insert({m.worlds[w], m.worlds[v]});
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    auto& set = m.valuation[vars[j]];
    for (int w = 0; w < u.n; ++w)
      if (valmasks[j] & (Mask(1) << w)) set.insert(m.worlds[w]);
  }
  return m;
}

// Candidate successor tables per frame class, cached per (class kind, n).
enum class AxisKind { Identity, Functions, IdempotentFunctions };

inline const std::vector<std::vector<Mask>>& axis_candidates(AxisKind kind, int n) {
  static std::map<std::pair<int, int>, std::vector<std::vector<Mask>>> cache;
  auto key = std::make_pair(static_cast<int>(kind), n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<Mask>> out;
  if (kind == AxisKind::Identity) {
    std::vector<Mask> id(n);
    for (int w = 0; w < n; ++w) id[w] = Mask(1) << w;
    out.push_back(std::move(id));
  } else {
    std::vector<int> f(n, 0);
    for (;;) {
      bool keep = true;
      if (kind == AxisKind::IdempotentFunctions)
        for (int w = 0; w < n; ++w)
          if (f[f[w]] != f[w]) keep = false;
      if (keep) {
        std::vector<Mask> s(n);
        for (int w = 0; w < n; ++w) s[w] = Mask(1) << f[w];
        out.push_back(std::move(s));
      }
      int i = n - 1;
      while (i >= 0 && f[i] == n - 1) f[i--] = 0;
      if (i < 0) break;
      ++f[i];
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

// Enumerates candidate successor-mask tables for the thinned (diamond-free)
// family, one axis per effective-minimal agent; every other relation is
// derived. Deterministic lexicographic order; fill() reuses the caller's
// buffers.
class ThinnedFamily {
 public:
  ThinnedFamily(const LogicSpec& spec, int n) : spec_(spec), n_(n) {
    for (int a : spec.min_eff_all()) {
      FrameClass c = spec.frame(a);
      AxisKind kind = reflexive_class(c) ? AxisKind::Identity
                      : transitive_class(c) ? AxisKind::IdempotentFunctions
                                            : AxisKind::Functions;
      axes_.push_back(Axis{a, &axis_candidates(kind, n)});
    }
    counters_.assign(axes_.size(), 0);
    done_ = false;
    for (auto& a : axes_)
      if (a.candidates->empty()) done_ = true;
  }

  bool done() const { return done_; }

  void fill(RelUniverse& u) const {
    u.n = n_;
    if (u.succ.size() != static_cast<std::size_t>(spec_.agent_count() + 1))
      u.succ.assign(spec_.agent_count() + 1, std::vector<Mask>(n_, 0));
    for (auto& s : u.succ) {
      s.assign(n_, 0);
    }
    for (std::size_t i = 0; i < axes_.size(); ++i)
      u.succ[axes_[i].agent] = (*axes_[i].candidates)[counters_[i]];
    for (int a : spec_.agents_topological()) {
      if (spec_.vacuous(a)) continue;
      if (std::binary_search(spec_.min_eff_all().begin(),
                             spec_.min_eff_all().end(), a))
        continue;
      auto& s = u.succ[a];
      for (int j : spec_.nonvacuous_predecessors(a))
        for (int w = 0; w < n_; ++w) s[w] |= u.succ[j][w];
      if (reflexive_class(spec_.frame(a)))
        for (int w = 0; w < n_; ++w) s[w] |= Mask(1) << w;
      if (transitive_class(spec_.frame(a))) transitive_close_masks(s);
    }
  }

  void advance() {
    for (std::size_t i = counters_.size(); i-- > 0;) {
      if (++counters_[i] < axes_[i].candidates->size()) return;
      counters_[i] = 0;
    }
    done_ = true;
  }

 private:
  struct Axis {
    int agent;
    const std::vector<std::vector<Mask>>* candidates;
  };

  const LogicSpec& spec_;
  int n_;
  std::vector<Axis> axes_;
  std::vector<std::size_t> counters_;
  bool done_ = false;
};

// Packed evaluation: when n * 2^(n * #vars) fits in 64 bits, bit (v*n + w)
// of a word holds a formula's truth at world w under valuation v, so one
// pass covers every valuation at once.
struct PackedCtx {
  const RelUniverse* rels;
  std::uint64_t full;         // all (valuation, world) bits
  std::uint64_t var_bits[2];  // truth pattern per variable index
  std::uint64_t col_mask[8];  // bits of one world across all valuations
  int n;
  int nvars;
};

inline bool packed_viable(int n, int nvars) {
  return nvars <= 2 && n <= 8 && n * (1LL << (n * nvars)) <= 64;
}

inline PackedCtx make_packed_ctx(const RelUniverse& u, int nvars) {
  PackedCtx c;
  c.rels = &u;
  c.n = u.n;
  c.nvars = nvars;
  int vals = 1 << (u.n * nvars);
  c.full = (vals * u.n == 64) ? ~0ULL : ((1ULL << (vals * u.n)) - 1);
  for (int j = 0; j < nvars && j < 2; ++j) {
    std::uint64_t bits = 0;
    for (int v = 0; v < vals; ++v)
      for (int w = 0; w < u.n; ++w)
        if ((v >> (j * u.n + w)) & 1) bits |= 1ULL << (v * u.n + w);
    c.var_bits[j] = bits;
  }
  for (int w = 0; w < u.n; ++w) {
    std::uint64_t bits = 0;
    for (int v = 0; v < vals; ++v) bits |= 1ULL << (v * u.n + w);
    c.col_mask[w] = bits;
  }
  return c;
}

inline std::uint64_t packed_eval(Formula f, const PackedCtx& c,
                                 const std::map<std::string, int>& var_index) {
  switch (f.kind()) {
    case Kind::Bottom:
      return 0;
    case Kind::Top:
      return c.full;
    case Kind::Lit: {
      std::uint64_t v = c.var_bits[var_index.at(f.name())];
      return f.negated() ? (~v & c.full) : v;
    }
    case Kind::And:
      return packed_eval(f.left(), c, var_index) &
             packed_eval(f.right(), c, var_index);
    case Kind::Or:
      return packed_eval(f.left(), c, var_index) |
             packed_eval(f.right(), c, var_index);
    case Kind::Box:
    case Kind::Dia: {
      std::uint64_t sub = packed_eval(f.sub(), c, var_index);
      const auto& s = c.rels->succ[f.agent()];
      bool box = f.kind() == Kind::Box;
      std::uint64_t out = 0;
      for (int w = 0; w < c.n; ++w) {
        Mask m = s[w];
        std::uint64_t acc = box ? c.full : 0;
        while (m) {
          int t = __builtin_ctz(m);
          m &= m - 1;
          std::uint64_t shifted = t >= w ? (sub >> (t - w)) : (sub << (w - t));
          if (box)
            acc &= shifted;
          else
            acc |= shifted;
        }
        out |= acc & c.col_mask[w];
      }
      return out;
    }
  }
  return 0;
}

// Full generator enumeration for input with diamonds: per agent, closures of
// arbitrary generator sets above the union of the relations below,
// deduplicated, ordered by pair count then value.
template <typename Fn>
inline bool enumerate_full(const LogicSpec& spec, int n, std::size_t agent_pos,
                           const std::vector<int>& topo, RelUniverse& u,
                           const Fn& visit) {
  if (agent_pos == topo.size()) return visit(u);
  int a = topo[agent_pos];
  FrameClass c = spec.frame(a);
  std::vector<Mask> base(n, 0);
  for (int j : spec.predecessors(a))
    for (int w = 0; w < n; ++w) base[w] |= u.succ[j][w];

  std::vector<std::uint64_t> gens;
  for (std::uint64_t g = 0; g < (1ULL << (n * n)); ++g) gens.push_back(g);
  std::stable_sort(gens.begin(), gens.end(), [](std::uint64_t x, std::uint64_t y) {
    int px = __builtin_popcountll(x), py = __builtin_popcountll(y);
    return px != py ? px < py : x < y;
  });

  std::set<std::vector<Mask>> seen;
  for (std::uint64_t g : gens) {
    std::vector<Mask> s = base;
    for (int w = 0; w < n; ++w)
      s[w] |= static_cast<Mask>((g >> (w * n)) & full_mask(n));
    if (reflexive_class(c))
      for (int w = 0; w < n; ++w) s[w] |= Mask(1) << w;
    if (c == FrameClass::S5) symmetric_close_masks(s);
    if (transitive_class(c)) transitive_close_masks(s);
    if (c == FrameClass::S5) {
      // closures interact; iterate to a fixpoint
      std::vector<Mask> prev;
      do {
        prev = s;
        symmetric_close_masks(s);
        transitive_close_masks(s);
      } while (s != prev);
    }
    if (!spec.vacuous(a) && serial_class(c)) {
      bool serial = true;
      for (int w = 0; w < n; ++w)
        if (!s[w]) serial = false;
      if (!serial) continue;
    }
    if (!seen.insert(s).second) continue;
    u.succ[a] = s;
    if (enumerate_full(spec, n, agent_pos + 1, topo, u, visit)) return true;
  }
  u.succ[a].assign(n, 0);
  return false;
}

}  // namespace detail

inline OracleResult brute_sat(const LogicSpec& spec, Formula f, int max_worlds,
                              int var_budget = 2, bool force_full = false) {
  if (max_worlds < 1) throw OracleError("max_worlds must be >= 1");
  if (max_worlds > 16) throw OracleError("bound too large for the oracle (max 16)");
  Metrics ms = metrics(f);
  if (static_cast<int>(ms.variables.size()) > var_budget)
    throw OracleError("variable budget exceeded (" +
                      std::to_string(ms.variables.size()) + " > " +
                      std::to_string(var_budget) +
                      "); use a formula with fewer variables");
  int a = max_agent(f);
  if (a > spec.agent_count())
    throw OracleError("formula uses agent " + std::to_string(a) +
                      " but the logic has only " +
                      std::to_string(spec.agent_count()) + " agents");

  std::vector<std::string> vars(ms.variables.begin(), ms.variables.end());
  bool thinned = f.diamond_free() && !force_full;

  OracleResult result;
  result.bound = max_worlds;

  std::map<std::string, int> var_index;
  for (std::size_t j = 0; j < vars.size(); ++j) var_index[vars[j]] = static_cast<int>(j);

  auto finish = [&](const detail::RelUniverse& u, std::uint64_t v, int w) {
    int n = u.n;
    detail::Mask full = detail::full_mask(n);
    std::vector<detail::Mask> valmasks(vars.size(), 0);
    for (std::size_t j = 0; j < vars.size(); ++j)
      valmasks[j] = static_cast<detail::Mask>((v >> (j * n)) & full);
    result.found = true;
    result.model = detail::masks_to_model(spec, u, vars, valmasks);
    result.world = "w" + std::to_string(w);
    // internal soundness assertion on every witness
    if (!verify_frame(result.model, spec).empty())
      throw std::logic_error("internal error: oracle witness violates frame");
    if (!check(result.model, result.world, f))
      throw std::logic_error("internal error: oracle witness fails check");
  };

  auto try_universe = [&](const detail::RelUniverse& u) -> bool {
    int n = u.n;
    if (detail::packed_viable(n, static_cast<int>(vars.size()))) {
      detail::PackedCtx ctx = detail::make_packed_ctx(u, static_cast<int>(vars.size()));
      std::uint64_t truth = detail::packed_eval(f, ctx, var_index);
      if (!truth) return false;
      int bit = __builtin_ctzll(truth);  // smallest valuation, then world
      finish(u, static_cast<std::uint64_t>(bit / n), bit % n);
      return true;
    }
    detail::Mask full = detail::full_mask(n);
    std::uint64_t val_count = 1ULL << (n * vars.size());
    std::map<std::string, detail::Mask> val;
    for (std::uint64_t v = 0; v < val_count; ++v) {
      for (std::size_t j = 0; j < vars.size(); ++j)
        val[vars[j]] = static_cast<detail::Mask>((v >> (j * n)) & full);
      detail::EvalCtx ctx{&u, &val, full};
      detail::Mask truth = detail::eval_mask(f, ctx);
      if (truth) {
        finish(u, v, __builtin_ctz(truth));
        return true;
      }
    }
    return false;
  };

  detail::RelUniverse scratch;
  for (int n = 1; n <= max_worlds; ++n) {
    if (thinned) {
      detail::ThinnedFamily fam(spec, n);
      while (!fam.done()) {
        fam.fill(scratch);
        if (try_universe(scratch)) return result;
        fam.advance();
      }
    } else {
      if (static_cast<std::uint64_t>(n) * n > 16)
        throw OracleError(
            "full enumeration (diamonds present) supports at most 4 worlds");
      detail::RelUniverse u;
      u.n = n;
      u.succ.assign(spec.agent_count() + 1, std::vector<detail::Mask>(n, 0));
      if (detail::enumerate_full(spec, n, 0, spec.agents_topological(), u,
                                 try_universe))
        return result;
    }
  }
  return result;
}

}  // namespace boxsat
