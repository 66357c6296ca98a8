#pragma once

// Formula translations between the logics: the unimodal-K embedding into the
// three-agent serial logic, the one-variable translations, the bimodal to
// trimodal box rewriting, and the general-setting embeddings driven by
// classifier witnesses.

#include <bit>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "boxsat/formula.hpp"
#include "boxsat/logic.hpp"

namespace boxsat {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Formula box_power(int agent, int times, Formula f) {
  for (int i = 0; i < times; ++i) f = Formula::box(agent, f);
  return f;
}

inline Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::conj(out, fs[i]);
  return out;
}

inline Formula disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::bottom();
  Formula out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::disj(out, fs[i]);
  return out;
}

inline void require_diamond_free(Formula f, const char* who) {
  if (!f.diamond_free())
    throw TransformError(std::string(who) + " requires diamond-free input");
}

inline void require_max_agent(Formula f, int limit, const char* who) {
  if (max_agent(f) > limit)
    throw TransformError(std::string(who) + " accepts agents 1.." +
                         std::to_string(limit) + " only");
}

// 1-based variable indices in lexicographic name order.
inline std::map<std::string, int> variable_indices(Formula f) {
  std::set<std::string> vars;
  collect_variables(f, vars);
  std::map<std::string, int> idx;
  int i = 0;
  for (const auto& v : vars) idx[v] = ++i;
  return idx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unimodal K (full language) -> diamond-free trimodal formula, satisfiable in
// the three-agent serial logic exactly when the input is K-satisfiable. Each
// diamond becomes the unique box sequence dseq assigns to its subformula
// index; each box becomes a [3]-prefix guarded by the marker variable.

inline Formula k_to_d2k(Formula f) {
  detail::require_max_agent(f, 1, "k_to_d2k");
  std::vector<Formula> subs = enumerate_subformulas(f);
  std::size_t k = subs.size();
  if (k == 1) return f;  // a single leaf translates to itself

  // ceil(log2 k) digits; indices encode x-1 so every x in 1..k fits.
  int digits = std::max(1, static_cast<int>(std::bit_width(k - 1)));
  std::set<std::string> vars;
  collect_variables(f, vars);
  std::string q = fresh_variable(vars);

  std::map<const FormulaNode*, std::size_t> index;
  for (std::size_t i = 0; i < subs.size(); ++i) index[subs[i].raw()] = i;

  auto dseq = [&](std::size_t x, Formula body) {
    // dseq(x) = boxes indexed by the binary digits of x-1, most significant
    // first, digit b selecting agent b+1
    std::size_t bits = x - 1;
    for (int d = 0; d < digits; ++d) {
      int b = static_cast<int>((bits >> d) & 1);
      body = Formula::box(b + 1, body);
    }
    return body;
  };

  Formula qpos = Formula::lit(q, false);
  Formula qneg = Formula::lit(q, true);
  std::vector<Formula> tr(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    Formula t = subs[i];
    switch (t.kind()) {
      case Kind::Bottom:
      case Kind::Top:
      case Kind::Lit:
        tr[i] = t;
        break;
      case Kind::And:
        tr[i] = Formula::conj(tr[index.at(t.left().raw())],
                              tr[index.at(t.right().raw())]);
        break;
      case Kind::Or:
        tr[i] = Formula::disj(tr[index.at(t.left().raw())],
                              tr[index.at(t.right().raw())]);
        break;
      case Kind::Box:
        tr[i] = detail::box_power(
            3, digits, Formula::disj(tr[index.at(t.sub().raw())], qneg));
        break;
      case Kind::Dia:
        tr[i] = dseq(i + 1, Formula::conj(tr[index.at(t.sub().raw())], qpos));
        break;
    }
  }
  return Formula::conj(tr.back(), qpos);
}

// ---------------------------------------------------------------------------
// One-variable translation for the three-agent transitive logic: the literal
// p_i becomes a [1][2]^i probe on the fresh variable, everything else is
// untouched.

inline Formula one_var_d2k4(Formula f) {
  detail::require_diamond_free(f, "one_var_d2k4");
  detail::require_max_agent(f, 3, "one_var_d2k4");
  auto idx = detail::variable_indices(f);
  std::set<std::string> vars;
  collect_variables(f, vars);
  std::string q = fresh_variable(vars);

  auto rec = [&](auto&& self, Formula g) -> Formula {
    switch (g.kind()) {
      case Kind::Bottom:
      case Kind::Top:
        return g;
      case Kind::Lit: {
        Formula probe = Formula::lit(q, g.negated());
        probe = detail::box_power(2, idx.at(g.name()), probe);
        return Formula::box(1, probe);
      }
      case Kind::And:
        return Formula::conj(self(self, g.left()), self(self, g.right()));
      case Kind::Or:
        return Formula::disj(self(self, g.left()), self(self, g.right()));
      case Kind::Box:
        return Formula::box(g.agent(), self(self, g.sub()));
      default:
        throw TransformError("one_var_d2k4: unexpected diamond");
    }
  };
  return rec(rec, f);
}

// ---------------------------------------------------------------------------
// One-variable translation for the bimodal transitive logic. Worlds of the
// source model become every B-th world of a [1]-chain (B = 2k+4); the mold s
// pins the block layout:
//
//   offset 0, 1        : q, q                (block header)
//   offsets 2,4,..,2k+2: ~q                  (separators)
//   offset 2j+1, j<=k  : value of p_j        (variable slots)
//   offset 2k+3        : ~q
//
// and forces the next block's header, so the mold reproduces itself along
// the chain through the [2]-payload below. The [2]-payload's escape
// disjuncts (~q | [1]~q) hold at every non-header position but at no header,
// which pins the simulated worlds exactly.

struct OneVarDk4Parts {
  Formula mold;        // s
  Formula translated;  // phi^1 (without the root mold)
  Formula result;      // phi^1 & s
  std::string fresh;   // the single variable
  int block = 0;       // B
};

inline OneVarDk4Parts one_var_dk4_parts(Formula f) {
  detail::require_diamond_free(f, "one_var_dk4");
  detail::require_max_agent(f, 2, "one_var_dk4");
  auto idx = detail::variable_indices(f);
  int k = static_cast<int>(idx.size());
  int block = 2 * k + 4;
  std::set<std::string> vars;
  collect_variables(f, vars);
  std::string q = fresh_variable(vars);
  Formula qpos = Formula::lit(q, false);
  Formula qneg = Formula::lit(q, true);

  std::vector<Formula> mold_parts{qpos, Formula::box(1, qpos)};
  for (int j = 1; j <= k + 1; ++j)
    mold_parts.push_back(detail::box_power(1, 2 * j, qneg));
  mold_parts.push_back(detail::box_power(1, 2 * k + 3, qneg));
  mold_parts.push_back(detail::box_power(1, block, qpos));
  mold_parts.push_back(detail::box_power(1, block + 1, qpos));
  Formula s = detail::conj_all(mold_parts);

  auto rec = [&](auto&& self, Formula g) -> Formula {
    switch (g.kind()) {
      case Kind::Bottom:
      case Kind::Top:
        return g;
      case Kind::Lit:
        return detail::box_power(1, 2 * idx.at(g.name()) + 1,
                                 Formula::lit(q, g.negated()));
      case Kind::And:
        return Formula::conj(self(self, g.left()), self(self, g.right()));
      case Kind::Or:
        return Formula::disj(self(self, g.left()), self(self, g.right()));
      case Kind::Box:
        if (g.agent() == 1)
          return detail::box_power(1, block,
                                   Formula::conj(self(self, g.sub()), s));
        return Formula::box(
            2, Formula::disj(Formula::conj(self(self, g.sub()), s),
                             Formula::disj(qneg, Formula::box(1, qneg))));
      default:
        throw TransformError("one_var_dk4: unexpected diamond");
    }
  };

  OneVarDk4Parts parts;
  parts.mold = s;
  parts.translated = rec(rec, f);
  parts.result = Formula::conj(parts.translated, s);
  parts.fresh = q;
  parts.block = block;
  return parts;
}

inline Formula one_var_dk4(Formula f) { return one_var_dk4_parts(f).result; }

// ---------------------------------------------------------------------------
// Bimodal -> trimodal box rewriting: [1] becomes [1][2] and [2] becomes
// [1][3][2]; the interleaving stops box payloads from cascading in the
// all-transitive target.

inline Formula dk4_to_d4k4(Formula f) {
  detail::require_diamond_free(f, "dk4_to_d4k4");
  detail::require_max_agent(f, 2, "dk4_to_d4k4");
  switch (f.kind()) {
    case Kind::Bottom:
    case Kind::Top:
    case Kind::Lit:
      return f;
    case Kind::And:
      return Formula::conj(dk4_to_d4k4(f.left()), dk4_to_d4k4(f.right()));
    case Kind::Or:
      return Formula::disj(dk4_to_d4k4(f.left()), dk4_to_d4k4(f.right()));
    case Kind::Box: {
      Formula sub = dk4_to_d4k4(f.sub());
      if (f.agent() == 1) return Formula::box(1, Formula::box(2, sub));
      return Formula::box(1, Formula::box(3, Formula::box(2, sub)));
    }
    default:
      throw TransformError("dk4_to_d4k4: unexpected diamond");
  }
}

// ---------------------------------------------------------------------------
// General-setting embeddings, parameterized by the witnessing agents of the
// target logic. Modes mirror the three translation shapes:
//   pair_simple(x,y,i): fixed box words over {x,y} with an [i]-headed word
//                       for agent 3; needs pure {x,y} <= min(i), x simple,
//                       F(i) transitive
//   triple(x,y,z,i):    rotation over {x,y,z} (agent 3 maps to [i]); needs
//                       pure {x,y,z} <= min(i)
//   pair_with_j(x,y,i,j): two-letter words ending in the pure-and-simple
//                       minimal agent j; needs pure {x,y} <= min(i) and such
//                       a j in min(N)

struct EmbedPairSimple {
  int x, y, i;
};
struct EmbedTriple {
  int x, y, z, i;
};
struct EmbedPairWithJ {
  int x, y, i, j;
};
using EmbedMode = std::variant<EmbedPairSimple, EmbedTriple, EmbedPairWithJ>;

namespace detail {

inline void require_in_min(const LogicSpec& spec, int member, int i,
                           const char* cond) {
  const auto& mins = spec.min_eff(i);
  if (!std::binary_search(mins.begin(), mins.end(), member))
    throw TransformError(std::string("embedding hypothesis failed (") + cond +
                         "): agent " + std::to_string(member) +
                         " is not in min(" + std::to_string(i) + ")");
}

inline void require_pure(const LogicSpec& spec, std::vector<int> agents,
                         const char* cond) {
  if (!spec.is_pure(agents))
    throw TransformError(std::string("embedding hypothesis failed (") + cond +
                         "): the witness set is not pure");
}

inline Formula apply_word(const std::vector<int>& word, Formula body) {
  for (std::size_t i = word.size(); i-- > 0;) body = Formula::box(word[i], body);
  return body;
}

inline Formula embed_words(Formula f, const std::vector<int>& w1,
                           const std::vector<int>& w2,
                           const std::vector<int>& w3) {
  switch (f.kind()) {
    case Kind::Bottom:
    case Kind::Top:
    case Kind::Lit:
      return f;
    case Kind::And:
      return Formula::conj(embed_words(f.left(), w1, w2, w3),
                           embed_words(f.right(), w1, w2, w3));
    case Kind::Or:
      return Formula::disj(embed_words(f.left(), w1, w2, w3),
                           embed_words(f.right(), w1, w2, w3));
    case Kind::Box: {
      Formula sub = embed_words(f.sub(), w1, w2, w3);
      switch (f.agent()) {
        case 1: return apply_word(w1, sub);
        case 2: return apply_word(w2, sub);
        case 3: return apply_word(w3, sub);
        default:
          throw TransformError("embed: source agents must be 1..3");
      }
    }
    default:
      throw TransformError("embed requires diamond-free input");
  }
}

}  // namespace detail

inline Formula embed_general(Formula f, const LogicSpec& target,
                             const EmbedMode& mode) {
  detail::require_diamond_free(f, "embed_general");
  detail::require_max_agent(f, 3, "embed_general");

  if (auto* m = std::get_if<EmbedPairSimple>(&mode)) {
    if (m->x == m->y)
      throw TransformError("embedding hypothesis failed (case 1, |A|=2): x and y coincide");
    detail::require_in_min(target, m->x, m->i, "case 1, |A|=2 simple");
    detail::require_in_min(target, m->y, m->i, "case 1, |A|=2 simple");
    detail::require_pure(target, {m->x, m->y}, "case 1, |A|=2 simple");
    if (!transitive_class(target.frame(m->i)))
      throw TransformError(
          "embedding hypothesis failed (case 1): F(i) must be a transitive class");
    if (transitive_class(target.frame(m->x)))
      throw TransformError(
          "embedding hypothesis failed (case 1, |A|=2 simple): F(x) must not be transitive");
    int x = m->x, y = m->y, i = m->i;
    return detail::embed_words(f, {x, x, x, y, x, y, x, x},
                               {y, x, x, y, x, y, x, x}, {i, y, x, y, x, x});
  }
  if (auto* m = std::get_if<EmbedPairWithJ>(&mode)) {
    if (m->x == m->y)
      throw TransformError("embedding hypothesis failed (case 2, |A|=2): x and y coincide");
    detail::require_in_min(target, m->x, m->i, "case 2, |A|=2");
    detail::require_in_min(target, m->y, m->i, "case 2, |A|=2");
    detail::require_pure(target, {m->x, m->y}, "case 2, |A|=2");
    const auto& minN = target.min_eff_all();
    if (!std::binary_search(minN.begin(), minN.end(), m->j))
      throw TransformError(
          "embedding hypothesis failed (case 2): j must be in min(N)");
    if (!target.is_pure({m->j}) || !target.is_simple({m->j}))
      throw TransformError(
          "embedding hypothesis failed (case 2): j must be pure and simple");
    return detail::embed_words(f, {m->x, m->j}, {m->y, m->j}, {m->i, m->j});
  }
  const auto& m = std::get<EmbedTriple>(mode);
  if (m.x == m.y || m.y == m.z || m.x == m.z)
    throw TransformError("embedding hypothesis failed (|A|=3): agents must be distinct");
  detail::require_in_min(target, m.x, m.i, "|A|=3");
  detail::require_in_min(target, m.y, m.i, "|A|=3");
  detail::require_in_min(target, m.z, m.i, "|A|=3");
  detail::require_pure(target, {m.x, m.y, m.z}, "|A|=3");

  // Rotation state: agent 1 advances one step, agent 2 two steps, agent 3
  // resolves to [i] and keeps the state.
  auto next = [&](int a) { return a == m.x ? m.y : (a == m.y ? m.z : m.x); };
  auto rec = [&](auto&& self, Formula g, int state) -> Formula {
    switch (g.kind()) {
      case Kind::Bottom:
      case Kind::Top:
      case Kind::Lit:
        return g;
      case Kind::And:
        return Formula::conj(self(self, g.left(), state),
                             self(self, g.right(), state));
      case Kind::Or:
        return Formula::disj(self(self, g.left(), state),
                             self(self, g.right(), state));
      case Kind::Box: {
        if (g.agent() == 1) {
          int b = next(state);
          return Formula::box(b, self(self, g.sub(), b));
        }
        if (g.agent() == 2) {
          int c = next(next(state));
          return Formula::box(c, self(self, g.sub(), c));
        }
        return Formula::box(m.i, self(self, g.sub(), state));
      }
      default:
        throw TransformError("embed requires diamond-free input");
    }
  };
  return rec(rec, f, m.x);
}

}  // namespace boxsat
