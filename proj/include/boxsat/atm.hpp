#pragma once

// Alternating two-tape machine descriptions and their encoding as
// diamond-free hardness instances. A world of a satisfying model describes a
// machine configuration; the generated formula forces every configuration
// reachable through the serial relations to follow the transition functions
// and never to enter the rejecting state.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "boxsat/formula.hpp"
#include "boxsat/transform.hpp"

namespace boxsat {

struct AtmStep {
  std::string state;   // new state
  std::string write2;  // symbol written at tape 2's head
  int move1 = 0;       // -1, 0, 1
  int move2 = 0;
};

struct ATMSpec {
  std::vector<std::string> states;
  std::set<std::string> existential;
  std::set<std::string> universal;
  std::vector<std::string> alphabet;  // alphabet[0] doubles as blank/boundary
  std::map<std::tuple<std::string, std::string, std::string>, AtmStep> delta1;
  std::map<std::tuple<std::string, std::string, std::string>, AtmStep> delta2;
  std::string start, accept, reject;
  std::string input;
  int space_bound = 1;

  int tape1_lo() const { return 0; }
  int tape1_hi() const { return static_cast<int>(input.size()) + 1; }
  int tape2_lo() const { return 1; }
  int tape2_hi() const { return space_bound; }

  std::string tape1_symbol(int cell) const {
    if (cell <= 0 || cell > static_cast<int>(input.size())) return alphabet[0];
    return std::string(1, input[cell - 1]);
  }

  void validate() const;
  static ATMSpec from_json(const nlohmann::json& j);
};

namespace detail {

inline bool ident_ok(const std::string& s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  return true;
}

inline bool symbol_ok(const std::string& s) {
  return s.size() == 1 &&
         ((s[0] >= 'a' && s[0] <= 'z') || (s[0] >= '0' && s[0] <= '9'));
}

}  // namespace detail

inline void ATMSpec::validate() const {
  if (states.empty()) throw ValidationError("machine needs at least one state");
  std::set<std::string> qset(states.begin(), states.end());
  if (qset.size() != states.size())
    throw ValidationError("duplicate state names");
  for (const auto& s : states)
    if (!detail::ident_ok(s))
      throw ValidationError("state name '" + s +
                            "' must match [a-z][a-z0-9]* ");
  if (alphabet.empty()) throw ValidationError("alphabet must be nonempty");
  std::set<std::string> sigma(alphabet.begin(), alphabet.end());
  if (sigma.size() != alphabet.size())
    throw ValidationError("duplicate alphabet symbols");
  for (const auto& s : alphabet)
    if (!detail::symbol_ok(s))
      throw ValidationError("alphabet symbol '" + s +
                            "' must be one character [a-z0-9]");
  if (!qset.count(start)) throw ValidationError("start state unknown");
  if (!qset.count(accept)) throw ValidationError("accepting state unknown");
  if (!qset.count(reject)) throw ValidationError("rejecting state unknown");
  if (accept == reject)
    throw ValidationError("accepting and rejecting states must differ");
  for (const auto& s : existential)
    if (!qset.count(s)) throw ValidationError("existential state unknown: " + s);
  for (const auto& s : universal)
    if (!qset.count(s)) throw ValidationError("universal state unknown: " + s);
  for (const auto& s : states) {
    bool e = existential.count(s), u = universal.count(s);
    if (e && u)
      throw ValidationError("state '" + s + "' is both existential and universal");
    if (!e && !u)
      throw ValidationError("state '" + s +
                            "' must be listed existential or universal");
  }
  for (char c : input)
    if (!sigma.count(std::string(1, c)))
      throw ValidationError(std::string("input symbol '") + c +
                            "' is not in the alphabet");
  if (space_bound < 1) throw ValidationError("space_bound must be >= 1");
  // transition functions must be total on non-halting states
  for (const auto& e : states) {
    if (e == accept || e == reject) continue;
    for (const auto& a : alphabet)
      for (const auto& b : alphabet) {
        auto key = std::make_tuple(e, a, b);
        for (auto* d : {&delta1, &delta2}) {
          auto it = d->find(key);
          if (it == d->end())
            throw ValidationError("transition missing for (" + e + ", " + a +
                                  ", " + b + ")");
          const AtmStep& st = it->second;
          if (!qset.count(st.state))
            throw ValidationError("transition targets unknown state " + st.state);
          if (!sigma.count(st.write2))
            throw ValidationError("transition writes unknown symbol " + st.write2);
          if (st.move1 < -1 || st.move1 > 1 || st.move2 < -1 || st.move2 > 1)
            throw ValidationError("moves must be -1, 0 or 1");
        }
      }
  }
}

inline ATMSpec ATMSpec::from_json(const nlohmann::json& j) {
  ATMSpec m;
  try {
    m.states = j.at("states").get<std::vector<std::string>>();
    for (const auto& s : j.at("existential")) m.existential.insert(s.get<std::string>());
    for (const auto& s : j.at("universal")) m.universal.insert(s.get<std::string>());
    m.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    auto read_delta = [&](const char* key, auto& out) {
      for (const auto& row : j.at(key)) {
        if (!row.is_array() || row.size() != 7)
          throw ValidationError(std::string(key) +
                                " rows must be [state, a, b, state', c, m1, m2]");
        AtmStep st;
        st.state = row[3].get<std::string>();
        st.write2 = row[4].get<std::string>();
        st.move1 = row[5].get<int>();
        st.move2 = row[6].get<int>();
        out[std::make_tuple(row[0].get<std::string>(), row[1].get<std::string>(),
                            row[2].get<std::string>())] = st;
      }
    };
    read_delta("delta1", m.delta1);
    read_delta("delta2", m.delta2);
    m.start = j.at("start").get<std::string>();
    m.accept = j.at("accept").get<std::string>();
    m.reject = j.at("reject").get<std::string>();
    m.input = j.at("input").get<std::string>();
    m.space_bound = j.at("space_bound").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed machine description: ") + e.what());
  }
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// The encoding.

namespace detail {

struct AtmVars {
  const ATMSpec& m;

  Formula state(const std::string& e, bool neg = false) const {
    return Formula::lit("q_" + e, neg);
  }
  Formula head1(int i, bool neg = false) const {
    return Formula::lit("t1_" + std::to_string(i), neg);
  }
  Formula head2(int j, bool neg = false) const {
    return Formula::lit("t2_" + std::to_string(j), neg);
  }
  Formula sym1(const std::string& a, int i, bool neg = false) const {
    return Formula::lit("s1_" + a + "_" + std::to_string(i), neg);
  }
  Formula sym2(const std::string& a, int j, bool neg = false) const {
    return Formula::lit("s2_" + a + "_" + std::to_string(j), neg);
  }
};

inline Formula exactly_one(const std::vector<std::pair<Formula, Formula>>& lits) {
  // lits: (positive, negative) pairs
  std::vector<Formula> parts;
  std::vector<Formula> any;
  for (auto& [pos, neg] : lits) any.push_back(pos);
  parts.push_back(disj_all(any));
  for (std::size_t a = 0; a < lits.size(); ++a)
    for (std::size_t b = a + 1; b < lits.size(); ++b)
      parts.push_back(Formula::disj(lits[a].second, lits[b].second));
  return conj_all(parts);
}

}  // namespace detail

// Encode the machine as a diamond-free formula: trimodal (solve against the
// D2K4 preset), or bimodal when `deterministic` (solve against DK4; requires
// no non-halting universal states, and the caller asserts delta1 = delta2 on
// reachable configurations).
inline Formula atm_to_formula(const ATMSpec& m, bool deterministic) {
  m.validate();
  if (deterministic)
    for (const auto& u : m.universal)
      if (u != m.accept && u != m.reject)
        throw ValidationError(
            "deterministic mode requires no non-halting universal states");

  detail::AtmVars v{m};
  std::vector<Formula> com_parts;

  // q: exactly one state
  {
    std::vector<std::pair<Formula, Formula>> lits;
    for (const auto& e : m.states) lits.push_back({v.state(e), v.state(e, true)});
    com_parts.push_back(detail::exactly_one(lits));
  }
  // sigma: exactly one symbol per cell per tape
  {
    std::vector<Formula> parts;
    for (int i = m.tape1_lo(); i <= m.tape1_hi(); ++i) {
      std::vector<std::pair<Formula, Formula>> lits;
      for (const auto& a : m.alphabet)
        lits.push_back({v.sym1(a, i), v.sym1(a, i, true)});
      parts.push_back(detail::exactly_one(lits));
    }
    for (int j = m.tape2_lo(); j <= m.tape2_hi(); ++j) {
      std::vector<std::pair<Formula, Formula>> lits;
      for (const auto& a : m.alphabet)
        lits.push_back({v.sym2(a, j), v.sym2(a, j, true)});
      parts.push_back(detail::exactly_one(lits));
    }
    com_parts.push_back(detail::conj_all(parts));
  }
  // t: exactly one head position per tape
  {
    std::vector<std::pair<Formula, Formula>> l1, l2;
    for (int i = m.tape1_lo(); i <= m.tape1_hi(); ++i)
      l1.push_back({v.head1(i), v.head1(i, true)});
    for (int j = m.tape2_lo(); j <= m.tape2_hi(); ++j)
      l2.push_back({v.head2(j), v.head2(j, true)});
    com_parts.push_back(Formula::conj(detail::exactly_one(l1),
                                      detail::exactly_one(l2)));
  }
  // sigma': symbols away from the head persist into successors
  {
    std::vector<Formula> parts;
    auto keep = [&](Formula sym) {
      Formula kept = Formula::box(1, sym);
      if (!deterministic) kept = Formula::conj(kept, Formula::box(2, sym));
      return kept;
    };
    for (int i = m.tape1_lo(); i <= m.tape1_hi(); ++i)
      for (int i2 = m.tape1_lo(); i2 <= m.tape1_hi(); ++i2) {
        if (i == i2) continue;
        for (const auto& a : m.alphabet)
          parts.push_back(Formula::disj(
              v.head1(i, true),
              Formula::disj(v.sym1(a, i2, true), keep(v.sym1(a, i2)))));
      }
    for (int j = m.tape2_lo(); j <= m.tape2_hi(); ++j)
      for (int j2 = m.tape2_lo(); j2 <= m.tape2_hi(); ++j2) {
        if (j == j2) continue;
        for (const auto& a : m.alphabet)
          parts.push_back(Formula::disj(
              v.head2(j, true),
              Formula::disj(v.sym2(a, j2, true), keep(v.sym2(a, j2)))));
      }
    com_parts.push_back(detail::conj_all(parts));
  }
  // ac: never the rejecting state
  com_parts.push_back(v.state(m.reject, true));

  // successor description D(e', c, j1, j2, m1, m2); out-of-range head moves
  // make the description impossible
  auto D = [&](const AtmStep& st, int j1, int j2) -> Formula {
    int n1 = j1 + st.move1, n2 = j2 + st.move2;
    if (n1 < m.tape1_lo() || n1 > m.tape1_hi() || n2 < m.tape2_lo() ||
        n2 > m.tape2_hi())
      return Formula::bottom();
    return detail::conj_all({v.state(st.state), v.sym2(st.write2, j2),
                             v.head1(n1), v.head2(n2)});
  };
  auto locconf_neg = [&](const std::string& e, const std::string& a,
                         const std::string& b, int j1, int j2) {
    return std::vector<Formula>{v.state(e, true), v.sym1(a, j1, true),
                                v.sym2(b, j2, true), v.head1(j1, true),
                                v.head2(j2, true)};
  };

  // d_E / d_U
  {
    std::vector<Formula> de, du;
    for (const auto& e : m.states) {
      if (e == m.accept || e == m.reject) continue;
      bool exist = m.existential.count(e) > 0;
      for (const auto& a : m.alphabet)
        for (const auto& b : m.alphabet) {
          const AtmStep& s1 = m.delta1.at(std::make_tuple(e, a, b));
          const AtmStep& s2 = m.delta2.at(std::make_tuple(e, a, b));
          for (int j1 = m.tape1_lo(); j1 <= m.tape1_hi(); ++j1)
            for (int j2 = m.tape2_lo(); j2 <= m.tape2_hi(); ++j2) {
              std::vector<Formula> clause = locconf_neg(e, a, b, j1, j2);
              if (exist) {
                Formula rhs = Formula::box(1, D(s1, j1, j2));
                if (!deterministic)
                  rhs = Formula::disj(rhs, Formula::box(1, D(s2, j1, j2)));
                clause.push_back(rhs);
                de.push_back(detail::disj_all(clause));
              } else {
                clause.push_back(Formula::conj(Formula::box(1, D(s1, j1, j2)),
                                               Formula::box(2, D(s2, j1, j2))));
                du.push_back(detail::disj_all(clause));
              }
            }
        }
    }
    if (!de.empty()) com_parts.push_back(detail::conj_all(de));
    if (!du.empty()) com_parts.push_back(detail::conj_all(du));
  }

  Formula com = detail::conj_all(com_parts);

  // st: the initial configuration
  std::vector<Formula> init{v.state(m.start), v.head1(1), v.head2(m.tape2_lo())};
  for (int i = m.tape1_lo(); i <= m.tape1_hi(); ++i)
    init.push_back(v.sym1(m.tape1_symbol(i), i));
  for (int j = m.tape2_lo(); j <= m.tape2_hi(); ++j)
    init.push_back(v.sym2(m.alphabet[0], j));
  Formula st = detail::conj_all(init);

  int master = deterministic ? 2 : 3;
  return Formula::conj(st, Formula::conj(com, Formula::box(master, com)));
}

}  // namespace boxsat
