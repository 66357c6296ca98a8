#pragma once

// Four-way complexity classification of the diamond-free (and 1-variable)
// fragment of a logic description. Cases are tested strictly in order; the
// first hit is returned together with the witnessing agents. Vacuous agents
// are ignored throughout (their boxes hold by default).

#include <optional>
#include <string>
#include <vector>

#include "boxsat/logic.hpp"

namespace boxsat {

enum class ComplexityCase : int {
  Case1_EXP = 1,
  Case2_PSPACE = 2,
  Case3_PSPACE = 3,
  Case4_NP = 4,
};

inline const char* complexity_case_name(ComplexityCase c) {
  switch (c) {
    case ComplexityCase::Case1_EXP: return "Case1_EXP";
    case ComplexityCase::Case2_PSPACE: return "Case2_PSPACE";
    case ComplexityCase::Case3_PSPACE: return "Case3_PSPACE";
    case ComplexityCase::Case4_NP: return "Case4_NP";
  }
  return "?";
}

struct ComplexityVerdict {
  ComplexityCase which = ComplexityCase::Case4_NP;
  std::optional<int> witness_agent;            // the i of the fired case
  std::optional<std::vector<int>> witness_set; // the A
  std::optional<int> witness_j;                // case 2's pure-and-simple j
  std::string one_var_class;
  std::string multi_var_class;
};

namespace detail {

// All subsets of `pool` of the given size, lexicographic, filtered to pure
// sets.
inline std::vector<std::vector<int>> pure_subsets(const LogicSpec& spec,
                                                  const std::vector<int>& pool,
                                                  std::size_t k) {
  std::vector<std::vector<int>> out;
  std::vector<int> pure_pool;
  for (int a : pool)
    if (!reflexive_class(spec.frame(a))) pure_pool.push_back(a);
  if (pure_pool.size() < k) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    std::vector<int> s;
    for (std::size_t i : idx) s.push_back(pure_pool[i]);
    out.push_back(std::move(s));
    std::size_t i = k;
    while (i-- > 0) {
      if (idx[i] + (k - i) < pure_pool.size()) {
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return out;
    }
  }
}

}  // namespace detail

inline ComplexityVerdict classify(const LogicSpec& spec) {
  ComplexityVerdict v;
  std::vector<int> agents;
  for (int i = 1; i <= spec.agent_count(); ++i)
    if (!spec.vacuous(i)) agents.push_back(i);

  auto finish = [&](ComplexityCase c) {
    v.which = c;
    switch (c) {
      case ComplexityCase::Case1_EXP:
        v.one_var_class = v.multi_var_class = "EXP-complete";
        break;
      case ComplexityCase::Case2_PSPACE:
      case ComplexityCase::Case3_PSPACE:
        v.one_var_class = v.multi_var_class = "PSPACE-complete";
        break;
      case ComplexityCase::Case4_NP:
        v.one_var_class = "P";
        v.multi_var_class = "NP-complete";
        break;
    }
    return v;
  };

  // Case 1: transitive F(i) with a pure A <= min(i), |A| = 2 simple or |A| = 3.
  for (int i : agents) {
    if (!transitive_class(spec.frame(i))) continue;
    for (auto& A : detail::pure_subsets(spec, spec.min_eff(i), 2))
      if (spec.is_simple(A)) {
        v.witness_agent = i;
        v.witness_set = A;
        return finish(ComplexityCase::Case1_EXP);
      }
    for (auto& A : detail::pure_subsets(spec, spec.min_eff(i), 3)) {
      v.witness_agent = i;
      v.witness_set = A;
      return finish(ComplexityCase::Case1_EXP);
    }
  }

  // Case 2: pure A <= min(i) with |A| = 2 and some pure-and-simple j in
  // min(N), or |A| = 3.
  std::optional<int> pure_simple_j;
  for (int j : spec.min_eff_all())
    if (!reflexive_class(spec.frame(j)) && spec.is_simple({j})) {
      pure_simple_j = j;
      break;
    }
  for (int i : agents) {
    if (pure_simple_j) {
      auto subs = detail::pure_subsets(spec, spec.min_eff(i), 2);
      if (!subs.empty()) {
        v.witness_agent = i;
        v.witness_set = subs.front();
        v.witness_j = pure_simple_j;
        return finish(ComplexityCase::Case2_PSPACE);
      }
    }
    for (auto& A : detail::pure_subsets(spec, spec.min_eff(i), 3)) {
      v.witness_agent = i;
      v.witness_set = A;
      return finish(ComplexityCase::Case2_PSPACE);
    }
  }

  // Case 3: transitive F(i) with pure A <= min(i), |A| = 1 simple or |A| = 2.
  for (int i : agents) {
    if (!transitive_class(spec.frame(i))) continue;
    for (auto& A : detail::pure_subsets(spec, spec.min_eff(i), 1))
      if (spec.is_simple(A)) {
        v.witness_agent = i;
        v.witness_set = A;
        return finish(ComplexityCase::Case3_PSPACE);
      }
    for (auto& A : detail::pure_subsets(spec, spec.min_eff(i), 2)) {
      v.witness_agent = i;
      v.witness_set = A;
      return finish(ComplexityCase::Case3_PSPACE);
    }
  }

  return finish(ComplexityCase::Case4_NP);
}

}  // namespace boxsat
