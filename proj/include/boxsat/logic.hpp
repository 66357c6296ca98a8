#pragma once

// Logic descriptions (agents, inclusion relation, frame classes), validation
// and normalization, and the structural predicates used by the classifier
// and the tableau engine.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxsat/formula.hpp"

namespace boxsat {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FrameClass : std::uint8_t { K, D, T, K4, D4, S5 };

inline bool serial_class(FrameClass c) {
  return c == FrameClass::D || c == FrameClass::T || c == FrameClass::D4 ||
         c == FrameClass::S5;
}
inline bool reflexive_class(FrameClass c) {
  return c == FrameClass::T || c == FrameClass::S5;
}
inline bool transitive_class(FrameClass c) {
  return c == FrameClass::K4 || c == FrameClass::D4 || c == FrameClass::S5;
}

inline const char* frame_class_name(FrameClass c) {
  switch (c) {
    case FrameClass::K: return "K";
    case FrameClass::D: return "D";
    case FrameClass::T: return "T";
    case FrameClass::K4: return "K4";
    case FrameClass::D4: return "D4";
    case FrameClass::S5: return "S5";
  }
  return "?";
}

inline FrameClass parse_frame_class(const std::string& s) {
  if (s == "K") return FrameClass::K;
  if (s == "D") return FrameClass::D;
  if (s == "T") return FrameClass::T;
  if (s == "K4") return FrameClass::K4;
  if (s == "D4") return FrameClass::D4;
  if (s == "S5") return FrameClass::S5;
  throw ValidationError("unknown frame class '" + s +
                        "' (expected K, D, T, K4, D4 or S5)");
}

// A validated, normalized logic description. inclusion() is irreflexive,
// acyclic and transitively closed; i < j in a pair (i, j) means R_i <= R_j.
// Agents whose boxes hold by default (original class K/K4 with no serial
// modality at or below them) are marked vacuous and keep their original
// class; every other K/K4 agent is normalized to D/D4.
class LogicSpec {
 public:
  static LogicSpec validate_and_normalize(int agent_count,
                                          std::vector<std::pair<int, int>> raw_inclusion,
                                          std::map<int, FrameClass> raw_frame) {
    if (agent_count < 1) throw ValidationError("agent count must be >= 1");
    LogicSpec spec;
    spec.agent_count_ = agent_count;
    spec.frame_.assign(agent_count + 1, FrameClass::K);
    for (auto& [i, c] : raw_frame) {
      if (i < 1 || i > agent_count)
        throw ValidationError("frame class given for unknown agent " +
                              std::to_string(i));
      spec.frame_[i] = c;
    }
    if (static_cast<int>(raw_frame.size()) != agent_count)
      throw ValidationError("every agent needs a frame class");

    // Inclusion: reject self-loops and cycles, then close transitively.
    std::vector<std::vector<bool>> inc(agent_count + 1,
                                       std::vector<bool>(agent_count + 1, false));
    for (auto& [i, j] : raw_inclusion) {
      if (i < 1 || i > agent_count || j < 1 || j > agent_count)
        throw ValidationError("inclusion pair references unknown agent");
      if (i == j)
        throw ValidationError("inclusion self-loop on agent " + std::to_string(i));
      inc[i][j] = true;
    }
    check_acyclic(agent_count, inc);
    for (int k = 1; k <= agent_count; ++k)
      for (int i = 1; i <= agent_count; ++i)
        for (int j = 1; j <= agent_count; ++j)
          if (inc[i][k] && inc[k][j]) inc[i][j] = true;
    for (int i = 1; i <= agent_count; ++i)
      if (inc[i][i])
        throw ValidationError("inclusion cycle through agent " + std::to_string(i));
    for (int i = 1; i <= agent_count; ++i)
      for (int j = 1; j <= agent_count; ++j)
        if (inc[i][j]) spec.inclusion_.emplace_back(i, j);
    spec.preds_.assign(agent_count + 1, {});
    for (auto& [i, j] : spec.inclusion_) spec.preds_[j].push_back(i);

    // Vacuity: a K/K4 agent with no serial modality at or below it imposes
    // nothing in the diamond-free fragment. Everything else inherits
    // seriality, so K becomes D and K4 becomes D4.
    for (int i = 1; i <= agent_count; ++i) {
      FrameClass c = spec.frame_[i];
      if (serial_class(c)) continue;
      bool serial_below = false;
      for (int j : spec.preds_[i])
        if (serial_class(spec.frame_[j])) serial_below = true;
      if (!serial_below) {
        spec.vacuous_.insert(i);
      } else {
        spec.frame_[i] = (c == FrameClass::K) ? FrameClass::D : FrameClass::D4;
      }
    }

    // Forward-only tableau rules cannot push an S5 box back to ancestors,
    // so S5 is only supported in inclusion-minimal position.
    for (int i = 1; i <= agent_count; ++i)
      if (spec.frame_[i] == FrameClass::S5 && !spec.preds_[i].empty())
        throw ValidationError(
            "unsupported combination: agent " + std::to_string(i) +
            " has class S5 but is not inclusion-minimal (some j < it)");

    spec.build_caches();
    return spec;
  }

  // Presets for the logics exercised throughout: the unimodal base logic and
  // the five inclusion combinations.
  static LogicSpec preset(const std::string& name) {
    using FC = FrameClass;
    if (name == "K")
      return validate_and_normalize(1, {}, {{1, FC::K}});
    if (name == "D2K")
      return validate_and_normalize(3, {{1, 3}, {2, 3}},
                                    {{1, FC::D}, {2, FC::D}, {3, FC::K}});
    if (name == "D2K4")
      return validate_and_normalize(3, {{1, 3}, {2, 3}},
                                    {{1, FC::D}, {2, FC::D}, {3, FC::K4}});
    if (name == "DK4")
      return validate_and_normalize(2, {{1, 2}}, {{1, FC::D}, {2, FC::K4}});
    if (name == "D42K4")
      return validate_and_normalize(3, {{1, 3}, {2, 3}},
                                    {{1, FC::D4}, {2, FC::D4}, {3, FC::K4}});
    if (name == "D4K4")
      return validate_and_normalize(2, {{1, 2}}, {{1, FC::D4}, {2, FC::K4}});
    throw ValidationError("unknown preset '" + name +
                          "' (known: K, D2K, D2K4, DK4, D42K4, D4K4)");
  }

  static const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"K",   "D2K",   "D2K4",
                                                "DK4", "D42K4", "D4K4"};
    return names;
  }

  int agent_count() const { return agent_count_; }
  bool valid_agent(int i) const { return i >= 1 && i <= agent_count_; }

  FrameClass frame(int i) const {
    require_agent(i);
    return frame_[i];
  }
  bool vacuous(int i) const {
    require_agent(i);
    return vacuous_.count(i) > 0;
  }
  const std::set<int>& vacuous_agents() const { return vacuous_; }

  const std::vector<std::pair<int, int>>& inclusion() const { return inclusion_; }
  bool includes(int i, int j) const {  // R_i <= R_j
    return std::binary_search(inclusion_.begin(), inclusion_.end(),
                              std::make_pair(i, j));
  }
  const std::vector<int>& predecessors(int i) const {
    require_agent(i);
    return preds_[i];
  }

  // min(i) on the full inclusion relation: the inclusion-minimal agents at
  // or below i.
  std::vector<int> min_of(int i) const {
    require_agent(i);
    std::vector<int> out;
    for (int j = 1; j <= agent_count_; ++j)
      if ((j == i || includes(j, i)) && preds_[j].empty()) out.push_back(j);
    return out;
  }

  std::vector<int> min_of_all() const {
    std::vector<int> out;
    for (int j = 1; j <= agent_count_; ++j)
      if (preds_[j].empty()) out.push_back(j);
    return out;
  }

  // Effective variants: vacuous agents impose nothing, so the solver, the
  // classifier and model extraction work on the non-vacuous subrelation.
  const std::vector<int>& min_eff(int i) const {
    require_agent(i);
    return min_eff_[i];
  }
  const std::vector<int>& min_eff_all() const { return min_eff_all_; }
  const std::vector<int>& nonvacuous_predecessors(int i) const {
    require_agent(i);
    return preds_eff_[i];
  }
  const std::vector<int>& agents_topological() const { return topo_; }

  bool is_pure(const std::vector<int>& agents) const {
    for (int a : agents) {
      require_agent(a);
      if (reflexive_class(frame_[a])) return false;
    }
    return true;
  }

  bool is_simple(const std::vector<int>& agents) const {
    for (int a : agents) {
      require_agent(a);
      if (frame_[a] == FrameClass::D || frame_[a] == FrameClass::T) return true;
    }
    return false;
  }

 private:
  LogicSpec() = default;

  void require_agent(int i) const {
    if (!valid_agent(i))
      throw ValidationError("agent " + std::to_string(i) + " out of range 1.." +
                            std::to_string(agent_count_));
  }

  static void check_acyclic(int n, const std::vector<std::vector<bool>>& inc) {
    // colors: 0 unvisited, 1 on stack, 2 done
    std::vector<int> color(n + 1, 0), parent(n + 1, 0);
    for (int s = 1; s <= n; ++s) {
      if (color[s]) continue;
      std::vector<int> stack{s};
      while (!stack.empty()) {
        int u = stack.back();
        if (color[u] == 0) {
          color[u] = 1;
          for (int v = 1; v <= n; ++v) {
            if (!inc[u][v]) continue;
            if (color[v] == 1) {
              // reconstruct the cycle for the diagnostic
              std::string cyc = std::to_string(v);
              for (int w = u; w != v; w = parent[w])
                cyc = std::to_string(w) + " < " + cyc;
              cyc = std::to_string(v) + " < " + cyc;
              throw ValidationError(
                  "inclusion cycle: " + cyc +
                  "; collapse the modalities in the cycle into one agent");
            }
            if (color[v] == 0) {
              parent[v] = u;
              stack.push_back(v);
            }
          }
        } else {
          color[u] = 2;
          stack.pop_back();
        }
      }
    }
  }

  void build_caches() {
    std::sort(inclusion_.begin(), inclusion_.end());
    preds_eff_.assign(agent_count_ + 1, {});
    min_eff_.assign(agent_count_ + 1, {});
    for (int j = 1; j <= agent_count_; ++j)
      for (int i : preds_[j])
        if (!vacuous_.count(i)) preds_eff_[j].push_back(i);
    for (int i = 1; i <= agent_count_; ++i) {
      if (vacuous_.count(i)) continue;
      for (int j = 1; j <= agent_count_; ++j) {
        if (vacuous_.count(j)) continue;
        if ((j == i || includes(j, i)) && preds_eff_[j].empty())
          min_eff_[i].push_back(j);
      }
    }
    std::set<int> all;
    for (int i = 1; i <= agent_count_; ++i)
      for (int j : min_eff_[i]) all.insert(j);
    min_eff_all_.assign(all.begin(), all.end());
    // topological order: fewer predecessors first (inclusion is transitively
    // closed, so this is a valid linearization), ties by agent index
    topo_.clear();
    for (int i = 1; i <= agent_count_; ++i) topo_.push_back(i);
    std::stable_sort(topo_.begin(), topo_.end(), [&](int a, int b) {
      return preds_[a].size() < preds_[b].size();
    });
  }

  int agent_count_ = 0;
  std::vector<std::pair<int, int>> inclusion_;  // sorted, transitively closed
  std::vector<FrameClass> frame_;               // 1-based
  std::set<int> vacuous_;
  std::vector<std::vector<int>> preds_;       // 1-based, all predecessors
  std::vector<std::vector<int>> preds_eff_;   // non-vacuous predecessors
  std::vector<std::vector<int>> min_eff_;     // per-agent effective min sets
  std::vector<int> min_eff_all_;
  std::vector<int> topo_;
};

inline bool is_pure(const LogicSpec& spec, const std::vector<int>& agents) {
  return spec.is_pure(agents);
}
inline bool is_simple(const LogicSpec& spec, const std::vector<int>& agents) {
  return spec.is_simple(agents);
}
inline std::vector<int> min_of(const LogicSpec& spec, int i) {
  return spec.min_of(i);
}

}  // namespace boxsat
