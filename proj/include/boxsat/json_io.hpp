#pragma once

// JSON forms of the file-facing objects: logic descriptions, models, traces
// and classifications.

#include <string>
#include <vector>

#include <json.hpp>

#include "boxsat/classify.hpp"
#include "boxsat/logic.hpp"
#include "boxsat/model.hpp"
#include "boxsat/tableau.hpp"

namespace boxsat {

// Logic-spec file: {"agents": 3, "frames": {"1": "D", ...},
// "inclusions": [[1,3],[2,3]]}
inline LogicSpec logic_from_json(const nlohmann::json& j) {
  try {
    int agents = j.at("agents").get<int>();
    std::map<int, FrameClass> frames;
    for (auto& [key, val] : j.at("frames").items())
      frames[std::stoi(key)] = parse_frame_class(val.get<std::string>());
    std::vector<std::pair<int, int>> inclusions;
    for (auto& pair : j.at("inclusions")) {
      if (!pair.is_array() || pair.size() != 2)
        throw ValidationError("inclusions must be pairs [i, j]");
      inclusions.emplace_back(pair[0].get<int>(), pair[1].get<int>());
    }
    return LogicSpec::validate_and_normalize(agents, inclusions, frames);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed logic spec: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ValidationError("malformed logic spec: frame keys must be agent numbers");
  }
}

inline nlohmann::json logic_to_json(const LogicSpec& spec) {
  nlohmann::json frames = nlohmann::json::object();
  for (int i = 1; i <= spec.agent_count(); ++i)
    frames[std::to_string(i)] = frame_class_name(spec.frame(i));
  nlohmann::json inclusions = nlohmann::json::array();
  for (auto& [i, j] : spec.inclusion()) inclusions.push_back({i, j});
  return {{"agents", spec.agent_count()},
          {"frames", frames},
          {"inclusions", inclusions}};
}

// Model: {"worlds": [...], "relations": {"1": [[w,w'],...]},
// "valuation": {"p": [w,...]}, "root": w}
inline nlohmann::json model_to_json(const KripkeModel& m, const std::string& root) {
  nlohmann::json relations = nlohmann::json::object();
  for (auto& [agent, rel] : m.relations) {
    nlohmann::json pairs = nlohmann::json::array();
    for (auto& [a, b] : rel) pairs.push_back({a, b});
    relations[std::to_string(agent)] = pairs;
  }
  nlohmann::json valuation = nlohmann::json::object();
  for (auto& [var, set] : m.valuation)
    valuation[var] = std::vector<std::string>(set.begin(), set.end());
  return {{"worlds", m.worlds},
          {"relations", relations},
          {"valuation", valuation},
          {"root", root}};
}

inline std::pair<KripkeModel, std::string> model_from_json(const nlohmann::json& j) {
  try {
    KripkeModel m;
    m.worlds = j.at("worlds").get<std::vector<std::string>>();
    m.sort_worlds();
    for (auto& [key, pairs] : j.at("relations").items()) {
      auto& rel = m.relations[std::stoi(key)];
      for (auto& p : pairs) {
        if (!p.is_array() || p.size() != 2)
          throw ModelError("relation entries must be pairs");
        std::string a = p[0].get<std::string>(), b = p[1].get<std::string>();
        if (!m.has_world(a) || !m.has_world(b))
          throw ModelError("relation references unknown world");
        rel.insert({a, b});
      }
    }
    if (j.contains("valuation"))
      for (auto& [var, worlds] : j.at("valuation").items())
        for (auto& w : worlds) {
          std::string ws = w.get<std::string>();
          if (!m.has_world(ws)) throw ModelError("valuation references unknown world");
          m.valuation[var].insert(ws);
        }
    std::string root = j.at("root").get<std::string>();
    if (!m.has_world(root)) throw ModelError("root is not a world");
    return {std::move(m), root};
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ModelError("malformed model: relation keys must be agent numbers");
  }
}

inline nlohmann::json trace_to_json(const std::vector<TraceRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records)
    out.push_back({{"rule", rule_name(r.rule)},
                   {"source", prefix_to_string(r.source)},
                   {"premise", print(r.premise)},
                   {"produced", print(r.produced)},
                   {"target", prefix_to_string(r.target)}});
  return out;
}

inline nlohmann::json classification_to_json(const ComplexityVerdict& v) {
  nlohmann::json out{{"case", static_cast<int>(v.which)},
                     {"case_name", complexity_case_name(v.which)},
                     {"one_var_class", v.one_var_class},
                     {"multi_var_class", v.multi_var_class}};
  if (v.witness_agent) out["witness_agent"] = *v.witness_agent;
  if (v.witness_set) out["witness_set"] = *v.witness_set;
  if (v.witness_j) out["witness_j"] = *v.witness_j;
  return out;
}

}  // namespace boxsat
