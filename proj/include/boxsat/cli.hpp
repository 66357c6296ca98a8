#pragma once

// Command-line surface. Exit codes: 0 = satisfiable / success,
// 1 = unsatisfiable / no model found, 2 = usage or validation error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boxsat/atm.hpp"
#include "boxsat/classify.hpp"
#include "boxsat/formula.hpp"
#include "boxsat/json_io.hpp"
#include "boxsat/logic.hpp"
#include "boxsat/model.hpp"
#include "boxsat/oracle.hpp"
#include "boxsat/tableau.hpp"
#include "boxsat/transform.hpp"

namespace boxsat::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LogicSpec load_logic(const std::string& source) {
  const auto& names = LogicSpec::preset_names();
  if (std::find(names.begin(), names.end(), source) != names.end())
    return LogicSpec::preset(source);
  std::string text = detail::read_file(source);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, true, true);
  return logic_from_json(j);
}

struct FormulaOpts {
  std::string inline_text;
  std::string file;

  std::string text() const {
    if (!inline_text.empty() && !file.empty())
      throw ValidationError("give either --formula or --formula-file, not both");
    if (!inline_text.empty()) return inline_text;
    if (!file.empty()) return read_file(file);
    throw ValidationError("a formula is required (--formula or --formula-file)");
  }
};

inline void add_formula_opts(CLI::App* cmd, FormulaOpts& opts) {
  cmd->add_option("--formula", opts.inline_text, "formula text");
  cmd->add_option("--formula-file", opts.file, "file holding the formula");
}

inline void print_model_human(std::ostream& out, const KripkeModel& m,
                              const std::string& root) {
  out << "model (root " << root << "):\n";
  out << "  worlds:";
  for (auto& w : m.worlds) out << ' ' << w;
  out << '\n';
  for (auto& [agent, rel] : m.relations) {
    out << "  R" << agent << ":";
    for (auto& [a, b] : rel) out << " (" << a << "," << b << ")";
    out << '\n';
  }
  for (auto& [var, set] : m.valuation) {
    out << "  V(" << var << "):";
    for (auto& w : set) out << ' ' << w;
    out << '\n';
  }
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"satisfiability, countermodels and complexity classification "
               "for multimodal logics with inclusion axioms"};
  app.require_subcommand(1);

  // ---- solve -------------------------------------------------------------
  auto* solve_cmd = app.add_subcommand(
      "solve", "decide diamond-free satisfiability against a logic");
  std::string solve_logic;
  detail::FormulaOpts solve_formula;
  bool solve_json = false, solve_trace = false;
  solve_cmd->add_option("--logic", solve_logic, "preset name or spec file")->required();
  detail::add_formula_opts(solve_cmd, solve_formula);
  solve_cmd->add_flag("--json", solve_json, "machine-readable output");
  solve_cmd->add_flag("--trace", solve_trace, "include the rule trace");

  // ---- solve-k -----------------------------------------------------------
  auto* solvek_cmd = app.add_subcommand(
      "solve-k", "decide unimodal K satisfiability (full language)");
  detail::FormulaOpts solvek_formula;
  bool solvek_json = false;
  detail::add_formula_opts(solvek_cmd, solvek_formula);
  solvek_cmd->add_flag("--json", solvek_json, "machine-readable output");

  // ---- classify ----------------------------------------------------------
  auto* classify_cmd = app.add_subcommand(
      "classify", "complexity of the diamond-free fragment of a logic");
  std::string classify_logic;
  bool classify_json = false;
  classify_cmd->add_option("--logic", classify_logic, "preset name or spec file")
      ->required();
  classify_cmd->add_flag("--json", classify_json, "machine-readable output");

  // ---- translate ---------------------------------------------------------
  auto* translate_cmd = app.add_subcommand("translate", "formula translations");
  std::string which, embed_mode_name, embed_agents, translate_logic;
  detail::FormulaOpts translate_formula;
  bool translate_json = false;
  translate_cmd
      ->add_option("--which", which,
                   "k2d2k | onevar-d2k4 | onevar-dk4 | dk4-d4k4 | embed")
      ->required();
  detail::add_formula_opts(translate_cmd, translate_formula);
  translate_cmd->add_option("--logic", translate_logic,
                            "target logic (embed only)");
  translate_cmd->add_option("--mode", embed_mode_name,
                            "pair-simple | triple | pair-with-j (embed only)");
  translate_cmd->add_option("--agents", embed_agents,
                            "witness agents, e.g. 1,2,3 (embed only)");
  translate_cmd->add_flag("--json", translate_json, "machine-readable output");

  // ---- atm ---------------------------------------------------------------
  auto* atm_cmd = app.add_subcommand(
      "atm", "encode an alternating machine as a hardness instance");
  std::string atm_file;
  bool atm_det = false, atm_solve = false, atm_json = false;
  atm_cmd->add_option("--file", atm_file, "machine description (JSON)")->required();
  atm_cmd->add_flag("--deterministic", atm_det,
                    "bimodal encoding for deterministic machines");
  atm_cmd->add_flag("--solve", atm_solve, "solve the generated formula");
  atm_cmd->add_flag("--json", atm_json, "machine-readable output");

  // ---- oracle ------------------------------------------------------------
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "brute-force bounded model search (ground truth)");
  std::string oracle_logic;
  detail::FormulaOpts oracle_formula;
  int oracle_bound = 4, oracle_vars = 2;
  bool oracle_json = false;
  oracle_cmd->add_option("--logic", oracle_logic, "preset name or spec file")
      ->required();
  detail::add_formula_opts(oracle_cmd, oracle_formula);
  oracle_cmd->add_option("--bound", oracle_bound, "maximum world count (default 4)");
  oracle_cmd->add_option("--vars", oracle_vars, "variable budget (default 2)");
  oracle_cmd->add_flag("--json", oracle_json, "machine-readable output");

  // ---- check-model -------------------------------------------------------
  auto* check_cmd = app.add_subcommand(
      "check-model", "verify a serialized model against a logic and formula");
  std::string check_logic, check_model_file;
  detail::FormulaOpts check_formula;
  bool check_json = false;
  check_cmd->add_option("--logic", check_logic, "preset name or spec file")->required();
  check_cmd->add_option("--model", check_model_file, "model file (JSON)")->required();
  detail::add_formula_opts(check_cmd, check_formula);
  check_cmd->add_flag("--json", check_json, "machine-readable output");

  // ---- trace -------------------------------------------------------------
  auto* trace_cmd = app.add_subcommand(
      "trace", "solve and print the rule-application trace");
  std::string trace_logic;
  detail::FormulaOpts trace_formula;
  bool trace_json = false;
  trace_cmd->add_option("--logic", trace_logic, "preset name or spec file")->required();
  detail::add_formula_opts(trace_cmd, trace_formula);
  trace_cmd->add_flag("--json", trace_json, "machine-readable output");

  try {
    std::vector<const char*> argv;
    argv.push_back("boxsat");
    for (auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*solve_cmd) {
      LogicSpec spec = detail::load_logic(solve_logic);
      Formula f = parse_nnf(solve_formula.text());
      SolveDetail d = solve_detailed(spec, f);
      if (solve_json) {
        nlohmann::json j{{"command", "solve"},
                         {"verdict", d.verdict.sat ? "sat" : "unsat"}};
        if (d.verdict.sat) j["model"] = model_to_json(d.verdict.model, d.verdict.world);
        if (solve_trace) j["trace"] = trace_to_json(d.trace);
        out << j.dump(2) << '\n';
      } else {
        out << (d.verdict.sat ? "SAT" : "UNSAT") << '\n';
        if (d.verdict.sat)
          detail::print_model_human(out, d.verdict.model, d.verdict.world);
        if (solve_trace)
          for (auto& r : d.trace) out << r.to_string() << '\n';
      }
      return d.verdict.sat ? 0 : 1;
    }

    if (*solvek_cmd) {
      Formula f = parse_nnf(solvek_formula.text());
      Verdict v = solve_k(f);
      if (solvek_json) {
        nlohmann::json j{{"command", "solve-k"},
                         {"verdict", v.sat ? "sat" : "unsat"}};
        if (v.sat) j["model"] = model_to_json(v.model, v.world);
        out << j.dump(2) << '\n';
      } else {
        out << (v.sat ? "SAT" : "UNSAT") << '\n';
        if (v.sat) detail::print_model_human(out, v.model, v.world);
      }
      return v.sat ? 0 : 1;
    }

    if (*classify_cmd) {
      LogicSpec spec = detail::load_logic(classify_logic);
      ComplexityVerdict v = classify(spec);
      if (classify_json) {
        nlohmann::json j = classification_to_json(v);
        j["command"] = "classify";
        out << j.dump(2) << '\n';
      } else {
        out << complexity_case_name(v.which) << ": 1-variable " << v.one_var_class
            << ", unrestricted variables " << v.multi_var_class << '\n';
        if (v.witness_agent) {
          out << "witness: i=" << *v.witness_agent;
          if (v.witness_set) {
            out << " A={";
            for (std::size_t i = 0; i < v.witness_set->size(); ++i)
              out << (i ? "," : "") << (*v.witness_set)[i];
            out << "}";
          }
          if (v.witness_j) out << " j=" << *v.witness_j;
          out << '\n';
        }
      }
      return 0;
    }

    if (*translate_cmd) {
      Formula f = parse_nnf(translate_formula.text());
      Formula result;
      if (which == "k2d2k") {
        result = k_to_d2k(f);
      } else if (which == "onevar-d2k4") {
        result = one_var_d2k4(f);
      } else if (which == "onevar-dk4") {
        result = one_var_dk4(f);
      } else if (which == "dk4-d4k4") {
        result = dk4_to_d4k4(f);
      } else if (which == "embed") {
        if (translate_logic.empty() || embed_mode_name.empty() || embed_agents.empty())
          throw ValidationError("embed needs --logic, --mode and --agents");
        LogicSpec target = detail::load_logic(translate_logic);
        std::vector<int> ag;
        std::stringstream ss(embed_agents);
        std::string tok;
        while (std::getline(ss, tok, ',')) ag.push_back(std::stoi(tok));
        EmbedMode mode;
        if (embed_mode_name == "pair-simple") {
          if (ag.size() != 3) throw ValidationError("pair-simple needs agents x,y,i");
          mode = EmbedPairSimple{ag[0], ag[1], ag[2]};
        } else if (embed_mode_name == "triple") {
          if (ag.size() != 4) throw ValidationError("triple needs agents x,y,z,i");
          mode = EmbedTriple{ag[0], ag[1], ag[2], ag[3]};
        } else if (embed_mode_name == "pair-with-j") {
          if (ag.size() != 4) throw ValidationError("pair-with-j needs agents x,y,i,j");
          mode = EmbedPairWithJ{ag[0], ag[1], ag[2], ag[3]};
        } else {
          throw ValidationError("unknown embed mode: " + embed_mode_name);
        }
        result = embed_general(f, target, mode);
      } else {
        throw ValidationError("unknown translation: " + which);
      }
      if (translate_json)
        out << nlohmann::json{{"command", "translate"},
                              {"which", which},
                              {"formula", print(result)}}
                   .dump(2)
            << '\n';
      else
        out << print(result) << '\n';
      return 0;
    }

    if (*atm_cmd) {
      nlohmann::json j =
          nlohmann::json::parse(detail::read_file(atm_file), nullptr, true, true);
      ATMSpec machine = ATMSpec::from_json(j);
      Formula f = atm_to_formula(machine, atm_det);
      if (!atm_solve) {
        if (atm_json)
          out << nlohmann::json{{"command", "atm"},
                                {"deterministic", atm_det},
                                {"variables", metrics(f).variables.size()},
                                {"formula", print(f)}}
                     .dump(2)
              << '\n';
        else
          out << print(f) << '\n';
        return 0;
      }
      LogicSpec spec = LogicSpec::preset(atm_det ? "DK4" : "D2K4");
      Verdict v = solve(spec, f);
      if (atm_json) {
        nlohmann::json jj{{"command", "atm"},
                          {"deterministic", atm_det},
                          {"verdict", v.sat ? "sat" : "unsat"}};
        if (v.sat) jj["model"] = model_to_json(v.model, v.world);
        out << jj.dump(2) << '\n';
      } else {
        out << (v.sat ? "SAT (machine accepts)" : "UNSAT (machine rejects)") << '\n';
      }
      return v.sat ? 0 : 1;
    }

    if (*oracle_cmd) {
      LogicSpec spec = detail::load_logic(oracle_logic);
      Formula f = parse_nnf(oracle_formula.text());
      OracleResult r = brute_sat(spec, f, oracle_bound, oracle_vars);
      if (oracle_json) {
        nlohmann::json j{{"command", "oracle"},
                         {"bound", oracle_bound},
                         {"result", r.found ? "sat-witness" : "no-model-up-to"}};
        if (r.found) {
          j["model"] = model_to_json(r.model, r.world);
          j["world"] = r.world;
        }
        out << j.dump(2) << '\n';
      } else if (r.found) {
        out << "SAT witness at " << r.world << '\n';
        detail::print_model_human(out, r.model, r.world);
      } else {
        out << "no model with at most " << oracle_bound << " worlds\n";
      }
      return r.found ? 0 : 1;
    }

    if (*check_cmd) {
      LogicSpec spec = detail::load_logic(check_logic);
      auto [model, root] = model_from_json(nlohmann::json::parse(
          detail::read_file(check_model_file), nullptr, true, true));
      Formula f = parse_nnf(check_formula.text());
      auto violations = verify_frame(model, spec);
      bool holds = check(model, root, f);
      bool ok = violations.empty() && holds;
      if (check_json) {
        nlohmann::json v = nlohmann::json::array();
        for (auto& viol : violations) v.push_back(viol.to_string());
        out << nlohmann::json{{"command", "check-model"},
                              {"frame_violations", v},
                              {"holds", holds}}
                   .dump(2)
            << '\n';
      } else {
        for (auto& viol : violations) out << "violation: " << viol.to_string() << '\n';
        out << (holds ? "formula holds at root" : "formula fails at root") << '\n';
      }
      return ok ? 0 : 1;
    }

    if (*trace_cmd) {
      LogicSpec spec = detail::load_logic(trace_logic);
      Formula f = parse_nnf(trace_formula.text());
      SolveDetail d = solve_detailed(spec, f);
      if (trace_json) {
        out << nlohmann::json{{"command", "trace"},
                              {"verdict", d.verdict.sat ? "sat" : "unsat"},
                              {"records", trace_to_json(d.trace)}}
                   .dump(2)
            << '\n';
      } else {
        out << (d.verdict.sat ? "SAT" : "UNSAT") << '\n';
        for (auto& r : d.trace) out << r.to_string() << '\n';
      }
      return d.verdict.sat ? 0 : 1;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const SolveError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const TransformError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const OracleError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << "error: no subcommand given\n";
  return 2;
}

}  // namespace boxsat::cli
