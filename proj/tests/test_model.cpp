#include <catch2/catch_amalgamated.hpp>

#include "boxsat/json_io.hpp"
#include "boxsat/model.hpp"
#include "boxsat/tableau.hpp"
#include "support.hpp"

using namespace boxsat;

namespace {

KripkeModel chain_model() {
  // w -> v, V(p) = {v}
  KripkeModel m;
  m.worlds = {"v", "w"};
  m.relations[1] = {{"w", "v"}};
  m.valuation["p"] = {"v"};
  return m;
}

}  // namespace

TEST_CASE("check: base clauses") {
  KripkeModel m = chain_model();
  REQUIRE_FALSE(check(m, "w", Formula::bottom()));
  REQUIRE(check(m, "w", Formula::top()));
  // empty relation at v: box vacuously true
  REQUIRE(check(m, "v", Formula::box(1, Formula::bottom())));
  REQUIRE(check(m, "w", Formula::box(1, Formula::lit("p"))));
  REQUIRE_FALSE(check(m, "w", Formula::lit("p")));
  REQUIRE(check(m, "w", Formula::dia(1, Formula::lit("p"))));
  REQUIRE_FALSE(check(m, "v", Formula::dia(1, Formula::top())));
}

TEST_CASE("check: errors on unknown world or agent") {
  KripkeModel m = chain_model();
  REQUIRE_THROWS_AS(check(m, "zz", Formula::top()), ModelError);
  REQUIRE_THROWS_AS(check(m, "w", Formula::box(7, Formula::top())), ModelError);
}

TEST_CASE("check handles the input syntax with classical clauses") {
  KripkeModel m = chain_model();
  REQUIRE(check(m, "w", in_implies(in_atom("p"), in_bottom())));
  REQUIRE(check(m, "w", in_not(in_atom("p"))));
  REQUIRE_FALSE(check(m, "v", in_not(in_atom("p"))));
}

TEST_CASE("verify_frame: clean one-world model passes every preset") {
  for (const auto& name : LogicSpec::preset_names()) {
    LogicSpec spec = LogicSpec::preset(name);
    KripkeModel m;
    m.worlds = {"0"};
    for (int a = 1; a <= spec.agent_count(); ++a) m.relations[a] = {{"0", "0"}};
    REQUIRE(verify_frame(m, spec).empty());
  }
}

TEST_CASE("verify_frame: seriality violation") {
  LogicSpec spec = LogicSpec::validate_and_normalize(1, {}, {{1, FrameClass::D}});
  KripkeModel m;
  m.worlds = {"a", "b"};
  m.relations[1] = {{"a", "b"}};
  auto violations = verify_frame(m, spec);
  REQUIRE(violations.size() == 1);
  REQUIRE(violations[0].agent == 1);
  REQUIRE(violations[0].condition == "serial");
  REQUIRE(violations[0].world_a == "b");
}

TEST_CASE("verify_frame: inclusion violation") {
  LogicSpec spec = LogicSpec::preset("D2K");
  KripkeModel m;
  m.worlds = {"a", "b"};
  m.relations[1] = {{"a", "b"}, {"b", "b"}};
  m.relations[2] = {{"a", "a"}, {"b", "b"}};
  m.relations[3] = {{"a", "b"}, {"b", "b"}};
  auto violations = verify_frame(m, spec);
  bool found = false;
  for (auto& v : violations)
    if (v.condition.find("R2 <= R3") != std::string::npos && v.world_a == "a")
      found = true;
  REQUIRE(found);
}

TEST_CASE("verify_frame: transitivity and reflexivity") {
  LogicSpec spec = LogicSpec::validate_and_normalize(1, {}, {{1, FrameClass::D4}});
  KripkeModel m;
  m.worlds = {"a", "b", "c"};
  m.relations[1] = {{"a", "b"}, {"b", "c"}, {"c", "c"}};
  auto violations = verify_frame(m, spec);
  REQUIRE_FALSE(violations.empty());
  REQUIRE(violations[0].condition == "transitive");

  LogicSpec t = LogicSpec::validate_and_normalize(1, {}, {{1, FrameClass::T}});
  KripkeModel m2;
  m2.worlds = {"a"};
  m2.relations[1] = {};
  auto v2 = verify_frame(m2, t);
  bool reflexive_missing = false;
  for (auto& v : v2)
    if (v.condition == "reflexive") reflexive_missing = true;
  REQUIRE(reflexive_missing);
}

TEST_CASE("extract_model: single world") {
  LogicSpec spec = LogicSpec::preset("D2K");
  SolveDetail d = solve_detailed(spec, Formula::lit("q"));
  REQUIRE(d.verdict.sat);
  const KripkeModel& m = d.verdict.model;
  REQUIRE(m.worlds == std::vector<std::string>{"0"});
  for (int a = 1; a <= 3; ++a)
    REQUIRE(m.relations.at(a) ==
            std::set<std::pair<std::string, std::string>>{{"0", "0"}});
  REQUIRE(m.valuation.at("q") == std::set<std::string>{"0"});
}

TEST_CASE("extract_model: DK4 box chain") {
  LogicSpec spec = LogicSpec::preset("DK4");
  SolveDetail d = solve_detailed(spec, Formula::box(1, Formula::lit("q")));
  REQUIRE(d.verdict.sat);
  const KripkeModel& m = d.verdict.model;
  REQUIRE(m.worlds == std::vector<std::string>({"0", "0.1"}));
  std::set<std::pair<std::string, std::string>> r1{{"0", "0.1"}, {"0.1", "0.1"}};
  REQUIRE(m.relations.at(1) == r1);
  REQUIRE(m.relations.at(2) == r1);  // transitive closure of R1
  REQUIRE(m.valuation.at("q") == std::set<std::string>{"0.1"});
}

TEST_CASE("extract_model: D2K two children") {
  LogicSpec spec = LogicSpec::preset("D2K");
  Formula f = Formula::conj(Formula::box(3, Formula::lit("q")),
                            Formula::lit("q", true));
  SolveDetail d = solve_detailed(spec, f);
  REQUIRE(d.verdict.sat);
  const KripkeModel& m = d.verdict.model;
  REQUIRE(m.worlds == std::vector<std::string>({"0", "0.1", "0.2"}));
  // R3 is exactly R1 union R2
  auto r3 = m.relations.at(1);
  r3.insert(m.relations.at(2).begin(), m.relations.at(2).end());
  REQUIRE(m.relations.at(3) == r3);
  REQUIRE(m.valuation.at("q") == std::set<std::string>({"0.1", "0.2"}));
}

TEST_CASE("extract_model rejects closed branches") {
  Branch b;
  b.closed = true;
  REQUIRE_THROWS_AS(extract_model(b, LogicSpec::preset("D2K")), ModelError);
}

TEST_CASE("submodel preservation for diamond-free formulas") {
  // truth of diamond-free NNF formulas survives dropping worlds unreachable
  // from the evaluation point
  std::mt19937_64 rng(20240801);
  LogicSpec spec = LogicSpec::preset("D2K4");
  int checked = 0;
  for (int round = 0; round < 150; ++round) {
    Formula f = testsupport::random_diamond_free(rng, 5, 3, 2, 2);
    Verdict v = solve(spec, f);
    if (!v.sat) continue;
    KripkeModel m = v.model;
    // add junk unreachable worlds
    m.worlds.push_back("junk1");
    m.worlds.push_back("junk2");
    m.sort_worlds();
    for (auto& [a, rel] : m.relations) rel.insert({"junk1", "junk2"});
    m.valuation["p1"].insert("junk1");
    REQUIRE(check(m, v.world, f));
    ++checked;
  }
  REQUIRE(checked > 30);
}

TEST_CASE("model JSON round-trip") {
  KripkeModel m = chain_model();
  nlohmann::json j = model_to_json(m, "w");
  auto [m2, root] = model_from_json(j);
  REQUIRE(root == "w");
  REQUIRE(m2.worlds == m.worlds);
  REQUIRE(m2.relations == m.relations);
  REQUIRE(m2.valuation == m.valuation);
  REQUIRE_THROWS_AS(model_from_json(nlohmann::json{{"worlds", {"a"}}}),
                    ModelError);
}
