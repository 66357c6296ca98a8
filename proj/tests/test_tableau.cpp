#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "boxsat/oracle.hpp"
#include "boxsat/tableau.hpp"
#include "support.hpp"

using namespace boxsat;

namespace {

Formula fq() { return Formula::lit("q"); }
Formula fnq() { return Formula::lit("q", true); }
Formula fp() { return Formula::lit("p"); }
Formula fnp() { return Formula::lit("p", true); }

}  // namespace

TEST_CASE("n_i cases") {
  LogicSpec t = LogicSpec::validate_and_normalize(1, {}, {{1, FrameClass::T}});
  REQUIRE(n_i(t, 1, {}) == Prefix{});

  LogicSpec d4 = LogicSpec::validate_and_normalize(1, {}, {{1, FrameClass::D4}});
  REQUIRE(n_i(d4, 1, {1}) == Prefix{1});
  REQUIRE(n_i(d4, 1, {}) == Prefix{1});

  LogicSpec d = LogicSpec::validate_and_normalize(1, {}, {{1, FrameClass::D}});
  REQUIRE(n_i(d, 1, {1}) == Prefix({1, 1}));

  LogicSpec k = LogicSpec::preset("K");
  REQUIRE_THROWS_AS(n_i(k, 1, {}), SolveError);  // vacuous agent
}

TEST_CASE("solve: spec examples") {
  LogicSpec d2k = LogicSpec::preset("D2K");
  REQUIRE_FALSE(solve(d2k, Formula::bottom()).sat);
  REQUIRE_FALSE(solve(d2k, Formula::box(1, Formula::bottom())).sat);
  REQUIRE_FALSE(solve(d2k, Formula::conj(Formula::box(3, fp()),
                                         Formula::box(1, fnp()))).sat);

  LogicSpec dk4 = LogicSpec::preset("DK4");
  REQUIRE_FALSE(
      solve(dk4, Formula::conj(Formula::box(2, fp()),
                               Formula::box(1, Formula::box(1, fnp()))))
          .sat);

  LogicSpec d2k4 = LogicSpec::preset("D2K4");
  Verdict v = solve(d2k4, Formula::conj(Formula::box(3, Formula::disj(fq(), fnq())),
                                        fnq()));
  REQUIRE(v.sat);
}

TEST_CASE("solve rejects diamonds and bad agents") {
  LogicSpec d2k = LogicSpec::preset("D2K");
  REQUIRE_THROWS_AS(solve(d2k, Formula::dia(1, fq())), SolveError);
  REQUIRE_THROWS_AS(solve(d2k, Formula::box(4, fq())), SolveError);
}

TEST_CASE("solve: vacuous boxes discharge silently") {
  LogicSpec k = LogicSpec::preset("K");
  REQUIRE(solve(k, Formula::box(1, Formula::bottom())).sat);
  REQUIRE_FALSE(solve(k, Formula::conj(fq(), fnq())).sat);
  // vacuous boxes do not even create worlds
  Verdict v = solve(k, Formula::box(1, Formula::bottom()));
  REQUIRE(v.model.worlds.size() == 1);
}

TEST_CASE("solve_k: spec examples") {
  REQUIRE_FALSE(
      solve_k(Formula::conj(Formula::dia(1, fp()), Formula::box(1, fnp()))).sat);
  REQUIRE(solve_k(Formula::box(1, Formula::bottom())).sat);
  Verdict v = solve_k(Formula::conj(Formula::dia(1, fp()), Formula::dia(1, fnp())));
  REQUIRE(v.sat);
  REQUIRE(v.model.worlds.size() == 3);
}

TEST_CASE("solve_k rejects non-unimodal input") {
  REQUIRE_THROWS_AS(solve_k(Formula::box(2, fq())), SolveError);
}

TEST_CASE("trace: D2K box-3 expansion matches the two-child rule") {
  LogicSpec d2k = LogicSpec::preset("D2K");
  auto records = trace(d2k, Formula::box(3, fp()));
  REQUIRE(records.size() == 4);
  REQUIRE(records[0].rule == Rule::R1);
  REQUIRE(records[0].premise == Formula::box(3, fp()));
  REQUIRE(records[0].produced == Formula::box(1, fp()));
  REQUIRE(records[0].target == Prefix{});
  REQUIRE(records[1].rule == Rule::R1);
  REQUIRE(records[1].produced == Formula::box(2, fp()));
  REQUIRE(records[2].rule == Rule::R2);
  REQUIRE(records[2].premise == Formula::box(1, fp()));
  REQUIRE(records[2].produced == fp());
  REQUIRE(records[2].target == Prefix{1});
  REQUIRE(records[3].rule == Rule::R2);
  REQUIRE(records[3].premise == Formula::box(2, fp()));
  REQUIRE(records[3].target == Prefix{2});
}

TEST_CASE("trace: D2K4 box-3 carries itself to both children") {
  LogicSpec d2k4 = LogicSpec::preset("D2K4");
  Formula box3 = Formula::box(3, fp());
  auto records = trace(d2k4, box3);
  // both children receive p (R2 via R1-derived boxes) and [3]p (R4)
  int r4_to_1 = 0, r4_to_2 = 0;
  for (auto& r : records) {
    if (r.rule == Rule::R4 && r.source == Prefix{} && r.produced == box3) {
      if (r.target == Prefix{1}) ++r4_to_1;
      if (r.target == Prefix{2}) ++r4_to_2;
    }
  }
  REQUIRE(r4_to_1 == 1);
  REQUIRE(r4_to_2 == 1);
}

TEST_CASE("trace: D4K4 keeps every payload at prefix 0.1") {
  LogicSpec d4k4 = LogicSpec::preset("D4K4");
  Formula f = Formula::conj(Formula::box(2, fp()), Formula::box(1, fq()));
  SolveDetail d = solve_detailed(d4k4, f);
  REQUIRE(d.verdict.sat);
  for (auto& r : d.trace) {
    REQUIRE((r.target == Prefix{} || r.target == Prefix{1}));
    REQUIRE((r.source == Prefix{} || r.source == Prefix{1}));
  }
  // and the model has exactly the two worlds
  REQUIRE(d.verdict.model.worlds == std::vector<std::string>({"0", "0.1"}));
}

TEST_CASE("certificate soundness on a random corpus") {
  std::mt19937_64 rng(20240810);
  for (const char* preset : {"D2K", "D2K4", "DK4", "D42K4", "D4K4"}) {
    LogicSpec spec = LogicSpec::preset(preset);
    for (int round = 0; round < 120; ++round) {
      Formula f = testsupport::random_diamond_free(rng, 6, spec.agent_count(), 2, 2);
      // solve_detailed internally asserts verify_frame + check on Sat; do it
      // again here so the test does not rely on the internal assertion
      Verdict v = solve(spec, f);
      if (v.sat) {
        REQUIRE(verify_frame(v.model, spec).empty());
        REQUIRE(check(v.model, v.world, f));
      }
    }
  }
}

TEST_CASE("monotone weakening") {
  std::mt19937_64 rng(20240811);
  LogicSpec spec = LogicSpec::preset("D2K4");
  int sat_conj = 0;
  for (int round = 0; round < 200; ++round) {
    Formula a = testsupport::random_diamond_free(rng, 4, 3, 2, 2);
    Formula b = testsupport::random_diamond_free(rng, 4, 3, 2, 2);
    if (solve(spec, Formula::conj(a, b)).sat) {
      ++sat_conj;
      REQUIRE(solve(spec, a).sat);
    }
  }
  REQUIRE(sat_conj > 40);
}

TEST_CASE("variable-free collapse") {
  // on variable-free diamond-free input the solver agrees with the linear
  // recursive evaluation, for every preset
  testsupport::CorpusParams params;
  params.agents = 3;
  params.max_ops = 3;
  params.max_depth = 3;
  params.leaves = {Formula::bottom(), Formula::top()};
  auto corpus = testsupport::exhaustive_diamond_free(params);
  for (const auto& name : LogicSpec::preset_names()) {
    LogicSpec spec = LogicSpec::preset(name);
    for (Formula f : corpus) {
      if (max_agent(f) > spec.agent_count()) continue;
      REQUIRE(solve(spec, f).sat == testsupport::var_free_eval(spec, f));
    }
  }
}

TEST_CASE("termination: prefixes stay within the loop-check bound") {
  std::mt19937_64 rng(20240812);
  for (const char* preset : {"D2K4", "D42K4", "DK4"}) {
    LogicSpec spec = LogicSpec::preset(preset);
    for (int round = 0; round < 60; ++round) {
      Formula f = testsupport::random_diamond_free(rng, 6, spec.agent_count(), 2, 1);
      SolveDetail d = solve_detailed(spec, f);
      std::size_t bound = std::size_t(1) << std::min<std::uint32_t>(f.size(), 20);
      for (auto& [prefix, _] : d.branch.entries)
        REQUIRE(prefix.size() <= bound);
    }
  }
}

TEST_CASE("oracle agreement on a small sweep") {
  // quick cross-check here; the full corpus sweep lives in the acceptance
  // suite
  std::mt19937_64 rng(20240813);
  for (const char* preset : {"D2K", "DK4"}) {
    LogicSpec spec = LogicSpec::preset(preset);
    for (int round = 0; round < 40; ++round) {
      Formula f = testsupport::random_diamond_free(rng, 4, spec.agent_count(), 2, 1);
      Verdict v = solve(spec, f);
      OracleResult o = brute_sat(spec, f, 3);
      if (v.sat) {
        // oracle may need more worlds than the bound in principle, but on
        // this corpus 3 suffice; a mismatch here is a bug in one engine
        REQUIRE(o.found);
      } else {
        REQUIRE_FALSE(o.found);
      }
    }
  }
}

TEST_CASE("deep chains terminate through back-edges") {
  // [3]([3]q) style nesting in transitive logics loops instead of diverging
  LogicSpec d2k4 = LogicSpec::preset("D2K4");
  Formula f = Formula::box(3, Formula::box(3, Formula::disj(fq(), fnq())));
  SolveDetail d = solve_detailed(d2k4, f);
  REQUIRE(d.verdict.sat);
  REQUIRE_FALSE(d.branch.back_edges.empty());
}
