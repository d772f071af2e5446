#include "helpers.hpp"

#include "perm/oracle.hpp"

#include <doctest.h>

using namespace perm;
using testing::q;

namespace {

Config cfg(const TimedAutomatonSpec& s, const std::string& loc, const std::string& v) {
  return {*s.find_location(loc), parse_valuation(s, v)};
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("grid values of the examples") {
    auto s1 = testing::fig("fig1");
    GridParams g;
    g.delta = q(1, 16);
    CHECK(oracle_perm(s1, cfg(s1, "l0", "x=0,y=0"), g) == ExtRational(q(1, 2)));
    CHECK(oracle_perm(s1, cfg(s1, "lf", "x=7,y=1/3"), g).is_pos_inf());
    CHECK(oracle_perm(s1, cfg(s1, "l1", "x=1/2,y=3/4"), g).is_neg_inf());
    auto s3 = testing::fig("fig3");
    g.delta = q(1, 48);
    CHECK(oracle_perm(s3, cfg(s3, "l0", "x=1/2,y=0"), g) == ExtRational(q(2, 3)));
  }

  TEST_CASE("window endpoints are candidates even off the grid") {
    auto s1 = testing::fig("fig1");
    GridParams g;
    g.delta = q(1, 4);
    CHECK(oracle_perm(s1, cfg(s1, "l1", "x=1/3,y=0"), g) == ExtRational(q(1, 3)));
  }

  TEST_CASE("horizon") {
    auto s1 = testing::fig("fig1");
    GridParams g;
    g.horizon = 1;
    CHECK_THROWS_AS(oracle_perm(s1, cfg(s1, "l0", "x=0,y=0"), g), HorizonExceeded);
  }

  TEST_CASE("refining the grid never loses more than the tolerance") {
    auto s4 = testing::fig("fig4");
    GridParams coarse, fine;
    coarse.delta = q(1, 8);
    fine.delta = q(1, 16);
    GridOracle a(s4, coarse), b(s4, fine);
    for (Rational x = 0; x <= 2; x += q(1, 8))
      for (Rational y = 0; y <= 1; y += q(1, 8)) {
        ExtRational va = a.value({0, {x, y}}), vb = b.value({0, {x, y}});
        CHECK(va.is_finite() == vb.is_finite());
        if (va.is_finite()) CHECK((va - vb).to_double() <= 4.0 / 16);
      }
  }

  TEST_CASE("replay against the adversaries") {
    auto s1 = testing::fig("fig1");
    auto sol = compute_permissiveness(s1);
    auto r = adversary_replay(s1, sol, cfg(s1, "l0", "x=0,y=0"), Adversary::Latest);
    CHECK(r.reached);
    CHECK(r.min_width == ExtRational(q(1, 2)));
    for (auto adv : {Adversary::Earliest, Adversary::GridMin}) {
      auto e = adversary_replay(s1, sol, cfg(s1, "l0", "x=0,y=0"), adv);
      CHECK(e.reached);
      CHECK(e.min_width >= ExtRational(q(1, 2)));
    }
    auto o = adversary_replay(s1, sol, cfg(s1, "l0", "x=0,y=0"), Adversary::GridMin, q(1, 64),
                              IntervalOverride{q(1, 4), q(1)});
    REQUIRE_FALSE(o.steps.empty());
    CHECK(o.steps[0].delay == q(1, 4));
    auto t = adversary_replay(s1, sol, cfg(s1, "lf", "x=0,y=0"), Adversary::Latest);
    CHECK(t.reached);
    CHECK(t.min_width.is_pos_inf());
    CHECK_THROWS_AS(adversary_replay(s1, sol, cfg(s1, "l0", "x=0,y=0"), Adversary::Latest, q(1, 64),
                                     IntervalOverride{q(2), q(3)}),
                    IllegalMove);
  }

  TEST_CASE("latest matches the grid adversary without resets") {
    auto s = parse_model(R"(clocks x y
location a initial
location b
location g target
edge a -> b action u guard "0<=x<=1 & 0<=y<=2"
edge b -> g action w guard "1<=x<=2 & 0<=y<=2"
)");
    auto sol = compute_permissiveness(s);
    for (Rational x = 0; x <= 1; x += q(1, 8)) {
      Config c{0, {x, q(0)}};
      if (!paf_eval(sol.fns[0], c.v).is_finite()) continue;
      auto l = adversary_replay(s, sol, c, Adversary::Latest);
      auto g = adversary_replay(s, sol, c, Adversary::GridMin);
      CHECK(l.reached == g.reached);
      CHECK(l.min_width == g.min_width);
    }
  }

  TEST_CASE("random models") {
    for (auto kind : {ModelClass::Linear, ModelClass::Branching, ModelClass::Game})
      for (std::uint64_t seed = 1; seed <= 10; ++seed)
        for (std::size_t n = 1; n <= 3; ++n) {
          auto s = random_model(seed, n, 2 + seed % 5, kind);
          CHECK_NOTHROW(validate_model(s));
          CHECK(s.nclocks() == n);
          CHECK(s.locations.size() <= 6);
          CHECK(max_constant(s) <= 4);
          CHECK(to_text(random_model(seed, n, 2 + seed % 5, kind)) == to_text(s));
          if (kind == ModelClass::Linear) CHECK(classify(s) == ModelClass::Linear);
        }
    bool branching = false;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto s = random_model(seed, 2, 4, ModelClass::Branching);
      for (std::size_t l = 0; l < s.locations.size(); ++l) branching = branching || s.outgoing(l).size() >= 2;
    }
    CHECK(branching);
  }
}
