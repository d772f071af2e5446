#include "helpers.hpp"

#include <doctest.h>

using namespace perm;
using testing::q;

namespace {

const char* kFig1 = R"(clocks x y
location l0 initial
location l1
location lf target
edge l0 -> l1 action a guard "0<=x<=1 & 0<=y<=1" reset y
edge l1 -> lf action b guard "1<=x<=2 & 0<=y<=1"
)";

ModelErrorKind first_error(const std::string& text, ParseMode mode = ParseMode::Solver) {
  try {
    parse_model(text, mode);
  } catch (const ModelError& e) {
    REQUIRE_FALSE(e.diagnostics.empty());
    return e.diagnostics.front().kind;
  }
  FAIL("expected a model error");
  return ModelErrorKind::Syntax;
}

Config cfg(const TimedAutomatonSpec& s, const std::string& loc, const std::string& v) {
  return {*s.find_location(loc), parse_valuation(s, v)};
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("parse the linear example") {
    auto s = parse_model(kFig1);
    CHECK(s.nclocks() == 2);
    CHECK(s.locations.size() == 3);
    CHECK(s.transitions.size() == 2);
    CHECK(classify(s) == ModelClass::Linear);
    CHECK(max_constant(s) == 2);
    CHECK(s.locations[s.target].id == "lf");
    CHECK(s.locations[s.initial].id == "l0");
    CHECK_NOTHROW(topological_order(s));
  }

  TEST_CASE("the shipped models parse") {
    CHECK(classify(testing::fig("fig1")) == ModelClass::Linear);
    CHECK(classify(testing::fig("fig3")) == ModelClass::Linear);
    CHECK(classify(testing::fig("fig4")) == ModelClass::Branching);
  }

  TEST_CASE("text round trip") {
    auto s = parse_model(kFig1);
    auto t = parse_model(to_text(s));
    CHECK(to_text(t) == to_text(s));
  }

  TEST_CASE("owners, invariants and comments") {
    auto s = parse_model(R"(# a game
clocks x
location a initial owner opponent invariant "x<=3"
location g target
edge a -> g action go guard "x>=1"  # trailing comment
)");
    CHECK(s.locations[0].owner == Owner::Opponent);
    CHECK(s.locations[0].invariant.size() == 1);
    CHECK(classify(s) == ModelClass::Game);
  }

  TEST_CASE("errors") {
    std::string dup = std::string(kFig1) + "edge l0 -> lf action a guard \"x<=1\"\n";
    CHECK(first_error(dup) == ModelErrorKind::DuplicateAction);
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u guard \"z<=1\"\n") ==
          ModelErrorKind::UnknownClock);
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a -> c action u\n") ==
          ModelErrorKind::UnknownLocation);
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u guard \"x<1\"\n") ==
          ModelErrorKind::StrictGuard);
    CHECK_NOTHROW(parse_model("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u guard \"x<1\"\n",
                              ParseMode::Oracle));
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u\nedge b -> a action v\n") ==
          ModelErrorKind::CycleDetected);
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u guard "
                      "\"x<=99999999999999999999999\"\n") == ModelErrorKind::Overflow);
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a => b action u\n") ==
          ModelErrorKind::Syntax);
    CHECK(first_error("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u guard \"x<=1/2\"\n") ==
          ModelErrorKind::Syntax);
  }

  TEST_CASE("diagnostics carry line numbers") {
    try {
      parse_model("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u guard \"q<=1\"\n");
      FAIL("expected an error");
    } catch (const ModelError& e) {
      CHECK(e.diagnostics.front().line == 4);
    }
  }

  TEST_CASE("step") {
    auto s = parse_model(kFig1);
    Config c = step(s, cfg(s, "l0", "x=0,y=0"), q(1, 2), "a");
    CHECK(s.locations[c.loc].id == "l1");
    CHECK(c.v == Valuation{q(1, 2), q(0)});
    Config z = step(s, cfg(s, "l0", "x=1/2,y=1/3"), q(0), "a");
    CHECK(z.v == Valuation{q(1, 2), q(0)});
    CHECK_THROWS_AS(step(s, cfg(s, "l0", "x=0,y=0"), q(3, 2), "a"), StepError);
    try {
      step(s, cfg(s, "l0", "x=0,y=0"), q(3, 2), "a");
    } catch (const StepError& e) {
      CHECK(e.kind == StepErrorKind::GuardViolated);
    }
    try {
      step(s, cfg(s, "l0", "x=0,y=0"), q(0), "b");
    } catch (const StepError& e) {
      CHECK(e.kind == StepErrorKind::NoSuchTransition);
    }
  }

  TEST_CASE("step checks invariants") {
    auto s = parse_model(R"(clocks x
location a initial invariant "x<=2"
location b invariant "x<=1"
location g target
edge a -> b action u
edge b -> g action w
)");
    try {
      step(s, {0, {q(0)}}, q(3), "u");
      FAIL("expected an error");
    } catch (const StepError& e) {
      CHECK(e.kind == StepErrorKind::InvariantViolated);
    }
    try {
      step(s, {0, {q(0)}}, q(3, 2), "u");
      FAIL("expected an error");
    } catch (const StepError& e) {
      CHECK(e.kind == StepErrorKind::InvariantViolated);
    }
    CHECK(step(s, {0, {q(0)}}, q(1), "u").loc == 1);
  }

  TEST_CASE("moves_at") {
    auto s = parse_model(kFig1);
    auto m = moves_at(s, cfg(s, "l1", "x=1/2,y=0"), "b");
    REQUIRE_FALSE(m.empty);
    CHECK(m.lo == q(1, 2));
    CHECK(m.hi == ExtRational(q(1)));
    CHECK(moves_at(s, cfg(s, "l0", "x=2,y=0"), "a").empty);
    auto free = parse_model("clocks x\nlocation a initial\nlocation b target\nedge a -> b action u\n");
    auto f = moves_at(free, {0, {q(3)}}, "u");
    CHECK_FALSE(f.empty);
    CHECK(f.lo == 0);
    CHECK(f.hi.is_pos_inf());
  }

  TEST_CASE("moves_at agrees with step on a grid") {
    auto s = testing::fig("fig4");
    for (std::size_t loc = 0; loc < s.locations.size(); ++loc)
      for (std::size_t t : s.outgoing(loc)) {
        const std::string& act = s.transitions[t].action;
        for (Rational x = 0; x <= 3; x += q(1, 4))
          for (Rational y = 0; y <= 3; y += q(1, 4)) {
            Config c{loc, {x, y}};
            auto m = moves_at(s, c, act);
            for (Rational d = 0; d <= 4; d += q(1, 16)) {
              bool ok = true;
              try {
                step(s, c, d, act);
              } catch (const StepError&) {
                ok = false;
              }
              CHECK(ok == m.contains(d));
            }
          }
      }
  }

  TEST_CASE("longest_path_length") {
    auto s1 = testing::fig("fig1");
    CHECK(longest_path_length(s1, *s1.find_location("l0")) == std::optional<std::size_t>(2));
    CHECK(longest_path_length(s1, s1.target) == std::optional<std::size_t>(0));
    auto s4 = testing::fig("fig4");
    CHECK(longest_path_length(s4, *s4.find_location("l0")) == std::optional<std::size_t>(2));
    auto u = parse_model("clocks x\nlocation a initial\nlocation b\nlocation g target\nedge a -> b action u\n");
    CHECK_FALSE(longest_path_length(u, 0).has_value());
  }

  TEST_CASE("valuations") {
    auto s = parse_model(kFig1);
    CHECK(parse_valuation(s, "y=0.5, x=1/3") == Valuation{q(1, 3), q(1, 2)});
    CHECK_THROWS(parse_valuation(s, "x=1"));
    CHECK_THROWS(parse_valuation(s, "x=1,y=-1"));
    CHECK_THROWS(parse_valuation(s, "x=1,z=1"));
  }
}
