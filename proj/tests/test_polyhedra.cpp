#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace perm;
using testing::at;
using testing::q;

namespace {

// Variables: x, y (clocks), alpha, beta.
constexpr std::size_t X = 0, Y = 1, A = 2, B = 3;

AffineExpr v4(std::size_t i) { return AffineExpr::variable(4, i); }
AffineExpr k4(Rational c) { return AffineExpr::constant(4, c); }

AffineExpr lin(std::vector<Rational> cs, Rational c0) {
  AffineExpr e(cs.size(), c0);
  for (std::size_t i = 0; i < cs.size(); ++i) e.set_coeff(i, cs[i]);
  return e;
}

struct Fig1 {
  TimedAutomatonSpec spec = testing::fig("fig1");
  PermSolution sol = compute_permissiveness(spec);
  const PiecewiseAffineFn& l0() const { return sol.fns[*spec.find_location("l0")]; }
  const PiecewiseAffineFn& l1() const { return sol.fns[*spec.find_location("l1")]; }
};

const Fig1& fig1() {
  static Fig1 f;
  return f;
}

std::vector<Valuation> grid2(Rational top, Rational step) {
  std::vector<Valuation> out;
  for (Rational x = 0; x <= top; x += step)
    for (Rational y = 0; y <= top; y += step) out.push_back({x, y});
  return out;
}

}  // namespace

TEST_SUITE("polyhedra") {
  TEST_CASE("fm_eliminate of a single bounded variable") {
    Polyhedron p(3, 2);
    AffineExpr a = AffineExpr::variable(3, 2);
    p.add_le(-a);
    p.add_le(a, lin({-1, 0, 0}, 1));
    p.add_le(a, lin({0, -1, 0}, 1));
    Polyhedron r = fm_eliminate(p, {2});
    Polyhedron expect(3, 2);
    expect.add_le(lin({1, 0, 0}, -1));
    expect.add_le(lin({0, 1, 0}, -1));
    CHECK(contained_in(r, expect));
    CHECK(contained_in(expect, r));
    for (const auto& c : r.constraints()) CHECK(c.expr.coeff(2) == 0);
  }

  TEST_CASE("the empty pair case of the worked example") {
    // alpha <= beta, alpha and beta after reset in the second and first cell.
    Polyhedron p(4, 2);
    p.add_le(v4(A), v4(B));
    for (std::size_t d : {A, B}) {
      p.add_le(-(v4(Y) + v4(d)));
      p.add_le(v4(Y) + v4(d) - k4(1));
    }
    p.add_lt(k4(1) - v4(X) - v4(A));
    p.add_le(v4(X) + v4(A) - k4(2));
    p.add_le(-(v4(X) + v4(B)));
    p.add_le(v4(X) + v4(B) - k4(1));
    CHECK(is_empty(fm_eliminate(p, {A, B})));
    CHECK(is_empty(p));
  }

  TEST_CASE("eliminating an absent variable keeps the constraints") {
    Polyhedron p(3, 2);
    p.add_le(lin({1, 0, 0}, -1));
    p.add_lt(lin({0, -1, 0}, q(1, 2)));
    Polyhedron r = fm_eliminate(p, {2});
    CHECK(r.constraints().size() == 2);
    CHECK(contained_in(r, p));
    CHECK(contained_in(p, r));
  }

  TEST_CASE("is_empty") {
    Polyhedron p(2, 2);
    p.add_le(lin({1, 0}, -1));
    Polyhedron contradiction = p;
    contradiction.add_lt(lin({-1, 0}, 1));
    CHECK(is_empty(contradiction));
    p.add_le(lin({0, 1}, -1));
    CHECK_FALSE(is_empty(p));
    Polyhedron negative(2, 2);
    negative.add_le(lin({1, 0}, 1));  // x <= -1 has no nonnegative point
    CHECK(is_empty(negative));
  }

  TEST_CASE("intersect") {
    Polyhedron cell(2, 2);
    cell.add_le(lin({1, -1}, 0));
    Polyhedron all(2, 2);
    Polyhedron i = intersect(cell, all);
    CHECK(contained_in(i, cell));
    CHECK(contained_in(cell, i));
    Polyhedron le(2, 2), ge(2, 2);
    le.add_le(lin({1, 0}, -1));
    ge.add_le(lin({-1, 0}, 1));
    Polyhedron facet = intersect(le, ge);
    CHECK_FALSE(is_empty(facet));
    CHECK(facet.contains({q(1), q(7)}));
    CHECK_FALSE(facet.contains({q(1, 2), q(0)}));
  }

  TEST_CASE("refine of two partitions") {
    auto cells = refine(fig1().l0().cells, fig1().l1().cells);
    REQUIRE_FALSE(cells.empty());
    auto pts = grid2(q(5, 2), q(1, 16));
    for (const auto& c : cells) {
      CHECK_FALSE(is_empty(c.poly));
      bool in_a = false, in_b = false;
      for (const auto& a : fig1().l0().cells) in_a = in_a || contained_in(c.poly, a.poly);
      for (const auto& b : fig1().l1().cells) in_b = in_b || contained_in(c.poly, b.poly);
      CHECK(in_a);
      CHECK(in_b);
    }
    PiecewiseAffineFn r{2, cells};
    for (const auto& v : pts) CHECK(paf_eval(r, v) == paf_eval(fig1().l0(), v));
  }

  TEST_CASE("paf_eval") {
    const auto& s = fig1().spec;
    CHECK(at(fig1().l1(), s, "x=1/2,y=0") == ExtRational(q(1, 2)));
    CHECK(at(fig1().l1(), s, "x=3/2,y=1/5") == ExtRational(q(1, 2)));
    CHECK(at(fig1().l1(), s, "x=1/2,y=3/4").is_neg_inf());
    PiecewiseAffineFn partial{2, {{Polyhedron(2, 2), AffineExpr(2), std::nullopt}}};
    partial.cells[0].poly.add_le(lin({1, 0}, -1));
    CHECK_THROWS_AS(paf_eval(partial, {q(2), q(0)}), NoCell);
  }

  TEST_CASE("sup semantics on a shared boundary") {
    PiecewiseAffineFn f;
    f.nclocks = 1;
    Polyhedron left(1, 1), right(1, 1);
    left.add_le(lin({1}, -1));
    right.add_le(lin({-1}, 1));
    f.cells.push_back({left, lin({-1}, 1), std::nullopt});
    f.cells.push_back({right, AffineExpr::constant(1, ExtRational::neg_inf()), std::nullopt});
    CHECK(paf_eval(f, {q(1)}) == ExtRational(0));
    CHECK(paf_eval(f, {q(2)}).is_neg_inf());
  }

  TEST_CASE("pointwise max and min") {
    const auto& s = fig1().spec;
    auto mx = paf_pointwise_max({fig1().l0(), fig1().l1()});
    CHECK(at(mx, s, "x=4/5,y=0") == ExtRational(q(4, 5)));
    auto neg = PiecewiseAffineFn::constant(2, ExtRational::neg_inf());
    auto same = paf_pointwise_max({fig1().l1(), neg});
    auto mn = paf_pointwise_min({fig1().l0(), fig1().l0()});
    auto mn2 = paf_pointwise_min({fig1().l0(), fig1().l1()});
    for (const auto& v : grid2(q(3), q(1, 16))) {
      ExtRational a = paf_eval(fig1().l0(), v), b = paf_eval(fig1().l1(), v);
      CHECK(paf_eval(mx, v) == max(a, b));
      CHECK(paf_eval(mn2, v) == min(a, b));
      CHECK(paf_eval(same, v) == b);
      CHECK(paf_eval(mn, v) == a);
    }
  }

  TEST_CASE("refinement preserves evaluation") {
    const auto& f = fig1().l1();
    std::vector<Cell> other;
    for (int k = 0; k < 4; ++k) {
      Polyhedron band(2, 2);
      if (k > 0) band.add_le(lin({-1, -1}, q(k, 2)));
      if (k < 3) band.add_le(lin({1, 1}, -q(k + 1, 2)));
      other.push_back({band, AffineExpr(2), std::nullopt});
    }
    PiecewiseAffineFn r{2, refine(f.cells, other)};
    for (const auto& v : grid2(q(3), q(1, 16))) CHECK(paf_eval(r, v) == paf_eval(f, v));
  }

  TEST_CASE("minimize_along_delay") {
    Polyhedron all(2, 2);
    auto c = minimize_along_delay(PiecewiseAffineFn::constant(2, q(3)), all);
    CHECK(paf_eval(c, {q(5), q(1, 3)}) == ExtRational(3));
    // Without an invariant the delay may leave the finite region.
    CHECK(paf_eval(minimize_along_delay(fig1().l1(), all), {q(1), q(0)}).is_neg_inf());
    Polyhedron box(2, 2);
    box.add_le(lin({1, 0}, -2));
    box.add_le(lin({0, 1}, -1));
    auto m = minimize_along_delay(fig1().l1(), box);
    CHECK(paf_eval(m, {q(1), q(0)}) == ExtRational(0));
    CHECK(paf_eval(m, {q(1, 2), q(0)}) == ExtRational(0));

    PiecewiseAffineFn f;
    f.nclocks = 2;
    Polyhedron low(2, 2), high(2, 2);
    low.add_le(lin({0, 1}, -1));
    high.add_le(lin({0, -1}, 1));
    f.cells.push_back({low, lin({0, -1}, 1), std::nullopt});
    f.cells.push_back({high, AffineExpr::constant(2, ExtRational::neg_inf()), std::nullopt});
    auto g = minimize_along_delay(f, low);
    CHECK(paf_eval(g, {q(0), q(0)}) == ExtRational(0));
    CHECK(paf_eval(g, {q(0), q(2)}).is_neg_inf());
  }

  TEST_CASE("minimize_along_delay against dense sampling") {
    const auto& f = fig1().l0();
    Polyhedron inv(2, 2);
    inv.add_le(lin({1, 0}, -1));
    auto m = minimize_along_delay(f, inv);
    for (const auto& v : grid2(q(1), q(1, 16))) {
      ExtRational best = ExtRational::pos_inf();
      bool any = false;
      for (Rational d = 0; v[0] + d <= 1; d += q(1, 64)) {
        any = true;
        best = min(best, paf_eval(f, {v[0] + d, v[1] + d}));
      }
      REQUIRE(any);
      ExtRational got = paf_eval(m, v);
      if (best.is_finite()) {
        REQUIRE(got.is_finite());
        CHECK(got <= best);
        CHECK((best - got).to_double() <= 2.0 / 64 + 1e-12);
      } else {
        CHECK(got == best);
      }
    }
  }

  TEST_CASE("fm_eliminate soundness on random polyhedra") {
    std::mt19937_64 rng(5);
    auto coef = [&] { return Rational(long(rng() % 9) - 4); };
    for (int it = 0; it < 200; ++it) {
      Polyhedron p(3, 2);
      std::size_t m = 1 + rng() % 6;
      for (std::size_t k = 0; k < m; ++k) p.add({lin({coef(), coef(), coef()}, coef()), rng() % 4 == 0});
      Polyhedron r = fm_eliminate(p, {2});
      for (int s = 0; s < 20; ++s) {
        Valuation v{q(long(rng() % 17), 8), q(long(rng() % 17), 8)};
        bool exists = false;
        for (Rational z = -8; z <= 8 && !exists; z += q(1, 8)) exists = p.contains({v[0], v[1], z});
        // Exact interval of feasible z at v.
        ExtRational lo = ExtRational::neg_inf(), hi = ExtRational::pos_inf();
        bool lo_strict = false, hi_strict = false, ok = true;
        for (const auto& c : p.constraints()) {
          Rational rest = c.expr.coeff(0) * v[0] + c.expr.coeff(1) * v[1] + c.expr.constant_term().value();
          const Rational& a = c.expr.coeff(2);
          if (sgn(a) == 0) {
            if (sgn(rest) > 0 || (sgn(rest) == 0 && c.strict)) ok = false;
          } else if (sgn(a) > 0) {
            ExtRational b(Rational(-rest / a));
            if (b < hi || (b == hi && c.strict)) hi = b, hi_strict = c.strict;
          } else {
            ExtRational b(Rational(-rest / a));
            if (b > lo || (b == lo && c.strict)) lo = b, lo_strict = c.strict;
          }
        }
        bool nonempty = ok && (lo < hi || (lo == hi && !lo_strict && !hi_strict));
        CHECK(r.contains({v[0], v[1], 0}) == nonempty);
        if (exists) CHECK(nonempty);
      }
    }
  }
}
