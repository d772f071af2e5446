#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace perm;
using testing::q;

namespace {

AffineExpr lin(std::vector<Rational> cs, Rational c0) {
  AffineExpr e(cs.size(), c0);
  for (std::size_t i = 0; i < cs.size(); ++i) e.set_coeff(i, cs[i]);
  return e;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("extended rationals are canonical and reject indeterminate forms") {
    CHECK(ExtRational(q(2, 4)).str() == "1/2");
    CHECK(ExtRational::parse("-3/6") == ExtRational(q(-1, 2)));
    CHECK(ExtRational::parse("0.25") == ExtRational(q(1, 4)));
    CHECK(ExtRational::parse("+inf").is_pos_inf());
    CHECK(ExtRational::parse("-inf").is_neg_inf());
    CHECK_THROWS_AS(ExtRational::pos_inf() + ExtRational::neg_inf(), IndeterminateForm);
    CHECK_THROWS_AS(ExtRational::pos_inf() * Rational(0), IndeterminateForm);
    CHECK((ExtRational::pos_inf() + ExtRational(5)).is_pos_inf());
    CHECK(ExtRational::neg_inf() < ExtRational(-1000));
    CHECK(min(ExtRational(3), ExtRational::neg_inf()).is_neg_inf());
  }

  TEST_CASE("eval") {
    AffineExpr f = lin({-1, 0}, 1);
    CHECK(f.eval({q(3, 4), q(0)}) == ExtRational(q(1, 4)));
    CHECK(AffineExpr(2).eval({q(5), q(7)}) == ExtRational(0));
    CHECK(AffineExpr::constant(2, ExtRational::neg_inf()).eval({q(2), q(1)}).is_neg_inf());
    CHECK(f.eval({q(0), q(0)}) == f.constant_term());
  }

  TEST_CASE("infinite expressions carry no coefficients") {
    AffineExpr e = AffineExpr::constant(2, ExtRational::pos_inf());
    CHECK_THROWS_AS(e.set_coeff(0, q(1)), InfiniteAffine);
    AffineExpr x = AffineExpr::variable(2, 0);
    AffineExpr s = e + x;
    CHECK(s.constant_term().is_pos_inf());
    CHECK(s.coeff(0) == 0);
  }

  TEST_CASE("affine arithmetic") {
    CHECK(lin({-1, 0}, 1) + lin({1, -1}, 0) == lin({0, -1}, 1));
    CHECK(lin({0, -1}, 1) * q(1, 2) == lin({0, q(-1, 2)}, q(1, 2)));
    CHECK(lin({0, -1}, 1) / q(2) == lin({0, q(-1, 2)}, q(1, 2)));
    CHECK(lin({1, -1}, 3) - lin({1, -1}, 1) == lin({0, 0}, 2));
  }

  TEST_CASE("delay_reset_compose examples") {
    auto r1 = delay_reset_compose(lin({1, -1}, 0), {false, true});
    CHECK(r1.slope == 1);
    CHECK(r1.offset == lin({1, 0}, 0));
    auto r2 = delay_reset_compose(lin({1, 1}, 0), {true, true});
    CHECK(r2.slope == 0);
    CHECK(r2.offset == lin({0, 0}, 0));
    auto r3 = delay_reset_compose(lin({-1, 0}, 2), {false, false});
    CHECK(r3.slope == -1);
    CHECK(r3.offset == lin({-1, 0}, 2));
    CHECK_THROWS_AS(delay_reset_compose(AffineExpr::constant(2, ExtRational::neg_inf()), {false, false}),
                    InfiniteAffine);
  }

  TEST_CASE("linearity and delay/reset round trip on random data") {
    std::mt19937_64 rng(11);
    auto rq = [&] { return q(long(rng() % 17) - 8, long(rng() % 8) + 1); };
    auto rv = [&] { return q(long(rng() % 33), long(rng() % 8) + 1); };
    for (int it = 0; it < 100; ++it) {
      AffineExpr f = lin({rq(), rq(), rq()}, rq()), g = lin({rq(), rq(), rq()}, rq());
      Valuation v{rv(), rv(), rv()};
      Rational lambda = rq();
      CHECK((f + g).eval(v) == f.eval(v) + g.eval(v));
      CHECK((f * lambda).eval(v) == f.eval(v) * lambda);
      std::vector<bool> z{bool(rng() % 2), bool(rng() % 2), bool(rng() % 2)};
      Rational a = rv();
      auto r = delay_reset_compose(f, z);
      Valuation w = v;
      for (std::size_t c = 0; c < 3; ++c) w[c] = z[c] ? Rational(0) : Rational(v[c] + a);
      CHECK(f.eval(w) == ExtRational(Rational(r.slope * a)) + r.offset.eval(v));
    }
  }
}
