#include "perm/optimizer.hpp"

#include <tuple>

namespace perm {

namespace {

// The closed-form table, written once for any number type with a decider
// that answers x <= y (possibly by splitting a parameter space).
template <class Num, class Dec>
struct Table {
  Dec& dec;
  Rational a, c;
  Num b, d, ma, Ma, mb, Mb;

  struct Out {
    Num value;
    const char* row;
  };

  Num mn(std::initializer_list<Num> xs) {
    auto it = xs.begin();
    Num r = *it;
    for (++it; it != xs.end(); ++it)
      if (!dec.le(r, *it)) r = *it;
    return r;
  }
  Num mx(std::initializer_list<Num> xs) {
    auto it = xs.begin();
    Num r = *it;
    for (++it; it != xs.end(); ++it)
      if (!dec.le(*it, r)) r = *it;
    return r;
  }
  Num f(const Num& al) { return Num(al * a) + b; }
  Num g(const Num& be) { return Num(be * c) + d; }

  Out solve() {
    Out r = table();
    if (sgn(a) > 0 && sgn(c) < 0) {
      // Every case above is a dual bound of the underlying linear program; the
      // optimum is the smallest of them. The printed "otherwise" rows can pick
      // a point outside the box, so compare and keep the true optimum.
      Rational den = (a + 1) * (1 - c) - 1;
      Num exact = mn({f(Ma), f(Mb), g(mb), g(ma), Num(Mb - ma), Num(Num(Mb * a) + b) / Rational(a + 1),
                      Num(g(ma) / Rational(1 - c)), Num(Num(d * a) - Num(b * c)) / Rational(a - c),
                      Num(Num(d * a) - Num(b * c)) / den});
      if (!(dec.le(exact, r.value) && dec.le(r.value, exact))) return {exact, "D*"};
    }
    return r;
  }

  Out table() {
    if (sgn(a) <= 0 && sgn(c) >= 0) return {mn({Num(Mb - ma), f(ma), g(Mb)}), "A"};
    if (sgn(a) >= 0 && sgn(c) >= 0) {
      Num a0 = Num(Mb - b) / Rational(a + 1);
      if (dec.le(a0, ma)) return {mn({Num(Mb - ma), g(Mb)}), "B1"};
      Num top = mn({Ma, Mb});
      if (dec.le(a0, top)) return {mn({Num(Num(Mb * a) + b) / Rational(a + 1), g(Mb)}), "B2"};
      return {mn({f(top), g(Mb)}), "B3"};
    }
    if (sgn(a) <= 0 && sgn(c) <= 0) {
      Rational oc = 1 - c;
      Num b0 = Num(ma + d) / oc;
      if (dec.le(Mb, b0)) return {mn({Num(Mb - ma), f(ma)}), "C1"};
      Num low = mx({ma, mb});
      if (dec.le(low, b0)) return {mn({Num(g(ma) / oc), f(ma)}), "C2"};
      return {mn({f(ma), g(low)}), "C3"};
    }
    // a > 0 and c < 0
    Num top = mn({Ma, Mb});
    Num low = mx({ma, mb});
    {
      Num fv = f(top), gv = g(Mb), hv = Mb - top;
      if (dec.le(fv, gv) && dec.le(fv, hv)) return {fv, "D1"};
    }
    {
      Num fv = f(ma), gv = g(low), hv = low - ma;
      if (dec.le(gv, fv) && dec.le(gv, hv)) return {gv, "D2"};
    }
    {
      Num fv = f(ma), gv = g(Mb), hv = Mb - ma;
      if (dec.le(hv, fv) && dec.le(hv, gv)) return {hv, "D3"};
    }
    Rational den = (a + 1) * (1 - c) - 1;
    if (sgn(den) <= 0) throw std::logic_error("degenerate tripoint with a > 0 and c < 0");
    Num Ta = Num(d - Num(b * Rational(1 - c))) / den;
    Num Tb = Num(Num(d * Rational(a + 1)) - b) / den;
    if (dec.le(Mb, Tb)) return {Num(Num(Mb * a) + b) / Rational(a + 1), "D4"};
    if (dec.le(Ta, ma)) return {Num(g(ma) / Rational(1 - c)), "D5"};
    Num ad = d * a, bc = b * c;
    if (dec.le(ad, bc)) {
      {
        Num x = mn({mb, Ma});
        Num gv = g(mb), fv = f(x), hv = mb - x;
        if (dec.le(gv, fv) && dec.le(gv, hv)) return {gv, "D6a"};
      }
      {
        Num y = mx({mb, Ma});
        Num gv = g(y), fv = f(Ma), hv = y - Ma;
        if (dec.le(gv, fv) && dec.le(gv, hv)) return {Num(ad - bc) / Rational(a - c), "D6b"};
      }
      return {f(Ma), "D6c"};
    }
    if (dec.le(Tb, mb)) return {g(mb), "D7a"};
    if (dec.le(Ma, Ta)) return {f(Ma), "D7b"};
    return {Num(ad - bc) / den, "D7c"};
  }
};

struct ConcreteDecider {
  bool le(const Rational& x, const Rational& y) const { return x <= y; }
};

// Re-execution brancher: each run follows a recorded prefix of decisions and
// records new ones; when both outcomes are possible the alternative is queued.
struct SymbolicDecider {
  struct Step {
    bool result;
    bool constrained;
  };
  Polyhedron ctx;
  std::vector<Step> path;
  std::size_t pos = 0;
  std::vector<std::vector<Step>>* pending = nullptr;

  bool le(const AffineExpr& x, const AffineExpr& y) {
    AffineExpr diff = x - y;
    if (diff.is_constant()) return sgn(diff.constant_term().value()) <= 0;
    if (pos < path.size()) {
      Step s = path[pos++];
      if (s.constrained) ctx.add_le(s.result ? diff : -diff);
      return s.result;
    }
    Polyhedron lt = ctx;
    lt.add_lt(diff);
    Polyhedron gt = ctx;
    gt.add_lt(-diff);
    bool can_lt = !is_empty(lt), can_gt = !is_empty(gt);
    if (can_lt && can_gt) {
      auto alt = path;
      alt.push_back({false, true});
      pending->push_back(std::move(alt));
      path.push_back({true, true});
      ++pos;
      ctx.add_le(diff);
      return true;
    }
    bool r = !can_gt;
    path.push_back({r, false});
    ++pos;
    return r;
  }
};

// Replaces an infinite b or d by Mb - ma, which never binds below beta - alpha.
AffineExpr finite_term(const AffineExpr& e, const Rational& slope, const AffineExpr& cap) {
  if (e.is_finite()) return e;
  if (!e.constant_term().is_pos_inf() || sgn(slope) != 0)
    throw std::invalid_argument("an infinite term must be +inf with slope 0");
  return cap;
}

// Lexicographically smallest (alpha, beta) in D with mu >= value, split over cond.
std::vector<std::tuple<Polyhedron, AffineExpr, AffineExpr>> lexmin_points(const BoxProblem& p, const Polyhedron& cond,
                                                                          const AffineExpr& value) {
  std::size_t n = cond.nvars(), N = n + 2, ia = n, ib = n + 1;
  auto E = [&](const AffineExpr& e) { return resize(e, N); };
  AffineExpr al = AffineExpr::variable(N, ia), be = AffineExpr::variable(N, ib);
  Polyhedron s = resize(cond, N);
  s.add_le(E(p.m_alpha), al);
  s.add_le(al, E(p.M_alpha));
  s.add_le(E(p.m_beta), be);
  s.add_le(be, E(p.M_beta));
  s.add_le(al, be);
  AffineExpr v = E(value);
  s.add_le(v, be - al);
  s.add_le(v, al * p.a + E(p.b));
  s.add_le(v, be * p.c + E(p.d));
  std::vector<std::tuple<Polyhedron, AffineExpr, AffineExpr>> out;
  Polyhedron sa = fm_eliminate(s, {ib});
  std::vector<AffineExpr> alphas;
  for (const auto& e : bounds_on(sa, ia).lower) alphas.push_back(resize(e, n));
  if (alphas.empty()) throw std::logic_error("optimal set has no lower bound on alpha");
  for (auto& [pa, ka] : split_by_extreme(cond, alphas, false)) {
    Polyhedron sb = substitute(s, ia, E(alphas[ka]));
    sb.add_all(resize(pa, N));
    std::vector<AffineExpr> betas;
    for (const auto& e : bounds_on(sb, ib).lower) betas.push_back(resize(e, n));
    if (betas.empty()) throw std::logic_error("optimal set has no lower bound on beta");
    for (auto& [pb, kb] : split_by_extreme(pa, betas, false)) {
      Polyhedron check = resize(pb, N);
      check.add_all(substitute(sb, ib, E(betas[kb])));
      if (is_empty(check)) continue;
      out.emplace_back(pb, alphas[ka], betas[kb]);
    }
  }
  return out;
}

BoxProblem lift(const ConcreteBox& p) {
  BoxProblem q;
  q.a = p.a;
  q.c = p.c;
  q.b = AffineExpr::constant(0, p.b);
  q.d = AffineExpr::constant(0, p.d);
  q.m_alpha = AffineExpr::constant(0, p.m_alpha);
  q.M_alpha = AffineExpr::constant(0, p.M_alpha);
  q.m_beta = AffineExpr::constant(0, p.m_beta);
  q.M_beta = AffineExpr::constant(0, p.M_beta);
  return q;
}

}  // namespace

const std::vector<std::string>& table_rows() {
  static const std::vector<std::string> rows{"A",  "B1", "B2",  "B3",  "C1",  "C2",  "C3",  "D1",  "D2",
                                             "D3", "D4", "D5",  "D6a", "D6b", "D6c", "D7a", "D7b", "D7c", "D*"};
  return rows;
}

ExtRational mu_eval(const ConcreteBox& p, const Rational& alpha, const Rational& beta) {
  if (alpha < p.m_alpha || alpha > p.M_alpha || beta < p.m_beta || beta > p.M_beta || alpha > beta)
    throw std::domain_error("point outside the box domain");
  ExtRational r = ExtRational(Rational(beta - alpha));
  r = min(r, p.b + ExtRational(Rational(p.a * alpha)));
  r = min(r, p.d + ExtRational(Rational(p.c * beta)));
  return r;
}

BoxSolution solve_box_concrete(const ConcreteBox& p) {
  if (p.m_alpha > p.M_alpha || p.m_beta > p.M_beta || p.m_alpha > p.M_beta)
    throw EmptyDomain("the box domain is empty");
  Rational cap = p.M_beta - p.m_alpha;
  auto fin = [&](const ExtRational& x, const Rational& slope) -> Rational {
    if (x.is_finite()) return x.value();
    if (!x.is_pos_inf() || sgn(slope) != 0) throw std::invalid_argument("an infinite term must be +inf with slope 0");
    return cap;
  };
  ConcreteDecider dec;
  Table<Rational, ConcreteDecider> t{dec, p.a, p.c, fin(p.b, p.a), fin(p.d, p.c), p.m_alpha, p.M_alpha, p.m_beta, p.M_beta};
  auto res = t.solve();
  BoxProblem q = lift(p);
  q.b = AffineExpr::constant(0, t.b);
  q.d = AffineExpr::constant(0, t.d);
  auto pts = lexmin_points(q, Polyhedron(0, 0), AffineExpr::constant(0, res.value));
  if (pts.empty()) throw std::logic_error("closed-form value is not attained on the box");
  BoxSolution sol;
  sol.value = res.value;
  sol.alpha = std::get<1>(pts.front()).constant_term().value();
  sol.beta = std::get<2>(pts.front()).constant_term().value();
  sol.row = res.row;
  return sol;
}

ConcreteBox instantiate(const BoxProblem& p, const Valuation& v) {
  ConcreteBox q;
  q.a = p.a;
  q.c = p.c;
  q.b = p.b.eval(v);
  q.d = p.d.eval(v);
  q.m_alpha = p.m_alpha.eval(v).value();
  q.M_alpha = p.M_alpha.eval(v).value();
  q.m_beta = p.m_beta.eval(v).value();
  q.M_beta = p.M_beta.eval(v).value();
  return q;
}

SymbolicOptResult solve_box_symbolic(const BoxProblem& p0, const Polyhedron& context) {
  SymbolicOptResult out;
  BoxProblem p = p0;
  AffineExpr cap = p.M_beta - p.m_alpha;
  p.b = finite_term(p.b, p.a, cap);
  p.d = finite_term(p.d, p.c, cap);
  if (!p.m_alpha.is_finite() || !p.M_alpha.is_finite() || !p.m_beta.is_finite() || !p.M_beta.is_finite())
    throw std::invalid_argument("box bounds must be finite");
  Polyhedron base = context;
  base.add_le(p.m_alpha, p.M_alpha);
  base.add_le(p.m_beta, p.M_beta);
  base.add_le(p.m_alpha, p.M_beta);
  if (is_empty(base)) return out;

  std::vector<std::vector<SymbolicDecider::Step>> pending{{}};
  while (!pending.empty()) {
    SymbolicDecider dec;
    dec.ctx = base;
    dec.path = std::move(pending.back());
    pending.pop_back();
    dec.pending = &pending;
    Table<AffineExpr, SymbolicDecider> t{dec, p.a, p.c, p.b, p.d, p.m_alpha, p.M_alpha, p.m_beta, p.M_beta};
    auto res = t.solve();
    Polyhedron cond = simplify(dec.ctx);
    if (is_empty(cond)) continue;
    for (auto& [piece, al, be] : lexmin_points(p, cond, res.value))
      out.cases.push_back({simplify(piece), res.value, al, be, true, res.row});
  }
  return out;
}

}  // namespace perm
