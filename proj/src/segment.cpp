#include "perm/segment.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace perm {

namespace {

// Variable layout of the walker systems.
struct Layout {
  std::size_t n;
  std::size_t t() const { return n; }
  std::size_t s() const { return n + 1; }
  std::size_t cur() const { return n + 2; }
  std::size_t nxt() const { return n + 3; }
  std::size_t size() const { return n + 4; }
};

// Expression over the walker space for f evaluated at (v + var)[reset->0].
AffineExpr at_delay(const AffineExpr& f, const Layout& L, std::size_t var, const std::vector<bool>& reset) {
  AffineExpr r(L.size(), f.constant_term());
  if (!f.is_finite()) return r;
  Rational slope = 0;
  for (std::size_t c = 0; c < L.n; ++c) {
    if (c < reset.size() && reset[c]) continue;
    if (sgn(f.coeff(c)) == 0) continue;
    r.set_coeff(c, f.coeff(c));
    slope += f.coeff(c);
  }
  r.set_coeff(var, slope);
  return r;
}

void add_point_in(Polyhedron& p, const Polyhedron& region, const Layout& L, std::size_t var,
                  const std::vector<bool>& reset) {
  for (const auto& c : region.constraints()) p.add({at_delay(c.expr, L, var, reset), c.strict});
}

AffineExpr var(const Layout& L, std::size_t i) { return AffineExpr::variable(L.size(), i); }

// t <= f(point)
void add_value_bound(Polyhedron& p, const AffineExpr& f, const Layout& L, std::size_t v,
                     const std::vector<bool>& reset) {
  if (f.constant_term().is_pos_inf()) return;
  p.add_le(var(L, L.t()), at_delay(f, L, v, reset));
}

// Moves variable `from` into slot `to` (slot `to` must be unused).
Polyhedron move_var(const Polyhedron& p, const Layout& L, std::size_t from, std::size_t to) {
  std::vector<std::size_t> map(L.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
  map[from] = to;
  map[to] = from;
  return remap(p, L.size(), L.n, map);
}

AffineExpr embed(const AffineExpr& e, const Layout& L) {
  std::vector<std::size_t> map(e.nvars());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
  return e.remap(L.size(), map);
}

Polyhedron embed(const Polyhedron& p, const Layout& L) {
  std::vector<std::size_t> map(p.nvars());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
  return remap(p, L.size(), L.n, map);
}

std::vector<AffineExpr> lower_of(const Polyhedron& p, std::size_t x) {
  std::vector<AffineExpr> out;
  for (const auto& e : bounds_on(p, x).lower) out.push_back(resize(e, p.nclocks()));
  return out;
}

void push_unique(std::vector<AffineExpr>& es, const AffineExpr& e) {
  for (const auto& x : es)
    if (x == e) return;
  es.push_back(e);
}

struct Projected {
  Polyhedron domain;              // over clocks, closed
  std::vector<AffineExpr> upper;  // t <= each; empty means +inf
};

// r is over the walker space with only clocks and t left.
Projected read_projection(const Polyhedron& r, const Layout& L) {
  Projected out{Polyhedron(L.n, L.n), {}};
  for (const auto& c : r.constraints()) {
    const Rational& at = c.expr.coeff(L.t());
    AffineExpr rest = c.expr;
    rest.set_coeff(L.t(), 0);
    if (sgn(at) == 0) {
      out.domain.add_le(resize(rest, L.n));
    } else if (sgn(at) > 0) {
      push_unique(out.upper, resize(-rest / at, L.n));
    } else {
      throw std::logic_error("lower bound on the objective variable");
    }
  }
  return out;
}

class Walker {
 public:
  Walker(const DelayLine& line, std::string action, bool with_moves)
      : line_(line), L_{line.nclocks}, action_(std::move(action)), with_moves_(with_moves) {
    no_reset_.assign(L_.n, false);
  }

  std::vector<Cell> run_best_interval() {
    for (std::size_t i = 0; i < line_.cells.size(); ++i) {
      Polyhedron p = start_system();
      p.add_eq(var(L_, L_.cur()), var(L_, L_.s()));
      enter_cell(p, i, L_.cur());
      if (is_empty(p)) continue;
      std::vector<std::size_t> chain{i};
      dfs_interval(p, chain);
    }
    return std::move(out_);
  }

  std::vector<Cell> run_pair(std::size_t i, std::size_t j) {
    Polyhedron p = start_system();
    p.add_eq(var(L_, L_.cur()), var(L_, L_.s()));
    enter_cell(p, i, L_.cur());
    if (is_empty(p)) return {};
    close_interval(p, j, true);
    return std::move(out_);
  }

 private:
  Polyhedron start_system() const {
    Polyhedron p(L_.size(), L_.n);
    p.add_le(-var(L_, L_.s()));
    add_point_in(p, line_.window, L_, L_.s(), no_reset_);
    return p;
  }

  void enter_cell(Polyhedron& p, std::size_t i, std::size_t at) const {
    add_point_in(p, line_.cells[i].poly, L_, at, line_.reset);
    add_value_bound(p, line_.cells[i].value, L_, at, line_.reset);
  }

  // Next breakpoint: leave cell chain.back() into cell j at variable nxt.
  std::optional<Polyhedron> extend(const Polyhedron& p, std::size_t h, std::size_t j) const {
    Polyhedron q = p;
    q.add_lt(var(L_, L_.cur()) - var(L_, L_.nxt()));
    add_point_in(q, line_.cells[h].poly, L_, L_.nxt(), line_.reset);
    add_point_in(q, line_.cells[j].poly, L_, L_.nxt(), line_.reset);
    add_value_bound(q, line_.cells[h].value, L_, L_.nxt(), line_.reset);
    q = fm_eliminate(q, {L_.cur()});
    q = move_var(q, L_, L_.nxt(), L_.cur());
    if (is_empty(q)) return std::nullopt;
    return q;
  }

  void dfs_interval(const Polyhedron& p, std::vector<std::size_t>& chain) {
    close_interval(p, chain.back(), chain.size() == 1);
    for (std::size_t j = 0; j < line_.cells.size(); ++j) {
      if (std::find(chain.begin(), chain.end(), j) != chain.end()) continue;
      if (!touches(chain.back(), j)) continue;
      auto q = extend(p, chain.back(), j);
      if (!q) continue;
      chain.push_back(j);
      dfs_interval(*q, chain);
      chain.pop_back();
    }
  }

  void close_interval(const Polyhedron& p, std::size_t h, bool single) {
    Polyhedron q = p;
    AffineExpr beta = var(L_, L_.nxt());
    if (single) q.add_le(var(L_, L_.s()) - beta);
    else q.add_lt(var(L_, L_.cur()) - beta);
    add_point_in(q, line_.window, L_, L_.nxt(), no_reset_);
    enter_cell(q, h, L_.nxt());
    q.add_le(var(L_, L_.t()), beta - var(L_, L_.s()));
    Polyhedron r = fm_eliminate(q, {L_.cur(), L_.nxt(), L_.s()});
    if (is_empty(r)) return;
    emit(r, q);
  }

  bool touches(std::size_t i, std::size_t j) {
    if (touch_.empty()) {
      std::size_t m = line_.cells.size();
      touch_.assign(m * m, -1);
    }
    int& t = touch_[i * line_.cells.size() + j];
    if (t < 0) t = is_empty(intersect(line_.cells[i].poly, line_.cells[j].poly)) ? 0 : 1;
    return t == 1;
  }

  void emit(const Polyhedron& projected, const Polyhedron& system) {
    Projected pr = read_projection(projected, L_);
    Polyhedron dom = simplify(closure(pr.domain));
    if (pr.upper.empty()) {
      emit_value(dom, AffineExpr::constant(L_.n, ExtRational::pos_inf()), system);
      return;
    }
    for (auto& [piece, k] : split_by_extreme(dom, pr.upper, true)) emit_value(piece, pr.upper[k], system);
  }

  void emit_value(const Polyhedron& dom, const AffineExpr& value, const Polyhedron& system) {
    if (!with_moves_) {
      out_.push_back({dom, value, std::nullopt});
      return;
    }
    // Lexicographically smallest optimal (alpha, beta) on the closure.
    Polyhedron q(L_.size(), L_.n);
    bool finite = value.is_finite();
    AffineExpr ev = finite ? embed(value, L_) : AffineExpr();
    Polyhedron closed = closure(system);
    for (const auto& c : closed.constraints()) {
      if (sgn(c.expr.coeff(L_.t())) != 0) {
        if (!finite) continue;
        q.add_le(c.expr.substitute(L_.t(), ev));
      } else {
        q.add_le(c.expr);
      }
    }
    q.add_all(embed(dom, L_));
    Polyhedron qa = fm_eliminate(q, {L_.cur(), L_.nxt()});
    auto alphas = lower_of(qa, L_.s());
    if (alphas.empty()) throw std::logic_error("no lower bound on the interval start");
    for (auto& [pa, ia] : split_by_extreme(dom, alphas, false)) {
      const AffineExpr& alpha = alphas[ia];
      if (!finite) {
        out_.push_back({pa, value, Move{action_, alpha, AffineExpr::constant(L_.n, ExtRational::pos_inf()), true}});
        continue;
      }
      Polyhedron qb = substitute(q, L_.s(), embed(alpha, L_));
      qb.add_all(embed(pa, L_));
      qb = fm_eliminate(qb, {L_.cur()});
      auto betas = lower_of(qb, L_.nxt());
      if (betas.empty()) throw std::logic_error("no lower bound on the interval end");
      for (auto& [pb, ib] : split_by_extreme(pa, betas, false))
        out_.push_back({pb, value, Move{action_, alpha, betas[ib], true}});
    }
  }

  const DelayLine& line_;
  Layout L_;
  std::string action_;
  bool with_moves_;
  std::vector<bool> no_reset_;
  std::vector<int> touch_;
  std::vector<Cell> out_;
};

}  // namespace

std::vector<Cell> best_interval_cells(const DelayLine& line, const std::string& action, bool with_moves) {
  return Walker(line, action, with_moves).run_best_interval();
}

std::vector<Cell> pair_interval_cells(const DelayLine& line, std::size_t i, std::size_t j,
                                      const std::string& action, bool with_moves) {
  return Walker(line, action, with_moves).run_pair(i, j);
}

}  // namespace perm
