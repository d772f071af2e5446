#include "perm/polyhedra.hpp"

#include <algorithm>

namespace perm {

namespace {

bool is_neg_inf(const AffineExpr& e) { return e.constant_term().is_neg_inf(); }

std::vector<Cell> live_cells(const PiecewiseAffineFn& f) {
  std::vector<Cell> out;
  for (const auto& c : f.cells)
    if (!is_neg_inf(c.value)) out.push_back(c);
  return out;
}

bool same_move(const std::optional<Move>& a, const std::optional<Move>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->action == b->action && a->alpha == b->alpha && a->beta == b->beta && a->attainable == b->attainable;
}

struct Split {
  std::optional<Polyhedron> ge;  // f >= g
  std::optional<Polyhedron> lt;  // f < g (closed)
};

Split split_ge(const Polyhedron& x, const AffineExpr& f, const AffineExpr& g) {
  if (f == g) return {x, std::nullopt};
  if (!f.is_finite() || !g.is_finite()) {
    if (f.constant_term().is_pos_inf() || g.constant_term().is_neg_inf()) return {x, std::nullopt};
    return {std::nullopt, x};
  }
  AffineExpr d = g - f;  // f >= g  <=>  d <= 0
  if (d.is_constant()) {
    if (sgn(d.constant_term().value()) <= 0) return {x, std::nullopt};
    return {std::nullopt, x};
  }
  Polyhedron g_above = x;
  g_above.add_lt(-d);
  if (is_empty(g_above)) return {x, std::nullopt};
  Polyhedron f_above = x;
  f_above.add_lt(d);
  if (is_empty(f_above)) return {std::nullopt, x};
  Polyhedron a = x, b = x;
  a.add_le(d);
  b.add_le(-d);
  return {a, b};
}

std::vector<Polyhedron> subtract_all(const std::vector<Polyhedron>& ps, const Polyhedron& q) {
  std::vector<Polyhedron> out;
  for (const auto& p : ps) {
    if (is_empty(intersect(p, q))) {
      out.push_back(p);
      continue;
    }
    for (auto& r : subtract(p, q)) out.push_back(std::move(r));
  }
  return out;
}

// Max (or min) of two boundary-overlapping lists of cells; where only one
// list has a cell, that cell is kept.
std::vector<Cell> combine2(const std::vector<Cell>& a, const std::vector<Cell>& b, bool take_max) {
  std::vector<Cell> out;
  std::vector<std::vector<Polyhedron>> rem_b;
  for (const auto& cb : b) rem_b.push_back({cb.poly});
  for (const auto& ca : a) {
    std::vector<Polyhedron> rem_a{ca.poly};
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Cell& cb = b[j];
      Polyhedron x = intersect(ca.poly, cb.poly);
      if (is_empty(x)) continue;
      Split sp = split_ge(x, ca.value, cb.value);
      const Cell& hi = take_max ? ca : cb;
      const Cell& lo = take_max ? cb : ca;
      if (sp.ge) out.push_back({*sp.ge, hi.value, hi.move});
      if (sp.lt) out.push_back({*sp.lt, lo.value, lo.move});
      rem_a = subtract_all(rem_a, cb.poly);
      rem_b[j] = subtract_all(rem_b[j], ca.poly);
    }
    for (auto& r : rem_a) out.push_back({r, ca.value, ca.move});
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    for (auto& r : rem_b[j]) out.push_back({r, b[j].value, b[j].move});
  return out;
}

std::vector<Cell> max2(const std::vector<Cell>& a, const std::vector<Cell>& b) { return combine2(a, b, true); }

std::vector<Cell> min2(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::vector<Cell> out;
  for (const auto& ca : a) {
    for (const auto& cb : b) {
      Polyhedron x = intersect(ca.poly, cb.poly);
      if (is_empty(x)) continue;
      Split sp = split_ge(x, ca.value, cb.value);
      if (sp.ge) out.push_back({*sp.ge, cb.value, cb.move});
      if (sp.lt) out.push_back({*sp.lt, ca.value, ca.move});
    }
  }
  return out;
}

bool value_le_on(const Polyhedron& p, const AffineExpr& f, const AffineExpr& g) {
  if (f == g) return true;
  if (!f.is_finite() || !g.is_finite()) return f.constant_term().is_neg_inf() || g.constant_term().is_pos_inf();
  Polyhedron q = p;
  q.add_lt(g - f);  // f > g somewhere?
  return is_empty(q);
}

bool dominated(const Cell& c, const Cell& d) {
  return contained_in(c.poly, d.poly) && value_le_on(c.poly, c.value, d.value);
}

std::vector<Cell> prune_dominated(std::vector<Cell> cells) {
  std::vector<bool> dead(cells.size(), false);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < cells.size() && !dead[i]; ++j) {
      if (i == j || dead[j]) continue;
      if (dominated(cells[i], cells[j])) dead[i] = true;
    }
  }
  std::vector<Cell> out;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!dead[i]) out.push_back(std::move(cells[i]));
  return out;
}

// Exact difference of p minus q, as pieces that keep strict constraints.
std::vector<Polyhedron> subtract_open(const Polyhedron& p, const Polyhedron& q) {
  if (is_empty(intersect(p, q))) return {p};
  std::vector<Polyhedron> out;
  Polyhedron acc = p;
  for (const auto& c : q.constraints()) {
    Polyhedron piece = acc;
    piece.add({-c.expr, !c.strict});
    if (!is_empty(piece)) out.push_back(simplify(piece));
    acc.add(c);
    if (is_empty(acc)) break;
  }
  return out;
}

// e evaluated at v + d, with d the variable `var` of an N-variable space.
AffineExpr along_delay(const AffineExpr& e, std::size_t N, std::size_t var) {
  AffineExpr r(N, e.constant_term());
  Rational slope = 0;
  for (std::size_t k = 0; k < e.nvars(); ++k) {
    r.set_coeff(k, e.coeff(k));
    slope += e.coeff(k);
  }
  r.set_coeff(var, slope);
  return r;
}

Constraint negated(const Constraint& c) { return {-c.expr, !c.strict}; }

std::optional<Polyhedron> convex_union(const Polyhedron& a, const Polyhedron& b) {
  Polyhedron h(a.nvars(), a.nclocks());
  for (const auto& c : a.constraints())
    if (implies(b, c)) h.add(c);
  for (const auto& c : b.constraints())
    if (implies(a, c)) h.add(c);
  for (const auto& ca : a.constraints()) {
    Polyhedron ha = h;
    ha.add(negated(ca));
    if (is_empty(ha)) continue;
    for (const auto& cb : b.constraints()) {
      Polyhedron hb = ha;
      hb.add(negated(cb));
      if (!is_empty(hb)) return std::nullopt;
    }
    if (b.constraints().empty()) continue;
  }
  return h;
}

std::vector<Cell> merge_cells(std::vector<Cell> cells) {
  if (cells.size() > 400) return cells;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < cells.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < cells.size() && !changed; ++j) {
        if (!(cells[i].value == cells[j].value) || !same_move(cells[i].move, cells[j].move)) continue;
        auto u = convex_union(cells[i].poly, cells[j].poly);
        if (!u) continue;
        cells[i].poly = simplify(*u);
        cells.erase(cells.begin() + static_cast<long>(j));
        changed = true;
      }
    }
  }
  return cells;
}

PiecewiseAffineFn finish(std::size_t n, std::vector<Cell> cells) {
  for (auto& c : cells) c.poly = simplify(c.poly);
  cells = prune_dominated(std::move(cells));
  cells = merge_cells(std::move(cells));
  PiecewiseAffineFn f;
  f.nclocks = n;
  f.cells = std::move(cells);
  f.cells.push_back({Polyhedron(n, n), AffineExpr::constant(n, ExtRational::neg_inf()), std::nullopt});
  return f;
}

}  // namespace

PiecewiseAffineFn PiecewiseAffineFn::constant(std::size_t n, const ExtRational& c) {
  PiecewiseAffineFn f;
  f.nclocks = n;
  f.cells.push_back({Polyhedron(n, n), AffineExpr::constant(n, c), std::nullopt});
  return f;
}

std::size_t paf_lookup(const PiecewiseAffineFn& f, const Valuation& v) {
  std::size_t best = f.cells.size();
  ExtRational best_val;
  for (std::size_t i = 0; i < f.cells.size(); ++i) {
    if (!f.cells[i].poly.contains(v)) continue;
    ExtRational x = f.cells[i].value.eval(v);
    if (best == f.cells.size() || best_val < x) {
      best = i;
      best_val = x;
    }
  }
  if (best == f.cells.size()) throw NoCell("no cell contains the valuation");
  return best;
}

ExtRational paf_eval(const PiecewiseAffineFn& f, const Valuation& v) {
  return f.cells[paf_lookup(f, v)].value.eval(v);
}

std::vector<Cell> refine(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::vector<Cell> out;
  for (const auto& ca : a)
    for (const auto& cb : b) {
      Polyhedron x = intersect(ca.poly, cb.poly);
      if (!is_empty(x)) out.push_back({x, ca.value, ca.move});
    }
  return out;
}

PiecewiseAffineFn paf_pointwise_max(const std::vector<PiecewiseAffineFn>& fs) {
  if (fs.empty()) throw std::invalid_argument("max of no functions");
  std::size_t n = fs.front().nclocks;
  std::vector<Cell> acc;
  for (const auto& f : fs) {
    auto cells = live_cells(f);
    if (cells.empty()) continue;
    acc = acc.empty() ? cells : prune_dominated(max2(acc, cells));
  }
  return finish(n, std::move(acc));
}

PiecewiseAffineFn paf_pointwise_min(const std::vector<PiecewiseAffineFn>& fs) {
  if (fs.empty()) throw std::invalid_argument("min of no functions");
  std::size_t n = fs.front().nclocks;
  std::vector<Cell> acc = live_cells(fs.front());
  for (std::size_t i = 1; i < fs.size() && !acc.empty(); ++i) acc = prune_dominated(min2(acc, live_cells(fs[i])));
  return finish(n, std::move(acc));
}

PiecewiseAffineFn paf_from_max_cells(std::size_t n, const std::vector<Cell>& cells) {
  // Values first, moves re-attached afterwards: cells that differ only in
  // their move merge back into one polyhedron, which keeps the max small.
  std::vector<Cell> plain;
  bool any_move = false;
  for (const auto& c : cells) {
    if (is_neg_inf(c.value)) continue;
    any_move = any_move || c.move.has_value();
    plain.push_back({simplify(c.poly), c.value, std::nullopt});
  }
  plain = merge_cells(prune_dominated(std::move(plain)));
  std::sort(plain.begin(), plain.end(), [](const Cell& a, const Cell& b) {
    return a.poly.constraints().size() < b.poly.constraints().size();
  });
  std::vector<Cell> acc;
  std::size_t merged_at = 0;
  for (const auto& c : plain) {
    bool skip = false;
    for (const auto& r : acc)
      if (dominated(c, r)) {
        skip = true;
        break;
      }
    if (skip) continue;
    acc = prune_dominated(max2(acc, {c}));
    if (acc.size() > 2 * merged_at + 8) {
      for (auto& a : acc) a.poly = simplify(a.poly);
      acc = merge_cells(std::move(acc));
      merged_at = acc.size();
    }
  }
  PiecewiseAffineFn f = finish(n, std::move(acc));
  if (!any_move) return f;
  std::vector<Cell> out;
  for (const auto& r : f.cells) {
    if (is_neg_inf(r.value)) continue;
    bool found = false;
    for (const auto& c : cells) {
      if (!c.move || !(c.value == r.value)) continue;
      Polyhedron x = intersect(r.poly, c.poly);
      if (is_empty(x)) continue;
      found = true;
      out.push_back({simplify(x), r.value, c.move});
    }
    if (!found) out.push_back(r);
  }
  out = merge_cells(prune_dominated(std::move(out)));
  out.push_back(f.cells.back());
  f.cells = std::move(out);
  return f;
}

PiecewiseAffineFn strip_moves(const PiecewiseAffineFn& f) {
  std::vector<Cell> plain;
  for (const auto& c : f.cells)
    if (!is_neg_inf(c.value)) plain.push_back({c.poly, c.value, std::nullopt});
  return finish(f.nclocks, std::move(plain));
}

PiecewiseAffineFn minimize_along_delay(const PiecewiseAffineFn& f, const Polyhedron& inv) {
  std::size_t n = f.nclocks, N = n + 1, dv = n;
  std::vector<Cell> cells = live_cells(f);

  // The -inf region is the complement of the finite cells, kept open so that
  // boundary points stay with the finite cells.
  std::vector<Polyhedron> holes{Polyhedron(n, n)};
  for (const auto& c : cells) {
    std::vector<Polyhedron> next;
    for (const auto& h : holes)
      for (auto& r : subtract_open(h, c.poly)) next.push_back(std::move(r));
    holes = std::move(next);
  }
  for (auto& h : holes) cells.push_back({h, AffineExpr::constant(n, ExtRational::neg_inf()), std::nullopt});

  // Per cell: the infimum along the part of the delay line inside it.
  std::vector<Cell> cands;
  for (const auto& c : cells) {
    Polyhedron sys(N, n);
    AffineExpr d = AffineExpr::variable(N, dv);
    sys.add_le(-d);
    for (const auto& k : inv.constraints()) sys.add({along_delay(k.expr, N, dv), k.strict});
    for (const auto& k : c.poly.constraints()) sys.add({along_delay(k.expr, N, dv), k.strict});
    Polyhedron dom = truncate(fm_eliminate(sys, {dv}), n);
    if (is_empty(dom)) continue;
    if (!c.value.is_finite()) {
      cands.push_back({simplify(dom), c.value, std::nullopt});
      continue;
    }
    Rational slope = 0;
    for (std::size_t k = 0; k < n; ++k) slope += c.value.coeff(k);
    VarBounds b = bounds_on(closure(sys), dv);
    if (sgn(slope) < 0 && b.upper.empty()) {
      cands.push_back({simplify(dom), AffineExpr::constant(n, ExtRational::neg_inf()), std::nullopt});
      continue;
    }
    if (sgn(slope) == 0) {
      cands.push_back({simplify(dom), c.value, std::nullopt});
      continue;
    }
    std::vector<AffineExpr> ends;
    for (const auto& e : sgn(slope) > 0 ? b.lower : b.upper) ends.push_back(resize(e, n));
    for (auto& [piece, k] : split_by_extreme(dom, ends, sgn(slope) < 0))
      cands.push_back({simplify(piece), c.value + ends[k] * slope, std::nullopt});
  }

  // Finite candidates are combined by partial minimum; regions reaching -inf
  // are then removed exactly so that their boundary faces stay finite.
  std::vector<Cell> acc;
  std::vector<Polyhedron> sinks;
  for (const auto& c : cands) {
    if (is_neg_inf(c.value)) {
      sinks.push_back(c.poly);
      continue;
    }
    acc = combine2(acc, {c}, false);
    for (auto& a : acc) a.poly = simplify(a.poly);
    acc = merge_cells(prune_dominated(std::move(acc)));
  }
  for (const auto& h : sinks) {
    std::vector<Cell> next;
    for (const auto& c : acc)
      for (auto& r : subtract_open(c.poly, h)) next.push_back({std::move(r), c.value, c.move});
    acc = std::move(next);
  }
  std::vector<Cell> finite;
  for (auto& c : acc)
    if (!is_neg_inf(c.value)) finite.push_back(std::move(c));
  return finish(n, merge_cells(std::move(finite)));
}

std::size_t finite_cell_count(const PiecewiseAffineFn& f) {
  std::size_t k = 0;
  for (const auto& c : f.cells)
    if (!is_neg_inf(c.value)) ++k;
  return k;
}

}  // namespace perm
