#include "perm/engine.hpp"

#include "perm/optimizer.hpp"
#include "perm/segment.hpp"

#include <algorithm>
#include <map>

namespace perm {

namespace {

std::vector<Cell> live_cells(const PiecewiseAffineFn& f) {
  std::vector<Cell> out;
  for (const auto& c : f.cells)
    if (!c.value.constant_term().is_neg_inf()) out.push_back(c);
  return out;
}

std::vector<bool> reset_mask(const TimedAutomatonSpec& spec, const Transition& tr) {
  std::vector<bool> m(spec.nclocks(), false);
  for (std::size_t c : tr.reset) m[c] = true;
  return m;
}

DelayLine delay_line(const TimedAutomatonSpec& spec, std::size_t t, const PiecewiseAffineFn& dst) {
  DelayLine line;
  line.nclocks = spec.nclocks();
  line.reset = reset_mask(spec, spec.transitions[t]);
  line.window = transition_window_polyhedron(spec, t);
  line.cells = live_cells(strip_moves(dst));
  return line;
}

// e evaluated at (v + var)[reset->0], over n clocks plus extra variables.
AffineExpr shifted(const AffineExpr& e, std::size_t nvars, std::size_t var, const std::vector<bool>& reset) {
  AffineExpr r(nvars, e.constant_term());
  Rational slope = 0;
  for (std::size_t c = 0; c < reset.size(); ++c) {
    if (reset[c] || sgn(e.coeff(c)) == 0) continue;
    r.set_coeff(c, e.coeff(c));
    slope += e.coeff(c);
  }
  r.set_coeff(var, slope);
  return r;
}

// Delays `var` that put (v+var)[reset->0] in the cell and v+var in the window.
Polyhedron endpoint_system(const DelayLine& line, const Polyhedron& cell, std::size_t nvars, std::size_t var) {
  Polyhedron p(nvars, line.nclocks);
  std::vector<bool> none(line.nclocks, false);
  p.add_le(-AffineExpr::variable(nvars, var));
  for (const auto& c : line.window.constraints()) p.add({shifted(c.expr, nvars, var, none), c.strict});
  for (const auto& c : cell.constraints()) p.add({shifted(c.expr, nvars, var, line.reset), c.strict});
  return p;
}

std::vector<AffineExpr> to_clocks(const std::vector<AffineExpr>& es, std::size_t n) {
  std::vector<AffineExpr> out;
  for (const auto& e : es) out.push_back(resize(e, n));
  return out;
}

// Splits dom so that each of the four bound lists has a single active member.
struct BoxPiece {
  Polyhedron dom;
  AffineExpr ma, Ma, mb, Mb;
};

std::vector<BoxPiece> split_bounds(const Polyhedron& dom, const std::vector<AffineExpr>& lo_a,
                                   const std::vector<AffineExpr>& hi_a, const std::vector<AffineExpr>& lo_b,
                                   const std::vector<AffineExpr>& hi_b) {
  std::vector<BoxPiece> out;
  for (auto& [p1, k1] : split_by_extreme(dom, lo_a, false))
    for (auto& [p2, k2] : split_by_extreme(p1, hi_a, true))
      for (auto& [p3, k3] : split_by_extreme(p2, lo_b, false))
        for (auto& [p4, k4] : split_by_extreme(p3, hi_b, true)) out.push_back({p4, lo_a[k1], hi_a[k2], lo_b[k3], hi_b[k4]});
  return out;
}

}  // namespace

std::vector<PiecewiseAffineFn> perm_init(const TimedAutomatonSpec& spec) {
  std::vector<PiecewiseAffineFn> fs;
  for (std::size_t l = 0; l < spec.locations.size(); ++l)
    fs.push_back(PiecewiseAffineFn::constant(
        spec.nclocks(), l == spec.target ? ExtRational::pos_inf() : ExtRational::neg_inf()));
  return fs;
}

PiecewiseAffineFn perm_step_linear(const TimedAutomatonSpec& spec, std::size_t t, const PiecewiseAffineFn& dst) {
  const Transition& tr = spec.transitions[t];
  std::size_t n = spec.nclocks();
  DelayLine line = delay_line(spec, t, dst);
  std::size_t N = n + 2, ia = n, ib = n + 1;

  struct Side {
    Polyhedron sys;  // over N variables
    Rational slope;
    AffineExpr offset;  // over clocks, may be +inf
  };
  std::vector<Side> sides;
  for (const auto& cell : line.cells) {
    Side s{endpoint_system(line, cell.poly, N, ia), 0, AffineExpr::constant(n, ExtRational::pos_inf())};
    if (cell.value.is_finite()) {
      auto form = delay_reset_compose(cell.value, line.reset);
      s.slope = form.slope;
      s.offset = form.offset;
    }
    sides.push_back(std::move(s));
  }
  std::vector<int> alive(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) alive[i] = !is_empty(sides[i].sys);

  std::vector<std::size_t> swap_ab(N);
  for (std::size_t k = 0; k < N; ++k) swap_ab[k] = k;
  swap_ab[ia] = ib;
  swap_ab[ib] = ia;

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (!alive[i]) continue;
    for (std::size_t j = 0; j < sides.size(); ++j) {
      if (!alive[j]) continue;
      Polyhedron sb = remap(sides[j].sys, N, n, swap_ab);
      Polyhedron s = intersect(sides[i].sys, sb);
      s.add_le(AffineExpr::variable(N, ia), AffineExpr::variable(N, ib));
      Polyhedron ctx = truncate(closure(fm_eliminate(s, {ia, ib})), n);
      if (is_empty(ctx)) continue;
      VarBounds ba = bounds_on(sides[i].sys, ia);
      VarBounds bb = bounds_on(sb, ib);
      if (bb.upper.empty()) {
        for (auto& c : pair_interval_cells(line, i, j, tr.action, true)) cells.push_back(std::move(c));
        continue;
      }
      auto lo_a = to_clocks(ba.lower, n), hi_a = to_clocks(ba.upper, n);
      auto lo_b = to_clocks(bb.lower, n), hi_b = to_clocks(bb.upper, n);
      for (const auto& e : hi_b) hi_a.push_back(e);
      for (auto& piece : split_bounds(simplify(ctx), lo_a, hi_a, lo_b, hi_b)) {
        BoxProblem bp{sides[i].slope, sides[i].offset, sides[j].slope, sides[j].offset,
                      piece.ma, piece.Ma, piece.mb, piece.Mb};
        for (auto& cs : solve_box_symbolic(bp, piece.dom).cases)
          cells.push_back({cs.condition, cs.value, Move{tr.action, cs.alpha, cs.beta, cs.attainable}});
      }
    }
  }
  return paf_from_max_cells(n, cells);
}

PiecewiseAffineFn perm_step_transition(const TimedAutomatonSpec& spec, std::size_t t, const PiecewiseAffineFn& dst) {
  return paf_from_max_cells(spec.nclocks(),
                            best_interval_cells(delay_line(spec, t, dst), spec.transitions[t].action, true));
}

PiecewiseAffineFn perm_step_branching(const TimedAutomatonSpec& spec, std::size_t loc,
                                      const std::vector<PiecewiseAffineFn>& succ) {
  std::vector<Cell> cells;
  for (std::size_t t : spec.outgoing(loc)) {
    const Transition& tr = spec.transitions[t];
    for (auto& c : best_interval_cells(delay_line(spec, t, succ[tr.dst]), tr.action, true)) cells.push_back(std::move(c));
  }
  return paf_from_max_cells(spec.nclocks(), cells);
}

PiecewiseAffineFn perm_step_opponent(const TimedAutomatonSpec& spec, std::size_t loc,
                                     const std::vector<PiecewiseAffineFn>& succ,
                                     std::vector<PiecewiseAffineFn>* per_transition) {
  std::size_t n = spec.nclocks();
  std::vector<PiecewiseAffineFn> fs;
  for (std::size_t t : spec.outgoing(loc)) fs.push_back(perm_step_transition(spec, t, succ[spec.transitions[t].dst]));
  if (per_transition) *per_transition = fs;
  if (fs.empty()) return PiecewiseAffineFn::constant(n, ExtRational::neg_inf());
  PiecewiseAffineFn m = fs.size() == 1 ? fs.front() : paf_pointwise_min(fs);
  return minimize_along_delay(m, guard_polyhedron(spec.locations[loc].invariant, n));
}

PermSolution compute_permissiveness(const TimedAutomatonSpec& spec, const EngineOptions& opts) {
  std::size_t m = spec.locations.size();
  std::size_t n = spec.nclocks();
  auto order = topological_order(spec);
  std::vector<std::optional<std::size_t>> lp(m);
  for (std::size_t u : order) {
    if (u == spec.target) {
      lp[u] = 0;
      continue;
    }
    for (std::size_t t : spec.outgoing(u)) {
      const auto& d = lp[spec.transitions[t].dst];
      if (d && (!lp[u] || *d + 1 > *lp[u])) lp[u] = *d + 1;
    }
  }
  bool linear = opts.closed_form_linear && classify(spec) == ModelClass::Linear;

  struct Entry {
    PiecewiseAffineFn fn;
    std::vector<PiecewiseAffineFn> per_transition;
  };
  std::map<std::pair<std::size_t, std::size_t>, Entry> memo;
  const auto neg = PiecewiseAffineFn::constant(n, ExtRational::neg_inf());
  const auto pos = PiecewiseAffineFn::constant(n, ExtRational::pos_inf());

  // P_i(loc); i is clipped to the longest path since P is stationary beyond it.
  auto value = [&](auto& self, std::size_t loc, std::size_t i) -> const Entry& {
    if (loc != spec.target && lp[loc]) i = std::min(i, *lp[loc]);
    auto key = std::make_pair(loc, loc == spec.target || !lp[loc] ? 0 : i);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Entry e;
    if (loc == spec.target) e.fn = pos;
    else if (!lp[loc] || i == 0) e.fn = neg;
    else {
      std::vector<PiecewiseAffineFn> succ(m, neg);
      for (std::size_t t : spec.outgoing(loc)) {
        std::size_t d = spec.transitions[t].dst;
        succ[d] = self(self, d, i - 1).fn;
      }
      try {
        if (spec.locations[loc].owner == Owner::Opponent) e.fn = perm_step_opponent(spec, loc, succ, &e.per_transition);
        else if (linear && spec.outgoing(loc).size() == 1) {
          std::size_t t = spec.outgoing(loc).front();
          e.fn = perm_step_linear(spec, t, succ[spec.transitions[t].dst]);
        } else e.fn = perm_step_branching(spec, loc, succ);
      } catch (const std::exception& ex) {
        throw SolverError(spec.locations[loc].id, i, ex.what());
      }
    }
    return memo.emplace(key, std::move(e)).first->second;
  };

  std::size_t horizon = 0;
  for (const auto& l : lp)
    if (l) horizon = std::max(horizon, *l);
  std::size_t k = opts.max_iter ? std::min(*opts.max_iter, horizon) : horizon;

  PermSolution sol;
  sol.iterations = k;
  for (std::size_t l = 0; l < m; ++l) {
    const Entry& e = value(value, l, opts.max_iter ? *opts.max_iter : horizon);
    sol.fns.push_back(e.fn);
    sol.transition_fns.push_back(e.per_transition);
  }
  return sol;
}

}  // namespace perm
