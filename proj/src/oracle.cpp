#include "perm/oracle.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

namespace perm {

namespace {

using Scaled = std::int64_t;
constexpr Scaled POS = std::numeric_limits<Scaled>::max();
constexpr Scaled NEG = std::numeric_limits<Scaled>::min();

struct Window {
  bool empty = false;
  Scaled lo = 0, hi = POS;
  bool lo_strict = false, hi_strict = false;

  void upper(Scaled b, bool strict) {
    if (b < hi || (b == hi && strict)) {
      hi = b;
      hi_strict = strict;
    }
  }
  void lower(Scaled b, bool strict) {
    if (b > lo || (b == lo && strict)) {
      lo = b;
      lo_strict = strict;
    }
  }
  // x + d rel bound
  void restrict(Scaled x, Rel rel, Scaled bound) {
    switch (rel) {
      case Rel::LE: upper(bound - x, false); break;
      case Rel::LT: upper(bound - x, true); break;
      case Rel::GE: lower(bound - x, false); break;
      case Rel::GT: lower(bound - x, true); break;
      case Rel::EQ:
        upper(bound - x, false);
        lower(bound - x, false);
        break;
    }
  }
  bool is_empty() const {
    if (empty) return true;
    if (hi == POS) return false;
    return lo > hi || (lo == hi && (lo_strict || hi_strict));
  }
};

bool holds(Rel r, Scaled x, Scaled b) {
  switch (r) {
    case Rel::LE: return x <= b;
    case Rel::LT: return x < b;
    case Rel::GE: return x >= b;
    case Rel::GT: return x > b;
    case Rel::EQ: return x == b;
  }
  return false;
}

struct KeyHash {
  std::size_t operator()(const std::vector<Scaled>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (Scaled x : k) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

mpz_class lcm_of(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Scaled to_scaled(const mpz_class& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("grid too fine for the oracle");
  return z.get_si();
}

}  // namespace

struct GridOracle::Impl {
  TimedAutomatonSpec spec;
  GridParams g;
  mpz_class L = 1;
  Scaled step = 1, cap = 1;
  std::unordered_map<std::vector<Scaled>, Scaled, KeyHash> memo_loc, memo_tr;

  Impl(const TimedAutomatonSpec& s, const GridParams& gp) : spec(s), g(gp) {
    if (sgn(g.delta) <= 0) throw std::invalid_argument("delta must be positive");
    rescale(lcm_of(g.delta.get_den(), sgn(g.valuation_step) > 0 ? g.valuation_step.get_den() : mpz_class(1)));
  }

  void rescale(const mpz_class& unit) {
    L = unit;
    mpq_class st = g.delta * mpq_class(L);
    st.canonicalize();
    if (st.get_den() != 1) throw std::logic_error("grid unit does not divide delta");
    step = to_scaled(st.get_num());
    cap = to_scaled(mpz_class((max_constant(spec) + 1) * L));
    memo_loc.clear();
    memo_tr.clear();
  }

  Scaled clamp(Scaled x) const { return std::min(x, cap); }
  Scaled bound(long n) const { return to_scaled(mpz_class(n * L)); }

  Window transition_window(std::size_t t, const std::vector<Scaled>& w) const {
    const Transition& tr = spec.transitions[t];
    Window win;
    for (const auto& c : spec.locations[tr.src].invariant) win.restrict(w[c.clock], c.rel, bound(c.bound));
    for (const auto& c : tr.guard) win.restrict(w[c.clock], c.rel, bound(c.bound));
    if (tr.dst != spec.target) {
      for (const auto& c : spec.locations[tr.dst].invariant) {
        if (std::binary_search(tr.reset.begin(), tr.reset.end(), c.clock)) {
          if (!holds(c.rel, 0, bound(c.bound))) win.empty = true;
        } else {
          win.restrict(w[c.clock], c.rel, bound(c.bound));
        }
      }
    }
    return win;
  }

  Window invariant_window(std::size_t loc, const std::vector<Scaled>& w) const {
    Window win;
    for (const auto& c : spec.locations[loc].invariant) win.restrict(w[c.clock], c.rel, bound(c.bound));
    return win;
  }

  // Candidate delays; when the window is unbounded the last one stands for
  // every larger delay (all clocks are then above the maximal constant).
  std::vector<Scaled> candidates(const Window& win, bool& tail) const {
    std::vector<Scaled> out;
    tail = false;
    if (win.is_empty()) return out;
    Scaled hi = win.hi;
    if (hi == POS) {
      Scaled d = std::max(win.lo, cap);
      d = (d + step - 1) / step * step;
      if (d == win.lo && win.lo_strict) d += step;
      hi = d;
      tail = true;
    }
    auto inside = [&](Scaled d) {
      if (d < win.lo || (d == win.lo && win.lo_strict)) return false;
      if (win.hi != POS && (d > win.hi || (d == win.hi && win.hi_strict))) return false;
      return d <= hi;
    };
    if (inside(win.lo)) out.push_back(win.lo);
    for (Scaled d = (win.lo + step - 1) / step * step; d <= hi; d += step)
      if (inside(d)) out.push_back(d);
    if (win.hi != POS && inside(win.hi)) out.push_back(win.hi);
    if (tail) out.push_back(hi);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Scaled> delayed(const std::vector<Scaled>& w, Scaled d) const {
    std::vector<Scaled> r(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) r[k] = clamp(w[k] + d);
    return r;
  }

  Scaled best(std::size_t t, const std::vector<Scaled>& w, std::size_t depth) {
    std::vector<Scaled> key = w;
    key.push_back(static_cast<Scaled>(t));
    if (auto it = memo_tr.find(key); it != memo_tr.end()) return it->second;
    const Transition& tr = spec.transitions[t];
    bool tail = false;
    auto cands = candidates(transition_window(t, w), tail);
    std::vector<Scaled> s(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      auto next = delayed(w, cands[k]);
      for (std::size_t c : tr.reset) next[c] = 0;
      s[k] = value(tr.dst, next, depth + 1);
    }
    Scaled res = NEG;
    for (std::size_t a = 0; a < cands.size(); ++a) {
      Scaled run = POS;
      for (std::size_t b = a; b < cands.size(); ++b) {
        run = std::min(run, s[b]);
        if (run <= res) break;
        Scaled width = (tail && b + 1 == cands.size()) ? POS : cands[b] - cands[a];
        res = std::max(res, std::min(width, run));
      }
    }
    memo_tr.emplace(std::move(key), res);
    return res;
  }

  Scaled value(std::size_t loc, const std::vector<Scaled>& w, std::size_t depth) {
    if (loc == spec.target) return POS;
    if (depth >= g.horizon && !spec.outgoing(loc).empty()) throw HorizonExceeded("oracle horizon exceeded");
    std::vector<Scaled> key = w;
    key.push_back(static_cast<Scaled>(loc));
    if (auto it = memo_loc.find(key); it != memo_loc.end()) return it->second;
    auto outs = spec.outgoing(loc);
    Scaled res = NEG;
    if (spec.locations[loc].owner == Owner::Player) {
      for (std::size_t t : outs) res = std::max(res, best(t, w, depth));
    } else if (!outs.empty()) {
      bool tail = false;
      auto cands = candidates(invariant_window(loc, w), tail);
      res = cands.empty() ? NEG : POS;
      for (Scaled d : cands) {
        auto wd = delayed(w, d);
        for (std::size_t t : outs) res = std::min(res, best(t, wd, depth));
        if (res == NEG) break;
      }
    }
    memo_loc.emplace(std::move(key), res);
    return res;
  }

  ExtRational query(const Config& c) {
    mpz_class need = L;
    for (const auto& x : c.v) need = lcm_of(need, x.get_den());
    if (need != L) rescale(need);
    std::vector<Scaled> w;
    for (const auto& x : c.v) {
      mpq_class s = x * mpq_class(L);
      s.canonicalize();
      w.push_back(clamp(to_scaled(s.get_num())));
    }
    Scaled r = value(c.loc, w, 0);
    if (r == POS) return ExtRational::pos_inf();
    if (r == NEG) return ExtRational::neg_inf();
    Rational q(mpz_class(r), L);
    q.canonicalize();
    return q;
  }
};

GridOracle::GridOracle(const TimedAutomatonSpec& spec, const GridParams& g) : impl_(std::make_unique<Impl>(spec, g)) {}
GridOracle::~GridOracle() = default;
ExtRational GridOracle::value(const Config& c) { return impl_->query(c); }

ExtRational oracle_perm(const TimedAutomatonSpec& spec, const Config& c, const GridParams& g) {
  GridOracle o(spec, g);
  return o.value(c);
}

namespace {

Valuation shifted(const Valuation& v, const Rational& d) {
  Valuation r = v;
  for (auto& x : r) x += d;
  return r;
}

Valuation after_reset(Valuation v, const std::vector<std::size_t>& reset) {
  for (std::size_t c : reset) v[c] = 0;
  return v;
}

// Grid points of [lo, hi] plus both ends.
std::vector<Rational> grid_points(const Rational& lo, const Rational& hi, const Rational& delta) {
  std::vector<Rational> out{lo};
  mpq_class k = lo / delta;
  mpz_class j = k.get_num() / k.get_den();
  if (Rational(j) * delta < lo) ++j;
  for (Rational d = Rational(j) * delta; d <= hi; d += delta)
    if (d > lo && d < hi) out.push_back(d);
  if (hi != lo) out.push_back(hi);
  return out;
}

Rational finite_end(const Rational& lo, const ExtRational& hi, long m) {
  if (hi.is_finite()) return hi.value();
  return std::max(lo, Rational(m + 1));
}

}  // namespace

ReplayResult adversary_replay(const TimedAutomatonSpec& spec, const PermSolution& sol, const Config& c0,
                              Adversary adversary, const Rational& delta, const std::optional<IntervalOverride>& first) {
  ReplayResult res;
  Config c = c0;
  long m = max_constant(spec);
  bool overridden = false;
  auto pick = [&](const Rational& lo, const Rational& hi, auto&& score) {
    switch (adversary) {
      case Adversary::Earliest: return lo;
      case Adversary::Latest: return hi;
      case Adversary::GridMin: break;
    }
    Rational best = lo;
    ExtRational best_v = score(lo);
    for (const auto& d : grid_points(lo, hi, delta)) {
      ExtRational s = score(d);
      if (s < best_v) {
        best_v = s;
        best = d;
      }
    }
    return best;
  };

  for (std::size_t guard = 0; guard <= spec.transitions.size() + 1; ++guard) {
    if (c.loc == spec.target) {
      res.reached = true;
      return res;
    }
    ReplayStep st;
    st.loc = c.loc;
    const PiecewiseAffineFn* fn = &sol.fns[c.loc];
    std::size_t t = 0;
    if (spec.locations[c.loc].owner == Owner::Opponent) {
      auto outs = spec.outgoing(c.loc);
      const auto& fs = sol.transition_fns[c.loc];
      if (outs.empty() || fs.size() != outs.size()) return res;
      DelayInterval inv = invariant_window(spec, c.loc, c.v);
      if (inv.empty) return res;
      auto m_at = [&](const Rational& d) {
        ExtRational r = ExtRational::pos_inf();
        Valuation w = shifted(c.v, d);
        for (const auto& f : fs) r = min(r, paf_eval(f, w));
        return r;
      };
      Rational lo = inv.lo, hi = finite_end(inv.lo, inv.hi, m);
      st.wait = pick(lo, hi, m_at);
      c.v = shifted(c.v, st.wait);
      std::size_t k_best = 0;
      ExtRational v_best = paf_eval(fs[0], c.v);
      for (std::size_t k = 1; k < fs.size(); ++k) {
        ExtRational x = paf_eval(fs[k], c.v);
        if (x < v_best) {
          v_best = x;
          k_best = k;
        }
      }
      fn = &fs[k_best];
      t = outs[k_best];
    }
    st.v = c.v;
    const Cell& cell = fn->cells[paf_lookup(*fn, c.v)];
    if (cell.value.constant_term().is_neg_inf()) return res;
    if (!cell.move) throw IllegalMove("cell without a move annotation");
    const Move& mv = *cell.move;
    auto tt = find_transition(spec, c.loc, mv.action);
    if (!tt) throw IllegalMove("annotated action '" + mv.action + "' does not exist");
    if (spec.locations[c.loc].owner == Owner::Opponent && *tt != t) throw IllegalMove("move for the wrong transition");
    t = *tt;
    ExtRational a = mv.alpha.eval(c.v), b = mv.beta.eval(c.v);
    if (first && !overridden) {
      a = first->alpha;
      b = first->beta;
      overridden = true;
    }
    if (!a.is_finite()) throw IllegalMove("interval start is not finite");
    DelayInterval win = transition_window(spec, t, c.v);
    if (a > b || !win.contains(a.value()) || (b.is_finite() ? !win.contains(b.value()) : !win.hi.is_pos_inf()))
      throw IllegalMove("proposed interval [" + a.str() + ", " + b.str() + "] is not legal");
    st.action = mv.action;
    st.alpha = a.value();
    st.beta = b;
    res.min_width = min(res.min_width, b - a);
    const Transition& tr = spec.transitions[t];
    auto succ_at = [&](const Rational& d) { return paf_eval(sol.fns[tr.dst], after_reset(shifted(c.v, d), tr.reset)); };
    st.delay = pick(st.alpha, finite_end(st.alpha, b, m), succ_at);
    res.steps.push_back(st);
    c = step(spec, c, st.delay, mv.action);
  }
  throw IllegalMove("replay did not terminate");
}

TimedAutomatonSpec random_model(std::uint64_t seed, std::size_t nclocks, std::size_t nlocations, ModelClass kind) {
  if (nclocks < 1 || nclocks > 3) throw std::invalid_argument("between 1 and 3 clocks");
  if (nlocations < 2) throw std::invalid_argument("at least 2 locations");
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  TimedAutomatonSpec spec;
  static const char* names[] = {"x", "y", "z"};
  for (std::size_t k = 0; k < nclocks; ++k) spec.clocks.push_back(names[k]);
  for (std::size_t l = 0; l < nlocations; ++l) {
    Location loc;
    loc.id = l + 1 == nlocations ? "goal" : "l" + std::to_string(l);
    loc.initial = l == 0;
    loc.target = l + 1 == nlocations;
    spec.locations.push_back(loc);
  }
  spec.initial = 0;
  spec.target = nlocations - 1;

  auto random_guard = [&](bool lower_only) {
    Guard g;
    for (std::size_t k = 0; k < nclocks; ++k) {
      if (!coin(0.55)) continue;
      int lo = uni(0, 2), hi = uni(lo + 1, 4);
      if (lo > 0 && (lower_only || coin(0.6))) g.push_back({k, Rel::GE, lo});
      if (!lower_only && coin(0.75)) g.push_back({k, Rel::LE, hi});
    }
    return g;
  };

  std::size_t target = nlocations - 1;
  std::vector<std::vector<std::size_t>> succ(nlocations);
  for (std::size_t l = 0; l < target; ++l) {
    succ[l].push_back(kind == ModelClass::Linear ? l + 1 : static_cast<std::size_t>(uni(int(l) + 1, int(target))));
    if (kind != ModelClass::Linear && l + 1 < target && (l == 0 || coin(0.5))) {
      std::size_t d = static_cast<std::size_t>(uni(int(l) + 1, int(target)));
      if (d == succ[l][0]) d = d == target ? l + 1 : target;
      succ[l].push_back(d);
    }
  }
  if (kind == ModelClass::Game) {
    bool any = false;
    for (std::size_t l = 0; l < target; ++l)
      if (coin(0.5)) {
        spec.locations[l].owner = Owner::Opponent;
        any = true;
      }
    if (!any) spec.locations[target > 1 ? uni(0, int(target) - 1) : 0].owner = Owner::Opponent;
  }
  // Opponent locations get a bounding invariant and lower-bound-only guards,
  // so that the opponent cannot simply wait until every move is disabled.
  for (std::size_t l = 0; l < target; ++l) {
    bool opp = spec.locations[l].owner == Owner::Opponent;
    if (opp || coin(0.2))
      spec.locations[l].invariant.push_back({static_cast<std::size_t>(uni(0, int(nclocks) - 1)), Rel::LE, uni(2, 4)});
  }
  std::size_t id = 0;
  for (std::size_t l = 0; l < target; ++l) {
    for (std::size_t d : succ[l]) {
      Transition tr;
      tr.src = l;
      tr.dst = d;
      tr.action = "a" + std::to_string(id++);
      tr.guard = random_guard(spec.locations[l].owner == Owner::Opponent);
      for (std::size_t k = 0; k < nclocks; ++k)
        if (coin(0.35)) tr.reset.push_back(k);
      spec.transitions.push_back(tr);
    }
  }
  validate_model(spec);
  return spec;
}

}  // namespace perm
