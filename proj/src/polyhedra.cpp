#include "perm/polyhedra.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace perm {

namespace {

// Dynamic bitset for the Chernikov history of derived rows.
struct Bits {
  std::vector<std::uint64_t> w;
  void set(std::size_t i) {
    if (w.size() <= i / 64) w.resize(i / 64 + 1, 0);
    w[i / 64] |= std::uint64_t(1) << (i % 64);
  }
  Bits operator|(const Bits& o) const {
    Bits r;
    r.w.resize(std::max(w.size(), o.w.size()), 0);
    for (std::size_t i = 0; i < w.size(); ++i) r.w[i] |= w[i];
    for (std::size_t i = 0; i < o.w.size(); ++i) r.w[i] |= o.w[i];
    return r;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w) c += __builtin_popcountll(x);
    return c;
  }
};

// a.x + k (<|<=) 0 with a scaled to a primitive integer vector.
struct Row {
  std::vector<Rational> a;
  Rational k;
  bool strict = false;
  Bits hist;
};

bool zero_coeffs(const Row& r) {
  for (const auto& x : r.a)
    if (sgn(x) != 0) return false;
  return true;
}

void normalize(Row& r) {
  mpz_class l = 1, g = 0;
  for (const auto& x : r.a) {
    if (sgn(x) == 0) continue;
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  }
  for (const auto& x : r.a) {
    if (sgn(x) == 0) continue;
    mpz_class num = x.get_num() * (l / x.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
  }
  if (g == 0) return;
  Rational scale(l, g);
  scale.canonicalize();
  if (scale == 1) return;
  for (auto& x : r.a) x *= scale;
  r.k *= scale;
}

class System {
 public:
  explicit System(std::size_t n) : n_(n) {}

  bool infeasible() const { return infeasible_; }
  std::size_t size() const { return rows_.size(); }

  void add_original(Row r) {
    r.hist.set(next_id_++);
    add(std::move(r));
  }

  void add(Row r) {
    if (infeasible_) return;
    if (zero_coeffs(r)) {
      if (sgn(r.k) > 0 || (sgn(r.k) == 0 && r.strict)) {
        infeasible_ = true;
        rows_.clear();
        index_.clear();
      }
      return;
    }
    normalize(r);
    auto it = index_.find(r.a);
    if (it != index_.end()) {
      Row& old = rows_[it->second];
      int c = cmp(r.k, old.k);
      if (c > 0 || (c == 0 && r.strict && !old.strict)) old = std::move(r);
      return;
    }
    index_.emplace(r.a, rows_.size());
    rows_.push_back(std::move(r));
  }

  void eliminate(std::size_t j) {
    if (infeasible_) return;
    ++eliminated_;
    std::vector<Row> pos, neg, rest;
    for (auto& r : rows_) {
      int s = sgn(r.a[j]);
      if (s > 0) pos.push_back(std::move(r));
      else if (s < 0) neg.push_back(std::move(r));
      else rest.push_back(std::move(r));
    }
    rows_.clear();
    index_.clear();
    for (auto& r : rest) add(std::move(r));
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        Bits h = p.hist | q.hist;
        if (h.count() > eliminated_ + 1) continue;
        Rational mp = -q.a[j];  // > 0
        Rational mq = p.a[j];   // > 0
        Row r;
        r.a.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) r.a[i] = p.a[i] * mp + q.a[i] * mq;
        r.a[j] = 0;
        r.k = p.k * mp + q.k * mq;
        r.strict = p.strict || q.strict;
        r.hist = std::move(h);
        add(std::move(r));
        if (infeasible_) return;
      }
    }
  }

  // Cost estimate for eliminating variable j.
  long cost(std::size_t j) const {
    long p = 0, q = 0;
    for (const auto& r : rows_) {
      int s = sgn(r.a[j]);
      if (s > 0) ++p;
      else if (s < 0) ++q;
    }
    return p * q - p - q;
  }

  bool occurs(std::size_t j) const {
    for (const auto& r : rows_)
      if (sgn(r.a[j]) != 0) return true;
    return false;
  }

  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::size_t n_;
  std::vector<Row> rows_;
  std::map<std::vector<Rational>, std::size_t> index_;
  std::size_t next_id_ = 0;
  std::size_t eliminated_ = 0;
  bool infeasible_ = false;
};

Row to_row(const Constraint& c) {
  if (!c.expr.is_finite()) throw InfiniteAffine("constraint with infinite expression");
  Row r;
  r.a = c.expr.coeffs();
  r.k = c.expr.constant_term().value();
  r.strict = c.strict;
  return r;
}

Row nonneg_row(std::size_t n, std::size_t j) {
  Row r;
  r.a.assign(n, 0);
  r.a[j] = -1;
  r.k = 0;
  return r;
}

System load(const Polyhedron& p) {
  System s(p.nvars());
  for (const auto& c : p.constraints()) s.add_original(to_row(c));
  return s;
}

Polyhedron unload(const System& s, std::size_t nvars, std::size_t nclocks) {
  Polyhedron out(nvars, nclocks);
  if (s.infeasible()) {
    out.add_le(AffineExpr::constant(nvars, 1));
    return out;
  }
  for (const auto& r : s.rows()) {
    AffineExpr e(nvars, r.k);
    for (std::size_t i = 0; i < nvars; ++i) e.set_coeff(i, r.a[i]);
    out.add({e, r.strict});
  }
  return out;
}

void eliminate_all(System& s, std::vector<std::size_t> vars, std::size_t n, std::size_t nclocks) {
  std::vector<bool> nonneg_added(n, false);
  while (!vars.empty() && !s.infeasible()) {
    std::size_t best = 0;
    long best_cost = 0;
    bool have = false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      std::size_t j = vars[i];
      if (!s.occurs(j)) {
        best = i;
        have = true;
        best_cost = -1000000;
        break;
      }
      long c = s.cost(j);
      if (j < nclocks) c += 1;
      if (!have || c < best_cost) {
        best = i;
        best_cost = c;
        have = true;
      }
    }
    std::size_t j = vars[best];
    vars.erase(vars.begin() + static_cast<long>(best));
    if (!s.occurs(j)) continue;
    if (j < nclocks && !nonneg_added[j]) {
      s.add_original(nonneg_row(n, j));
      nonneg_added[j] = true;
    }
    s.eliminate(j);
  }
}

Constraint negate(const Constraint& c) { return {-c.expr, !c.strict}; }

}  // namespace

void Polyhedron::add(const Constraint& c) {
  if (c.expr.nvars() != nvars_) throw std::invalid_argument("constraint dimension mismatch");
  if (!c.expr.is_finite()) throw InfiniteAffine("constraint with infinite expression");
  if (c.expr.is_constant()) {
    const Rational& k = c.expr.constant_term().value();
    if (sgn(k) < 0 || (sgn(k) == 0 && !c.strict)) return;  // trivially true
  }
  for (const auto& old : cons_)
    if (old.strict == c.strict && old.expr == c.expr) return;
  cons_.push_back(c);
}

void Polyhedron::add_all(const Polyhedron& other) {
  for (const auto& c : other.constraints()) add(c);
}

bool Polyhedron::contains(const Valuation& v) const {
  for (std::size_t i = 0; i < nclocks_ && i < v.size(); ++i)
    if (sgn(v[i]) < 0) return false;
  for (const auto& c : cons_) {
    Rational x = c.expr.eval(v).value();
    if (c.strict ? sgn(x) >= 0 : sgn(x) > 0) return false;
  }
  return true;
}

bool Polyhedron::has_strict() const {
  for (const auto& c : cons_)
    if (c.strict) return true;
  return false;
}

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q) {
  if (p.nvars() != q.nvars()) throw std::invalid_argument("dimension mismatch");
  Polyhedron r = p;
  r.add_all(q);
  return r;
}

Polyhedron fm_eliminate(const Polyhedron& p, const std::vector<std::size_t>& vars) {
  System s = load(p);
  eliminate_all(s, vars, p.nvars(), p.nclocks());
  return unload(s, p.nvars(), p.nclocks());
}

bool is_empty(const Polyhedron& p) {
  System s = load(p);
  if (s.infeasible()) return true;
  std::vector<std::size_t> all(p.nvars());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  eliminate_all(s, all, p.nvars(), p.nclocks());
  return s.infeasible();
}

std::vector<Polyhedron> subtract(const Polyhedron& p, const Polyhedron& q) {
  std::vector<Polyhedron> out;
  Polyhedron acc = p;
  for (const auto& c : q.constraints()) {
    Polyhedron strict_out = acc;
    strict_out.add({-c.expr, true});
    if (!is_empty(strict_out)) {
      Polyhedron piece = acc;
      piece.add({-c.expr, false});
      out.push_back(piece);
    }
    acc.add({c.expr, false});
    if (is_empty(acc)) break;
  }
  return out;
}

Polyhedron closure(const Polyhedron& p) {
  Polyhedron r(p.nvars(), p.nclocks());
  for (const auto& c : p.constraints()) r.add({c.expr, false});
  return r;
}

bool implies(const Polyhedron& p, const Constraint& c) {
  Polyhedron q = p;
  q.add(negate(c));
  return is_empty(q);
}

bool contained_in(const Polyhedron& p, const Polyhedron& q) {
  for (const auto& c : q.constraints())
    if (!implies(p, c)) return false;
  return true;
}

Polyhedron simplify(const Polyhedron& p) {
  if (is_empty(p)) {
    Polyhedron r(p.nvars(), p.nclocks());
    r.add_le(AffineExpr::constant(p.nvars(), 1));
    return r;
  }
  std::vector<Constraint> kept = p.constraints();
  // Syntactic tightening first: identical directions keep the tighter bound.
  {
    System s = load(p);
    kept.clear();
    for (const auto& r : s.rows()) {
      AffineExpr e(p.nvars(), r.k);
      for (std::size_t i = 0; i < p.nvars(); ++i) e.set_coeff(i, r.a[i]);
      kept.push_back({e, r.strict});
    }
  }
  for (std::size_t i = 0; i < kept.size();) {
    Polyhedron rest(p.nvars(), p.nclocks());
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (j != i) rest.add(kept[j]);
    if (implies(rest, kept[i])) kept.erase(kept.begin() + static_cast<long>(i));
    else ++i;
  }
  Polyhedron r(p.nvars(), p.nclocks());
  for (const auto& c : kept) r.add(c);
  return r;
}

Polyhedron remap(const Polyhedron& p, std::size_t nvars, std::size_t nclocks,
                 const std::vector<std::size_t>& map) {
  Polyhedron r(nvars, nclocks);
  for (const auto& c : p.constraints()) r.add({c.expr.remap(nvars, map), c.strict});
  return r;
}

Polyhedron truncate(const Polyhedron& p, std::size_t m) {
  Polyhedron r(m, std::min(m, p.nclocks()));
  for (const auto& c : p.constraints()) {
    AffineExpr e(m, c.expr.constant_term());
    for (std::size_t i = 0; i < p.nvars(); ++i) {
      if (i < m) e.set_coeff(i, c.expr.coeff(i));
      else if (sgn(c.expr.coeff(i)) != 0) throw std::logic_error("truncate: variable still occurs");
    }
    r.add({e, c.strict});
  }
  return r;
}

std::string to_string(const Polyhedron& p, const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : p.constraints()) {
    if (!first) os << " & ";
    os << c.expr.str(names) << (c.strict ? " < 0" : " <= 0");
    first = false;
  }
  if (first) os << "true";
  return os.str();
}

Polyhedron resize(const Polyhedron& p, std::size_t nvars) {
  Polyhedron r(nvars, std::min(nvars, p.nclocks()));
  for (const auto& c : p.constraints()) r.add({resize(c.expr, nvars), c.strict});
  return r;
}

Polyhedron substitute(const Polyhedron& p, std::size_t i, const AffineExpr& by) {
  Polyhedron r(p.nvars(), p.nclocks());
  for (const auto& c : p.constraints()) r.add({c.expr.substitute(i, by), c.strict});
  return r;
}

static void push_unique(std::vector<AffineExpr>& es, const AffineExpr& e) {
  for (const auto& x : es)
    if (x == e) return;
  es.push_back(e);
}

VarBounds bounds_on(const Polyhedron& p, std::size_t x) {
  VarBounds b;
  for (const auto& c : p.constraints()) {
    Rational a = c.expr.coeff(x);
    if (sgn(a) == 0) continue;
    AffineExpr rest = c.expr;
    rest.set_coeff(x, 0);
    // a*x + rest <= 0
    if (sgn(a) > 0) push_unique(b.upper, -rest / a);
    else push_unique(b.lower, rest / Rational(-a));
  }
  return b;
}

std::vector<std::pair<Polyhedron, std::size_t>> split_by_extreme(const Polyhedron& dom,
                                                                 const std::vector<AffineExpr>& es, bool smallest) {
  std::vector<std::pair<Polyhedron, std::size_t>> out;
  if (es.size() == 1) {
    out.emplace_back(dom, 0);
    return out;
  }
  for (std::size_t k = 0; k < es.size(); ++k) {
    Polyhedron strict_piece = dom, piece = dom;
    for (std::size_t j = 0; j < es.size(); ++j) {
      if (j == k) continue;
      AffineExpr d = smallest ? es[k] - es[j] : es[j] - es[k];  // want d <= 0
      if (j < k) strict_piece.add_lt(d);
      else strict_piece.add_le(d);
      piece.add_le(d);
    }
    if (!is_empty(strict_piece)) out.emplace_back(piece, k);
  }
  return out;
}

}  // namespace perm
