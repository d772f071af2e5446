#pragma once

#include "perm/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace perm {

// expr <= 0, or expr < 0 when strict.
struct Constraint {
  AffineExpr expr;
  bool strict = false;
};

// Conjunction of constraints. The first `nclocks` variables are clocks and are
// implicitly nonnegative; the remaining ones (delays, auxiliary values) are free.
class Polyhedron {
 public:
  Polyhedron() = default;
  Polyhedron(std::size_t nvars, std::size_t nclocks) : nvars_(nvars), nclocks_(nclocks) {}

  std::size_t nvars() const { return nvars_; }
  std::size_t nclocks() const { return nclocks_; }
  const std::vector<Constraint>& constraints() const { return cons_; }

  void add(const Constraint& c);
  void add_le(const AffineExpr& e) { add({e, false}); }  // e <= 0
  void add_lt(const AffineExpr& e) { add({e, true}); }   // e < 0
  void add_le(const AffineExpr& lhs, const AffineExpr& rhs) { add_le(lhs - rhs); }
  void add_eq(const AffineExpr& lhs, const AffineExpr& rhs) {
    add_le(lhs - rhs);
    add_le(rhs - lhs);
  }
  void add_all(const Polyhedron& other);

  bool contains(const Valuation& v) const;
  bool has_strict() const;

 private:
  std::size_t nvars_ = 0;
  std::size_t nclocks_ = 0;
  std::vector<Constraint> cons_;
};

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q);
// Projection along `vars`; the result keeps the same variable space with those
// variables absent.
Polyhedron fm_eliminate(const Polyhedron& p, const std::vector<std::size_t>& vars);
bool is_empty(const Polyhedron& p);
// p and not(q) ... closed pieces whose union is the closure of p \ q
std::vector<Polyhedron> subtract(const Polyhedron& p, const Polyhedron& q);
Polyhedron closure(const Polyhedron& p);
// Drops constraints implied by the others.
Polyhedron simplify(const Polyhedron& p);
// Reinterpret over `nvars` variables; old variable i becomes map[i].
Polyhedron remap(const Polyhedron& p, std::size_t nvars, std::size_t nclocks,
                 const std::vector<std::size_t>& map);
// Keeps the first m variables; the others must not occur.
Polyhedron truncate(const Polyhedron& p, std::size_t m);
bool implies(const Polyhedron& p, const Constraint& c);
bool contained_in(const Polyhedron& p, const Polyhedron& q);
std::string to_string(const Polyhedron& p, const std::vector<std::string>& names);
// Same constraints over `nvars` variables (extending or truncating).
Polyhedron resize(const Polyhedron& p, std::size_t nvars);
Polyhedron substitute(const Polyhedron& p, std::size_t i, const AffineExpr& by);

// Bounds on variable x read off the constraints that mention it: x >= each of
// `lower`, x <= each of `upper` (closed; expressions in the same space, x absent).
struct VarBounds {
  std::vector<AffineExpr> lower, upper;
};
VarBounds bounds_on(const Polyhedron& p, std::size_t x);

// Splits `dom` into closed pieces according to which expression is the
// smallest (or largest); ties go to the earliest index, pieces without
// interior relative to that rule are dropped.
std::vector<std::pair<Polyhedron, std::size_t>> split_by_extreme(const Polyhedron& dom,
                                                                 const std::vector<AffineExpr>& es, bool smallest);

// ---------------------------------------------------------------------------

struct Move {
  std::string action;
  AffineExpr alpha;
  AffineExpr beta;  // may be +inf
  bool attainable = true;
};

struct Cell {
  Polyhedron poly;
  AffineExpr value;
  std::optional<Move> move;
};

// Cells overlap at most on boundaries; a valuation outside every cell is a
// coverage error. Lookup takes the largest value among the containing cells.
struct PiecewiseAffineFn {
  std::size_t nclocks = 0;
  std::vector<Cell> cells;

  static PiecewiseAffineFn constant(std::size_t nclocks, const ExtRational& c);
};

struct NoCell : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExtRational paf_eval(const PiecewiseAffineFn& f, const Valuation& v);
// Index of the cell realising paf_eval (first among ties).
std::size_t paf_lookup(const PiecewiseAffineFn& f, const Valuation& v);

std::vector<Cell> refine(const std::vector<Cell>& a, const std::vector<Cell>& b);
PiecewiseAffineFn paf_pointwise_max(const std::vector<PiecewiseAffineFn>& fs);
PiecewiseAffineFn paf_pointwise_min(const std::vector<PiecewiseAffineFn>& fs);
// v -> min over d >= 0 with v+d in inv of f(v+d); -inf when no such d.
PiecewiseAffineFn minimize_along_delay(const PiecewiseAffineFn& f, const Polyhedron& inv);

// Builds a function from cells that may overlap arbitrarily (value = max over
// containing cells, -inf elsewhere) into boundary-overlapping form.
PiecewiseAffineFn paf_from_max_cells(std::size_t nclocks, const std::vector<Cell>& cells);
// Same values without move annotations, with equal-valued cells merged.
PiecewiseAffineFn strip_moves(const PiecewiseAffineFn& f);
// Number of cells with a value other than -inf.
std::size_t finite_cell_count(const PiecewiseAffineFn& f);

}  // namespace perm
