#pragma once

#include "perm/polyhedra.hpp"

#include <string>
#include <vector>

namespace perm {

// Walks the cells of a successor function along the delay line
// d -> (v+d)[reset->0] and projects the resulting systems back onto v.
struct DelayLine {
  std::size_t nclocks = 0;
  std::vector<bool> reset;           // applied before looking up the successor
  Polyhedron window;                 // over clocks; v+d must satisfy it
  std::vector<Cell> cells;           // successor cells (no -inf values)
};

// v -> sup over [a,b] within the window of min(b-a, inf_{d in [a,b]} F((v+d)[z->0])).
// Cells overlap arbitrarily; the function is their pointwise max (-inf outside).
std::vector<Cell> best_interval_cells(const DelayLine& line, const std::string& action, bool with_moves);

// Two-endpoint form for one ordered pair of successor cells: alpha in cell i,
// beta in cell j, the value between them is not inspected.
std::vector<Cell> pair_interval_cells(const DelayLine& line, std::size_t i, std::size_t j,
                                      const std::string& action, bool with_moves);

}  // namespace perm
