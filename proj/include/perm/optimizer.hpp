#pragma once

#include "perm/polyhedra.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace perm {

// Maximise min{beta - alpha, a*alpha + b, c*beta + d} over
// D = {m_alpha <= alpha <= M_alpha, m_beta <= beta <= M_beta, alpha <= beta}.
// The slopes a and c are numbers; everything else is affine in the clocks.
// b or d may be +inf (the term never binds); the bounds must be finite.
struct BoxProblem {
  Rational a;
  AffineExpr b;
  Rational c;
  AffineExpr d;
  AffineExpr m_alpha, M_alpha, m_beta, M_beta;
};

struct ConcreteBox {
  Rational a;
  ExtRational b;
  Rational c;
  ExtRational d;
  Rational m_alpha, M_alpha, m_beta, M_beta;
};

struct EmptyDomain : std::domain_error {
  using std::domain_error::domain_error;
};

struct BoxSolution {
  ExtRational value;
  Rational alpha, beta;  // lexicographically smallest maximiser
  bool attainable = true;
  std::string row;       // which case of the closed-form table applied
};

BoxSolution solve_box_concrete(const ConcreteBox& p);
// Throws std::domain_error when (alpha, beta) is outside D.
ExtRational mu_eval(const ConcreteBox& p, const Rational& alpha, const Rational& beta);

struct SymbolicCase {
  Polyhedron condition;  // over the clocks
  AffineExpr value;
  AffineExpr alpha, beta;
  bool attainable = true;
  std::string row;
};

struct SymbolicOptResult {
  std::vector<SymbolicCase> cases;
};

SymbolicOptResult solve_box_symbolic(const BoxProblem& p, const Polyhedron& context);
ConcreteBox instantiate(const BoxProblem& p, const Valuation& v);
// Identifiers of every case of the closed-form table.
const std::vector<std::string>& table_rows();

}  // namespace perm
