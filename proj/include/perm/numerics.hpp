#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace perm {

using Rational = mpq_class;
using Valuation = std::vector<Rational>;

struct IndeterminateForm : std::domain_error {
  using std::domain_error::domain_error;
};

struct InfiniteAffine : std::domain_error {
  using std::domain_error::domain_error;
};

// A rational number, or one of the two infinities.
class ExtRational {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtRational() = default;
  ExtRational(const Rational& q) : kind_(Kind::Finite), q_(q) {}
  ExtRational(long v) : kind_(Kind::Finite), q_(v) {}
  ExtRational(int v) : kind_(Kind::Finite), q_(v) {}

  static ExtRational pos_inf() { return ExtRational(Kind::PosInf); }
  static ExtRational neg_inf() { return ExtRational(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  const Rational& value() const;

  ExtRational operator-() const;
  friend ExtRational operator+(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator-(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator*(const ExtRational& a, const Rational& k);
  friend ExtRational operator/(const ExtRational& a, const Rational& k);

  friend bool operator==(const ExtRational& a, const ExtRational& b);
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

  // "p/q", "p", "+inf" or "-inf"
  std::string str() const;
  static ExtRational parse(const std::string& s);
  double to_double() const;

 private:
  explicit ExtRational(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  Rational q_ = 0;
};

ExtRational min(const ExtRational& a, const ExtRational& b);
ExtRational max(const ExtRational& a, const ExtRational& b);

// Parses "3", "-1/2", "0.25" exactly.
Rational parse_rational(const std::string& s);
std::string rational_str(const Rational& q);

// F0 + sum_i Fi * x_i over a fixed number of variables.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(std::size_t nvars) : coeffs_(nvars) {}
  AffineExpr(std::size_t nvars, const ExtRational& c);

  static AffineExpr constant(std::size_t nvars, const ExtRational& c) { return AffineExpr(nvars, c); }
  static AffineExpr variable(std::size_t nvars, std::size_t i, const Rational& k = 1);

  std::size_t nvars() const { return coeffs_.size(); }
  const ExtRational& constant_term() const { return constant_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Rational& coeff(std::size_t i) const { return coeffs_[i]; }

  void set_constant(const ExtRational& c);
  void set_coeff(std::size_t i, const Rational& k);

  bool is_finite() const { return constant_.is_finite(); }
  bool is_constant() const;

  ExtRational eval(const Valuation& v) const;

  AffineExpr operator-() const;
  friend AffineExpr operator+(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator-(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator*(const AffineExpr& a, const Rational& k);
  friend AffineExpr operator/(const AffineExpr& a, const Rational& k);
  friend AffineExpr operator+(const AffineExpr& a, const Rational& k);
  friend bool operator==(const AffineExpr& a, const AffineExpr& b);

  // Same expression over a different number of variables; variable i goes to map[i].
  AffineExpr remap(std::size_t nvars, const std::vector<std::size_t>& map) const;
  // Replace variable i by an expression over the same variables.
  AffineExpr substitute(std::size_t i, const AffineExpr& e) const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  ExtRational constant_ = 0;
  std::vector<Rational> coeffs_;
};

// Same expression over `nvars` variables: extra variables get coefficient 0;
// dropped variables must not occur.
AffineExpr resize(const AffineExpr& e, std::size_t nvars);

struct DelayResetForm {
  Rational slope;
  AffineExpr offset;
};

// f((v+d)[z->0]) == slope*d + offset(v)
DelayResetForm delay_reset_compose(const AffineExpr& f, const std::vector<bool>& reset);

}  // namespace perm
