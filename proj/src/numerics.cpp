#include "perm/numerics.hpp"

#include <sstream>

namespace perm {

const Rational& ExtRational::value() const {
  if (!is_finite()) throw std::domain_error("value() of an infinite scalar");
  return q_;
}

ExtRational ExtRational::operator-() const {
  switch (kind_) {
    case Kind::PosInf: return neg_inf();
    case Kind::NegInf: return pos_inf();
    default: return ExtRational(Rational(-q_));
  }
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (a.is_finite() && b.is_finite()) return ExtRational(Rational(a.q_ + b.q_));
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
    throw IndeterminateForm("inf - inf");
  return a.is_finite() ? b : a;
}

ExtRational operator-(const ExtRational& a, const ExtRational& b) { return a + (-b); }

ExtRational operator*(const ExtRational& a, const Rational& k) {
  if (a.is_finite()) return ExtRational(Rational(a.q_ * k));
  if (sgn(k) == 0) throw IndeterminateForm("0 * inf");
  return sgn(k) > 0 ? a : -a;
}

ExtRational operator/(const ExtRational& a, const Rational& k) {
  if (sgn(k) == 0) throw std::domain_error("division by zero");
  if (a.is_finite()) return ExtRational(Rational(a.q_ / k));
  return sgn(k) > 0 ? a : -a;
}

bool operator==(const ExtRational& a, const ExtRational& b) {
  if (a.kind_ != b.kind_) return false;
  return !a.is_finite() || a.q_ == b.q_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  auto rank = [](ExtRational::Kind k) {
    return k == ExtRational::Kind::NegInf ? 0 : k == ExtRational::Kind::Finite ? 1 : 2;
  };
  if (a.kind_ != b.kind_) return rank(a.kind_) <=> rank(b.kind_);
  if (!a.is_finite()) return std::strong_ordering::equal;
  int c = cmp(a.q_, b.q_);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::string ExtRational::str() const {
  if (is_pos_inf()) return "+inf";
  if (is_neg_inf()) return "-inf";
  return rational_str(q_);
}

ExtRational ExtRational::parse(const std::string& s) {
  if (s == "+inf" || s == "inf") return pos_inf();
  if (s == "-inf") return neg_inf();
  return ExtRational(parse_rational(s));
}

double ExtRational::to_double() const {
  if (is_pos_inf()) return 1.0 / 0.0;
  if (is_neg_inf()) return -1.0 / 0.0;
  return q_.get_d();
}

ExtRational min(const ExtRational& a, const ExtRational& b) { return b < a ? b : a; }
ExtRational max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }

Rational parse_rational(const std::string& raw) {
  std::string s = raw;
  if (s.empty()) throw std::invalid_argument("empty number");
  auto dot = s.find('.');
  Rational q;
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw std::invalid_argument("bad number: " + raw);
    std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    bool neg = !whole.empty() && whole[0] == '-';
    if (neg || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) frac = "0";
    for (char ch : whole + frac)
      if (ch < '0' || ch > '9') throw std::invalid_argument("bad number: " + raw);
    mpz_class num(whole + frac, 10), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    q = Rational(num, den);
    if (neg) q = -q;
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) {
      char ch = s[i];
      bool ok = (ch >= '0' && ch <= '9') || ch == '/' || (i == 0 && (ch == '-' || ch == '+'));
      if (!ok) throw std::invalid_argument("bad number: " + raw);
    }
    if (s[0] == '+') s = s.substr(1);
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad number: " + raw);
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + raw);
  }
  q.canonicalize();
  return q;
}

std::string rational_str(const Rational& q) { return q.get_str(); }

AffineExpr::AffineExpr(std::size_t nvars, const ExtRational& c) : constant_(c), coeffs_(nvars) {}

AffineExpr AffineExpr::variable(std::size_t nvars, std::size_t i, const Rational& k) {
  AffineExpr e(nvars);
  e.coeffs_.at(i) = k;
  return e;
}

void AffineExpr::set_constant(const ExtRational& c) {
  constant_ = c;
  if (!c.is_finite())
    for (auto& k : coeffs_) k = 0;
}

void AffineExpr::set_coeff(std::size_t i, const Rational& k) {
  if (!constant_.is_finite()) {
    if (sgn(k) != 0) throw InfiniteAffine("coefficient on an infinite expression");
    return;
  }
  coeffs_.at(i) = k;
}

bool AffineExpr::is_constant() const {
  for (const auto& k : coeffs_)
    if (sgn(k) != 0) return false;
  return true;
}

ExtRational AffineExpr::eval(const Valuation& v) const {
  if (!constant_.is_finite()) return constant_;
  if (v.size() < coeffs_.size()) throw std::invalid_argument("valuation too short");
  Rational acc = constant_.value();
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (sgn(coeffs_[i]) != 0) acc += coeffs_[i] * v[i];
  return acc;
}

AffineExpr AffineExpr::operator-() const {
  AffineExpr r(nvars(), -constant_);
  if (constant_.is_finite())
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] = -coeffs_[i];
  return r;
}

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("dimension mismatch");
  AffineExpr r(a.nvars(), a.constant_ + b.constant_);
  if (r.constant_.is_finite())
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
  return r;
}

AffineExpr operator-(const AffineExpr& a, const AffineExpr& b) { return a + (-b); }

AffineExpr operator*(const AffineExpr& a, const Rational& k) {
  AffineExpr r(a.nvars(), a.constant_ * k);
  if (r.constant_.is_finite())
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r.coeffs_[i] = a.coeffs_[i] * k;
  return r;
}

AffineExpr operator/(const AffineExpr& a, const Rational& k) {
  if (sgn(k) == 0) throw std::domain_error("division by zero");
  return a * Rational(1 / k);
}

AffineExpr operator+(const AffineExpr& a, const Rational& k) {
  AffineExpr r = a;
  r.constant_ = a.constant_ + ExtRational(k);
  return r;
}

bool operator==(const AffineExpr& a, const AffineExpr& b) {
  return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
}

AffineExpr AffineExpr::remap(std::size_t n, const std::vector<std::size_t>& map) const {
  AffineExpr r(n, constant_);
  if (constant_.is_finite())
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (sgn(coeffs_[i]) != 0) r.coeffs_.at(map.at(i)) += coeffs_[i];
  return r;
}

AffineExpr resize(const AffineExpr& e, std::size_t n) {
  AffineExpr r(n, e.constant_term());
  if (!e.is_finite()) return r;
  for (std::size_t i = 0; i < e.nvars(); ++i) {
    if (sgn(e.coeff(i)) == 0) continue;
    if (i >= n) throw std::logic_error("resize: variable still occurs");
    r.set_coeff(i, e.coeff(i));
  }
  return r;
}

AffineExpr AffineExpr::substitute(std::size_t i, const AffineExpr& e) const {
  if (sgn(coeffs_.at(i)) == 0) return *this;
  Rational k = coeffs_[i];
  AffineExpr r = *this;
  r.coeffs_[i] = 0;
  return r + e * k;
}

std::string AffineExpr::str(const std::vector<std::string>& names) const {
  if (!constant_.is_finite()) return constant_.str();
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const Rational& k = coeffs_[i];
    if (sgn(k) == 0) continue;
    std::string name = i < names.size() ? names[i] : "v" + std::to_string(i);
    Rational mag = abs(k);
    if (!first) os << (sgn(k) < 0 ? " - " : " + ");
    else if (sgn(k) < 0) os << "-";
    if (mag != 1) os << rational_str(mag) << "*";
    os << name;
    first = false;
  }
  const Rational& c = constant_.value();
  if (first) return rational_str(c);
  if (sgn(c) != 0) os << (sgn(c) < 0 ? " - " : " + ") << rational_str(Rational(abs(c)));
  return os.str();
}

DelayResetForm delay_reset_compose(const AffineExpr& f, const std::vector<bool>& reset) {
  if (!f.is_finite()) throw InfiniteAffine("delay_reset_compose on an infinite expression");
  DelayResetForm out{0, f};
  for (std::size_t i = 0; i < f.nvars(); ++i) {
    bool z = i < reset.size() && reset[i];
    if (z) out.offset.set_coeff(i, 0);
    else out.slope += f.coeff(i);
  }
  return out;
}

}  // namespace perm
