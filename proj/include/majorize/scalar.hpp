#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace majorize {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// A real number that is either an exact rational or a double.
///
/// Arithmetic between two exact values stays exact; as soon as a double is
/// involved the result drops to double.  Comparisons are always exact (a
/// double is a dyadic rational, so mixed comparisons convert losslessly).
/// This gives the "rational mode when all inputs are rational" behaviour
/// with a single code path.
class Scalar {
 public:
  Scalar() : v_(Rational(0)) {}
  Scalar(int n) : v_(Rational(n)) {}
  Scalar(long n) : v_(Rational(static_cast<long long>(n))) {}
  Scalar(long long n) : v_(Rational(n)) {}
  Scalar(std::uint64_t n) : v_(Rational(static_cast<unsigned long long>(n))) {}
  Scalar(double d) : v_(d) {}
  Scalar(const Rational& r) : v_(r) {}
  Scalar(Rational&& r) : v_(std::move(r)) {}

  static Scalar ratio(long long num, long long den) {
    return Scalar(Rational(num, den));
  }

  bool is_exact() const { return std::holds_alternative<Rational>(v_); }

  double to_double() const {
    if (is_exact()) return static_cast<double>(std::get<Rational>(v_));
    return std::get<double>(v_);
  }

  /// Loss-free conversion; doubles are dyadic rationals.
  Rational to_rational() const {
    if (is_exact()) return std::get<Rational>(v_);
    double d = std::get<double>(v_);
    if (!std::isfinite(d)) throw std::domain_error("non-finite double in Scalar::to_rational");
    return Rational(d);
  }

  /// Drop to the double lane (used by sampling paths).
  Scalar demoted() const { return Scalar(to_double()); }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(a.rat() + b.rat());
    return Scalar(a.to_double() + b.to_double());
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(a.rat() - b.rat());
    return Scalar(a.to_double() - b.to_double());
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(a.rat() * b.rat());
    return Scalar(a.to_double() * b.to_double());
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) {
      if (b.rat() == 0) throw std::domain_error("Scalar division by zero");
      return Scalar(a.rat() / b.rat());
    }
    return Scalar(a.to_double() / b.to_double());
  }
  Scalar operator-() const {
    if (is_exact()) return Scalar(-rat());
    return Scalar(-std::get<double>(v_));
  }
  Scalar& operator+=(const Scalar& o) { *this = *this + o; return *this; }
  Scalar& operator-=(const Scalar& o) { *this = *this - o; return *this; }
  Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }
  Scalar& operator/=(const Scalar& o) { *this = *this / o; return *this; }

  friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return cmp(a, b) != 0; }
  friend bool operator<(const Scalar& a, const Scalar& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Scalar& a, const Scalar& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Scalar& a, const Scalar& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Scalar& a, const Scalar& b) { return cmp(a, b) >= 0; }

  /// Exact three-way comparison regardless of lanes.
  static int cmp(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return a.rat().compare(b.rat());
    if (!a.is_exact() && !b.is_exact()) {
      double x = std::get<double>(a.v_), y = std::get<double>(b.v_);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    return a.to_rational().compare(b.to_rational());
  }

  int sign() const {
    if (is_exact()) return rat().sign();
    double d = std::get<double>(v_);
    return d < 0 ? -1 : (d > 0 ? 1 : 0);
  }

  Scalar abs() const { return sign() < 0 ? -*this : *this; }

  /// Integer power with exact result in the exact lane.
  Scalar pow_int(std::uint64_t n) const {
    if (is_exact()) {
      Rational r = 1;
      Rational base = rat();
      std::uint64_t e = n;
      while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
      }
      return Scalar(r);
    }
    return Scalar(std::pow(std::get<double>(v_), static_cast<double>(n)));
  }

  std::string str() const;

 private:
  const Rational& rat() const { return std::get<Rational>(v_); }
  std::variant<double, Rational> v_;
};

inline Scalar abs(const Scalar& s) { return s.abs(); }
inline Scalar min(const Scalar& a, const Scalar& b) { return a <= b ? a : b; }
inline Scalar max(const Scalar& a, const Scalar& b) { return a >= b ? a : b; }

/// Parse "p/q", plain decimals ("-2.5", "1e-3") or integers, exactly.
Scalar parse_exact(const std::string& text);

/// Extended real line [-inf, +inf]; finite values carry a Scalar.
class XReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  XReal() : kind_(Kind::Finite), v_() {}
  XReal(const Scalar& s) : kind_(Kind::Finite), v_(s) {}
  static XReal pos_inf() { XReal x; x.kind_ = Kind::PosInf; return x; }
  static XReal neg_inf() { XReal x; x.kind_ = Kind::NegInf; return x; }

  bool finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  const Scalar& value() const {
    if (!finite()) throw std::domain_error("XReal::value on infinite value");
    return v_;
  }
  double to_double() const {
    if (kind_ == Kind::PosInf) return std::numeric_limits<double>::infinity();
    if (kind_ == Kind::NegInf) return -std::numeric_limits<double>::infinity();
    return v_.to_double();
  }

  friend XReal operator+(const XReal& a, const XReal& b) {
    if (a.finite() && b.finite()) return XReal(a.v_ + b.v_);
    if (a.is_pos_inf() && b.is_neg_inf()) throw std::domain_error("XReal: inf - inf");
    if (a.is_neg_inf() && b.is_pos_inf()) throw std::domain_error("XReal: inf - inf");
    if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
    return neg_inf();
  }
  XReal operator-() const {
    if (is_pos_inf()) return neg_inf();
    if (is_neg_inf()) return pos_inf();
    return XReal(-v_);
  }

  static int cmp(const XReal& a, const XReal& b) {
    auto rank = [](Kind k) { return k == Kind::NegInf ? 0 : (k == Kind::Finite ? 1 : 2); };
    if (a.kind_ != Kind::Finite || b.kind_ != Kind::Finite) {
      int ra = rank(a.kind_), rb = rank(b.kind_);
      if (ra != rb) return ra < rb ? -1 : 1;
      return a.kind_ == Kind::Finite ? Scalar::cmp(a.v_, b.v_) : 0;
    }
    return Scalar::cmp(a.v_, b.v_);
  }
  friend bool operator==(const XReal& a, const XReal& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const XReal& a, const XReal& b) { return cmp(a, b) != 0; }
  friend bool operator<(const XReal& a, const XReal& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const XReal& a, const XReal& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const XReal& a, const XReal& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const XReal& a, const XReal& b) { return cmp(a, b) >= 0; }

  std::string str() const {
    if (is_pos_inf()) return "+inf";
    if (is_neg_inf()) return "-inf";
    return v_.str();
  }

 private:
  Kind kind_;
  Scalar v_;
};

/// Signed square-root coefficient c = sign * sqrt(sq), sq >= 0.
///
/// Orthonormal vectors built from two-point rotations have coordinates of
/// this shape with rational sq, which makes Gram matrices exactly checkable:
/// products of two coefficients are +-sqrt(rational), and sums of such terms
/// vanish iff they cancel within square-ratio classes.
struct SqCoeff {
  int sign = 0;       // -1, 0, +1
  Scalar sq = Scalar(0);

  double to_double() const {
    double r = std::sqrt(sq.to_double());
    return sign < 0 ? -r : (sign > 0 ? r : 0.0);
  }
};

/// True iff q1/q2 is the square of a rational (q1,q2 > 0).
bool square_ratio(const Rational& q1, const Rational& q2, Rational* root);

}  // namespace majorize
