#include "majorize/scalar.hpp"

#include <sstream>

namespace majorize {

namespace {

// True iff n == 2^a * 5^b, for terminating-decimal detection.
bool only_two_five(BigInt n) {
  if (n == 0) return false;
  while (n % 2 == 0) n /= 2;
  while (n % 5 == 0) n /= 5;
  return n == 1;
}

std::string decimal_of(const Rational& r) {
  // Exact terminating decimal; caller guarantees denominator is 2^a 5^b.
  BigInt num = numerator(r), den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  int a = 0, b = 0;
  BigInt d = den;
  while (d % 2 == 0) { d /= 2; ++a; }
  while (d % 5 == 0) { d /= 5; ++b; }
  int k = std::max(a, b);
  for (int i = a; i < k; ++i) num *= 2;
  for (int i = b; i < k; ++i) num *= 5;
  std::string digits = num.str();
  std::string out;
  if (k == 0) {
    out = digits;
  } else {
    if (static_cast<int>(digits.size()) <= k)
      digits.insert(0, k + 1 - digits.size(), '0');
    out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
  }
  return neg ? "-" + out : out;
}

}  // namespace

std::string Scalar::str() const {
  if (!is_exact()) {
    std::ostringstream os;
    os.precision(17);
    os << std::get<double>(v_);
    return os.str();
  }
  const Rational& r = std::get<Rational>(v_);
  if (denominator(r) == 1) return numerator(r).str();
  if (only_two_five(denominator(r))) return decimal_of(r);
  return numerator(r).str() + "/" + denominator(r).str();
}

Scalar parse_exact(const std::string& text) {
  std::string s = text;
  // strip spaces
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw std::invalid_argument("empty number literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num(BigInt(s.substr(0, slash)));
    Rational den(BigInt(s.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator in " + text);
    return Scalar(num / den);
  }

  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }

  std::string digits;
  long frac_digits = 0;
  long exponent = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("bad number literal: " + text);
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exponent = std::stol(s.substr(i + 1));
      break;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else {
      throw std::invalid_argument("bad number literal: " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("bad number literal: " + text);

  Rational r(BigInt(digits.empty() ? "0" : digits));
  long net = exponent - frac_digits;
  BigInt ten = 10;
  if (net > 0) {
    BigInt p = 1;
    for (long k = 0; k < net; ++k) p *= ten;
    r *= Rational(p);
  } else if (net < 0) {
    BigInt p = 1;
    for (long k = 0; k < -net; ++k) p *= ten;
    r /= Rational(p);
  }
  if (neg) r = -r;
  return Scalar(r);
}

bool square_ratio(const Rational& q1, const Rational& q2, Rational* root) {
  if (q1 <= 0 || q2 <= 0) throw std::domain_error("square_ratio needs positive arguments");
  Rational q = q1 / q2;
  BigInt n = numerator(q), d = denominator(q);
  if (mpz_perfect_square_p(n.backend().data()) && mpz_perfect_square_p(d.backend().data())) {
    if (root) *root = Rational(sqrt(n)) / Rational(sqrt(d));
    return true;
  }
  return false;
}

}  // namespace majorize
