#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace ewanet {

// Exact rational over int64 with __int128 intermediates.
// Denominator is kept positive; values are always stored reduced.
// Overflow past int64 after reduction throws std::overflow_error.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num_ = g ? n / g : n;
    den_ = g ? d / g : d;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return reduce128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return reduce128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return reduce128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return reduce128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const i128 lhs = i128(a.num_) * b.den_;
    const i128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  // Exact conversion of a finite double (every finite double is a dyadic
  // rational). Returns nullopt when the reduced denominator would exceed
  // max_den or the numerator does not fit in int64 — callers then fall back
  // to floating point.
  static std::optional<Rational> from_double(double v, std::int64_t max_den = (1LL << 24)) {
    if (!std::isfinite(v)) return std::nullopt;
    if (v == 0.0) return Rational(0);
    int exp = 0;
    const double m = std::frexp(v, &exp);
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));  // |mant| in [2^52, 2^53)
    int e2 = exp - 53;
    while (mant % 2 == 0) { mant /= 2; ++e2; }
    if (e2 >= 0) {
      if (e2 > 10) return std::nullopt;
      const i128 n = i128(mant) << e2;
      if (n > INT64_MAX || n < -i128(INT64_MAX)) return std::nullopt;
      return Rational(static_cast<std::int64_t>(n), 1);
    }
    if (-e2 > 62) return std::nullopt;
    const std::int64_t den = std::int64_t{1} << (-e2);
    if (den > max_den) return std::nullopt;
    return Rational(mant, den);
  }

 private:
  using i128 = __int128;

  static Rational reduce128(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 a = n < 0 ? -n : n;
    i128 b = d;
    while (b != 0) { const i128 t = a % b; a = b; b = t; }
    if (a != 0) { n /= a; d /= a; }
    if (n > INT64_MAX || n < -i128(INT64_MAX) || d > INT64_MAX)
      throw std::overflow_error("Rational: overflow after reduction");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace ewanet
