#include "ewanet/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ewanet {

PayoffMatrix PayoffMatrix::make(double z, double y, double x, double w) {
  PayoffMatrix p;
  p.z = z;
  p.y = y;
  p.x = x;
  p.w = w;
  const auto rz = Rational::from_double(z);
  const auto ry = Rational::from_double(y);
  const auto rx = Rational::from_double(x);
  const auto rw = Rational::from_double(w);
  if (rz && ry && rx && rw) p.exact = {{*rz, *ry, *rx, *rw}};
  return p;
}

PayoffMatrix PayoffMatrix::symmetric(double h, double l) { return make(h, l, l, h); }

double PayoffMatrix::max_abs() const {
  return std::max({std::abs(z), std::abs(y), std::abs(x), std::abs(w)});
}

PayoffClassification validate(const PayoffMatrix& p) {
  PayoffClassification c;
  c.assumption1 = p.z > p.x && p.w > p.y && p.w > p.x && p.z > p.y && p.w > 0 && p.z > 0;
  c.assumption4 = p.z > p.w && p.w > p.x && p.x > p.y && p.w + p.x > p.z + p.y && p.w > 0;
  c.symmetric_choice = p.symmetric_choice();
  if (p.exact) {
    const auto& [z, y, x, w] = *p.exact;
    const Rational det = w * z - x * y;
    c.regime = det > Rational(0)   ? RegimeSign::Positive
               : det < Rational(0) ? RegimeSign::Negative
                                   : RegimeSign::Indeterminate;
  } else {
    const double det = p.w * p.z - p.x * p.y;
    c.regime = det > kFloatStrictMargin    ? RegimeSign::Positive
               : det < -kFloatStrictMargin ? RegimeSign::Negative
                                           : RegimeSign::Indeterminate;
  }
  return c;
}

Rational ne_threshold(const PayoffMatrix& p) {
  if (!validate(p).assumption1)
    throw std::invalid_argument("ne_threshold: payoff violates the coordination assumptions");
  if (!p.exact)
    throw std::invalid_argument("ne_threshold: payoffs have no exact rational form");
  const auto& [z, y, x, w] = *p.exact;
  const Rational den = w - x + z - y;
  if (den.num() == 0) throw std::invalid_argument("ne_threshold: degenerate denominator");
  return (z - x) / den;
}

double ne_threshold_value(const PayoffMatrix& p) {
  if (!validate(p).assumption1)
    throw std::invalid_argument("ne_threshold: payoff violates the coordination assumptions");
  const double den = p.w - p.x + p.z - p.y;
  if (den == 0.0) throw std::invalid_argument("ne_threshold: degenerate denominator");
  return (p.z - p.x) / den;
}

LimitingThresholds limiting_thresholds(const PayoffMatrix& p, const Rational& eta) {
  if (eta < Rational(0) || eta > Rational(1))
    throw std::invalid_argument("limiting_thresholds: eta outside [0,1]");
  if (!p.exact)
    throw std::invalid_argument("limiting_thresholds: payoffs have no exact rational form");
  const auto& [z, y, x, w] = *p.exact;
  const Rational r1 = (eta * z - x) / (w - x + eta * z - eta * y);
  const Rational r2 = (eta * w - y) / (z - y + eta * w - eta * x);
  return {r1, r2};
}

std::pair<double, double> limiting_thresholds(const PayoffMatrix& p, double eta) {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("limiting_thresholds: eta outside [0,1]");
  const double r1 = (eta * p.z - p.x) / (p.w - p.x + eta * p.z - eta * p.y);
  const double r2 = (eta * p.w - p.y) / (p.z - p.y + eta * p.w - eta * p.x);
  return {r1, r2};
}

}  // namespace ewanet
