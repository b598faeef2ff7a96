#pragma once

#include <array>
#include <optional>
#include <utility>

#include "ewanet/rational.hpp"

namespace ewanet {

// 2x2 coordination payoffs: z = (C,C), y = (C,D), x = (D,C), w = (D,D).
// When all four doubles convert exactly to small rationals the exact view is
// kept alongside, so threshold comparisons can avoid float ties.
struct PayoffMatrix {
  double z = 0, y = 0, x = 0, w = 0;
  std::optional<std::array<Rational, 4>> exact;  // z, y, x, w

  static PayoffMatrix make(double z, double y, double x, double w);
  static PayoffMatrix symmetric(double h, double l);  // z = w = h, y = x = l

  bool symmetric_choice() const { return z == w && y == x; }
  double max_abs() const;
};

enum class RegimeSign { Positive, Negative, Indeterminate };  // sign of wz - xy

struct PayoffClassification {
  bool assumption1 = false;       // z>x, w>y, w>x, z>y, w>0, z>0
  bool assumption4 = false;       // z>w>x>y, w+x>z+y (D risk-dominant, C efficient)
  bool symmetric_choice = false;  // z=w, y=x
  RegimeSign regime = RegimeSign::Indeterminate;
};

PayoffClassification validate(const PayoffMatrix& payoff);

// (z - x) / (w - x + z - y), exact. Requires an exact payoff view and
// assumption 1; the denominator cannot degenerate under assumption 1.
Rational ne_threshold(const PayoffMatrix& payoff);
double ne_threshold_value(const PayoffMatrix& payoff);

// r1(eta) = (eta z - x) / (w - x + eta z - eta y)   (threshold on the D side)
// r2(eta) = (eta w - y) / (z - y + eta w - eta x)   (threshold on the C side)
// Both are < 1 whenever w, z > 0; r1 can be negative when x > 0 and eta is
// small, in which case the D-side condition is vacuously satisfied.
struct LimitingThresholds {
  Rational r1, r2;
};
LimitingThresholds limiting_thresholds(const PayoffMatrix& payoff, const Rational& eta);
std::pair<double, double> limiting_thresholds(const PayoffMatrix& payoff, double eta);

// Strictness margin used whenever exact rationals are unavailable.
inline constexpr double kFloatStrictMargin = 1e-12;

}  // namespace ewanet
