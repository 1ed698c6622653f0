#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace bn2o {

// Reserved log-probability-zero value. IEEE addition is absorbing for it,
// which is exactly the semantics log-joint accumulation needs.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - e^{-x}) for x >= 0. Form switch at ln 2 keeps both branches
// accurate (Maechler's log1mexp note).
inline double log1mexp(double x) {
  if (x <= 0.0) return kNegInf;
  return x < 0.6931471805599453 ? std::log(-std::expm1(-x))
                                : std::log1p(-std::exp(-x));
}

// log(e^a + e^b), safe with -inf arguments.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const double> v) {
  double hi = kNegInf;
  for (double x : v)
    if (x > hi) hi = x;
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

// Neumaier compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace bn2o
