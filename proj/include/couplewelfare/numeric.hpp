#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace couplewelfare {

// Neumaier-compensated running sum. Callers feed terms in a fixed order so
// that aggregates do not depend on how per-item work was scheduled.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// phi(x) / Phi(x), stable far into the left tail.
inline double inverse_mills(double x) {
  if (x > -30.0) return normal_pdf(x) / normal_cdf(x);
  const double x2 = x * x;
  return -x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2));
}

// log Phi(x), stable for large negative x.
inline double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(1.0 - 1.0 / (x * x) + 3.0 / (x * x * x * x));
}

}  // namespace couplewelfare
