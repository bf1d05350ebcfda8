#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace qtt {

// Neumaier's variant of Kahan summation. Error is O(eps) independent of the
// number of terms as long as the running sum does not cancel catastrophically.
class CompensatedSum {
 public:
  CompensatedSum& add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  CompensatedSum& operator+=(double x) noexcept { return add(x); }

  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// Euclidean norm with scaling to avoid overflow/underflow in the squares.
inline double compensated_norm(std::span<const double> xs) noexcept {
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  CompensatedSum acc;
  for (double x : xs) {
    const double y = x / scale;
    acc.add(y * y);
  }
  return scale * std::sqrt(acc.value());
}

}  // namespace qtt
