#pragma once

#include <cmath>
#include <span>

namespace q4f {

/// Neumaier-compensated running sum.
template <typename Scalar = double>
class CompensatedSum {
 public:
  void add(Scalar x) noexcept {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Scalar x) noexcept {
    add(x);
    return *this;
  }

  [[nodiscard]] Scalar value() const noexcept { return sum_ + compensation_; }

 private:
  Scalar sum_{0};
  Scalar compensation_{0};
};

template <typename Scalar>
Scalar compensated_sum(std::span<const Scalar> values) noexcept {
  CompensatedSum<Scalar> acc;
  for (Scalar v : values) acc.add(v);
  return acc.value();
}

}  // namespace q4f
