#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "q4f/rng.hpp"

namespace q4f {

/// Unit vector on S^(d-1); the random phase attached to one contribution.
class Direction {
 public:
  /// Tolerance on | ||coords|| - 1 | accepted by from_coords.
  static constexpr double kUnitTolerance = 1e-12;

  /// Throws InvalidDimension for empty coords, InvalidArgument if not unit length.
  static Direction from_coords(Eigen::VectorXd coords);

  [[nodiscard]] const Eigen::VectorXd& coords() const noexcept { return coords_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return coords_.size(); }

 private:
  explicit Direction(Eigen::VectorXd coords) : coords_(std::move(coords)) {}
  friend Direction sample_direction(int d, RngStream& rng);

  Eigen::VectorXd coords_;
};

/// Uniform point on S^(d-1). For d = 1 this is +1 or -1 with equal odds.
Direction sample_direction(int d, RngStream& rng);

/// Fills `out` with a uniform point on S^(out.size()-1) without allocating.
void sample_direction_into(Eigen::Ref<Eigen::VectorXd> out, RngStream& rng);

/// Componentwise sum of weights[i] * directions[i], compensated per coordinate.
Eigen::VectorXd phase_sum(std::span<const double> weights, std::span<const Direction> directions);

template <typename Derived>
typename Derived::RealScalar norm(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

/// Samples ||sum_i w_i omega_i|| for `n_samples` independent direction tuples.
///
/// Samples are produced in batches of kSampleBatch; batch k draws from
/// RngStream(seed, k), so the output is identical for every worker count.
std::vector<double> sample_phase_sum_norms(std::span<const double> weights, int d,
                                           std::size_t n_samples, std::uint64_t seed,
                                           unsigned workers = 1);

inline constexpr std::size_t kSampleBatch = 1024;

}  // namespace q4f
