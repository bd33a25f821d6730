#include "q4f/geometry.hpp"

#include <cmath>
#include <string>

#include "q4f/errors.hpp"
#include "q4f/parallel.hpp"

namespace q4f {
namespace {

constexpr double kMinGaussianNorm = 1e-300;

void check_dimension(Eigen::Index d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "dimension must be >= 1, got " + std::to_string(d));
}

// Writes a uniform unit vector into out[0..d). Gaussian draw, normalized;
// the d = 1 case only needs the sign, which a single random bit provides.
void fill_direction(double* out, Eigen::Index d, RngStream& rng) {
  if (d == 1) {
    out[0] = rng.sign();
    return;
  }
  double sq = 0.0;
  do {
    sq = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double g = rng.normal();
      out[k] = g;
      sq += g * g;
    }
  } while (!(std::sqrt(sq) >= kMinGaussianNorm));
  const double inv = 1.0 / std::sqrt(sq);
  for (Eigen::Index k = 0; k < d; ++k) out[k] *= inv;
}

}  // namespace

Direction Direction::from_coords(Eigen::VectorXd coords) {
  check_dimension(coords.size());
  if (!(std::abs(coords.norm() - 1.0) <= kUnitTolerance)) {
    throw Error(ErrorCode::InvalidArgument, "direction is not a unit vector");
  }
  return Direction(std::move(coords));
}

Direction sample_direction(int d, RngStream& rng) {
  check_dimension(d);
  Eigen::VectorXd coords(d);
  fill_direction(coords.data(), d, rng);
  return Direction(std::move(coords));
}

void sample_direction_into(Eigen::Ref<Eigen::VectorXd> out, RngStream& rng) {
  check_dimension(out.size());
  fill_direction(out.data(), out.size(), rng);
}

Eigen::VectorXd phase_sum(std::span<const double> weights, std::span<const Direction> directions) {
  if (weights.size() != directions.size()) {
    throw Error(ErrorCode::ShapeMismatch, "weights and directions differ in length");
  }
  if (directions.empty()) return Eigen::VectorXd::Zero(0);
  const Eigen::Index d = directions.front().dim();
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(d);
  Eigen::ArrayXd compensation = Eigen::ArrayXd::Zero(d);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (directions[i].dim() != d) {
      throw Error(ErrorCode::ShapeMismatch, "directions do not share one dimension");
    }
    const Eigen::ArrayXd y = weights[i] * directions[i].coords().array() - compensation;
    const Eigen::ArrayXd t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  return sum.matrix();
}

std::vector<double> sample_phase_sum_norms(std::span<const double> weights, int d,
                                           std::size_t n_samples, std::uint64_t seed,
                                           unsigned workers) {
  check_dimension(d);
  std::vector<double> norms(n_samples);
  const std::size_t n_batches = (n_samples + kSampleBatch - 1) / kSampleBatch;

  parallel_for(n_batches, workers, [&](std::size_t batch) {
    RngStream rng(seed, batch);
    std::vector<double> omega(static_cast<std::size_t>(d));
    std::vector<double> sum(static_cast<std::size_t>(d));
    std::vector<double> compensation(static_cast<std::size_t>(d));
    const std::size_t begin = batch * kSampleBatch;
    const std::size_t end = std::min(n_samples, begin + kSampleBatch);
    for (std::size_t s = begin; s < end; ++s) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(compensation.begin(), compensation.end(), 0.0);
      for (double w : weights) {
        fill_direction(omega.data(), d, rng);
        for (int k = 0; k < d; ++k) {
          const double y = w * omega[k] - compensation[k];
          const double t = sum[k] + y;
          compensation[k] = (t - sum[k]) - y;
          sum[k] = t;
        }
      }
      double sq = 0.0;
      for (double x : sum) sq += x * x;
      norms[s] = std::sqrt(sq);
    }
  });
  return norms;
}

}  // namespace q4f
