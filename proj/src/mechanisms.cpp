#include "q4f/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "q4f/numerics.hpp"

namespace q4f {

ContributionProfile::ContributionProfile(Eigen::VectorXd contributions, std::string project_id)
    : project_id_(std::move(project_id)), contributions_(std::move(contributions)) {
  for (Eigen::Index i = 0; i < contributions_.size(); ++i) {
    const double c = contributions_[i];
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::InvalidArgument, "contribution " + std::to_string(i) + " is not finite");
    }
    if (c < 0.0) {
      throw Error(ErrorCode::NegativeContribution, "contribution " + std::to_string(i) + " is negative");
    }
  }
}

ContributionProfile ContributionProfile::scaled(double lambda) const {
  return ContributionProfile(lambda * contributions_, project_id_);
}

MechanismParams MechanismParams::calibrated_for(int d, double b) {
  MechanismParams p;
  p.d = d;
  p.r = 4.0;
  p.q = 4.0;
  p.b = b;
  p.a = (static_cast<double>(d) / (d + 2.0)) / std::pow(b, 4);
  p.validate();
  return p;
}

void MechanismParams::validate() const {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "d must be >= 1");
  if (!(r > 0.0) || !(q > 0.0) || !(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "r, q, a, b must all be positive");
  }
}

bool MechanismParams::calibrated() const noexcept {
  const double target = static_cast<double>(d) / (d + 2.0);
  return r == 4.0 && q == 4.0 && std::abs(a * std::pow(b, 4) - target) <= kCalibrationTolerance;
}

double deterministic_funding(const ContributionProfile& profile, const MechanismParams& params) {
  CompensatedSum<double> total;
  for (Eigen::Index i = 0; i < profile.size(); ++i) total += weight(profile.contributions()[i], params);
  return lever(total.value(), params);
}

double q4f_realized(const ContributionProfile& profile, std::span<const Direction> directions,
                    const MechanismParams& params) {
  if (directions.size() != static_cast<std::size_t>(profile.size())) {
    throw Error(ErrorCode::ShapeMismatch, "one direction per contribution is required");
  }
  for (const auto& omega : directions) {
    if (omega.dim() != params.d) throw Error(ErrorCode::ShapeMismatch, "direction dimension differs from d");
  }
  const Eigen::VectorXd h = weights(profile.contributions(), params);
  const Eigen::VectorXd sum = phase_sum({h.data(), static_cast<std::size_t>(h.size())}, directions);
  return lever(norm(sum), params);
}

FundingStats q4f_sample_distribution(const ContributionProfile& profile,
                                     const MechanismParams& params, std::size_t n_samples,
                                     std::uint64_t seed, unsigned workers) {
  params.validate();
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const Eigen::VectorXd h = weights(profile.contributions(), params);
  std::vector<double> values = sample_phase_sum_norms(
      {h.data(), static_cast<std::size_t>(h.size())}, params.d, n_samples, seed, workers);
  for (double& v : values) v = lever(v, params);
  return summarize(values, seed);
}

FundingStats summarize(std::span<const double> values, std::uint64_t seed,
                       std::span<const double> probabilities) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "cannot summarize an empty sample");
  FundingStats stats;
  stats.n_samples = values.size();
  stats.seed = seed;
  const double n = static_cast<double>(values.size());

  stats.mean = compensated_sum(values) / n;
  if (values.size() > 1) {
    CompensatedSum<double> sq;
    for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
    stats.std_dev = std::sqrt(sq.value() / (n - 1.0));
  }
  stats.std_error = stats.std_dev / std::sqrt(n);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (double p : probabilities) {
    // linear interpolation between order statistics (Hyndman-Fan type 7)
    const double pos = p * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    stats.quantiles.emplace_back(p, sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return stats;
}

}  // namespace q4f
