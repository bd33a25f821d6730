#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "q4f/errors.hpp"
#include "q4f/geometry.hpp"

namespace q4f {

/// Non-negative, finite contributions of n agents to one project.
class ContributionProfile {
 public:
  ContributionProfile() = default;
  /// Throws NegativeContribution for entries < 0 and InvalidArgument for non-finite ones.
  explicit ContributionProfile(Eigen::VectorXd contributions, std::string project_id = {});

  [[nodiscard]] const Eigen::VectorXd& contributions() const noexcept { return contributions_; }
  [[nodiscard]] const std::string& project_id() const noexcept { return project_id_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return contributions_.size(); }

  [[nodiscard]] ContributionProfile scaled(double lambda) const;

 private:
  std::string project_id_;
  Eigen::VectorXd contributions_;
};

/// Lever g(x) = a x^r, weighting h(c) = b c^(1/q), phases on S^(d-1).
struct MechanismParams {
  int d = 2;
  double r = 4.0;
  double q = 4.0;
  double a = 0.5;
  double b = 1.0;

  /// Tolerance on |a b^4 - d/(d+2)| for calibrated().
  static constexpr double kCalibrationTolerance = 1e-12;

  /// r = q = 4 and a b^4 = d/(d+2), with the given b.
  static MechanismParams calibrated_for(int d, double b = 1.0);

  /// Throws InvalidDimension for d < 1, InvalidArgument for non-positive r, q, a, b.
  void validate() const;

  [[nodiscard]] bool calibrated() const noexcept;

  friend bool operator==(const MechanismParams&, const MechanismParams&) = default;
};

/// Realized-funding summary for a stochastic mechanism.
struct FundingStats {
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation (n - 1 denominator)
  double std_error = 0.0;
  std::vector<std::pair<double, double>> quantiles;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const FundingStats&, const FundingStats&) = default;
};

inline constexpr double kDefaultQuantiles[] = {0.05, 0.25, 0.5, 0.75, 0.95};

/// h(c) = b c^(1/q).
template <typename Scalar>
Scalar weight(Scalar c, const MechanismParams& params) {
  if (c < Scalar(0)) throw Error(ErrorCode::NegativeContribution, "contribution must be >= 0");
  if (c == Scalar(0)) return Scalar(0);
  return Scalar(params.b) * std::pow(c, Scalar(1) / Scalar(params.q));
}

/// g(x) = a x^r.
template <typename Scalar>
Scalar lever(Scalar x, const MechanismParams& params) {
  if (x < Scalar(0)) throw Error(ErrorCode::InvalidArgument, "lever argument must be >= 0");
  if (x == Scalar(0)) return Scalar(0);
  return Scalar(params.a) * std::pow(x, Scalar(params.r));
}

/// Weights h(c_i) for every entry of an expression.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> weights(
    const Eigen::MatrixBase<Derived>& contributions, const MechanismParams& params) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> h(contributions.size());
  for (Eigen::Index i = 0; i < contributions.size(); ++i) h[i] = weight(contributions[i], params);
  return h;
}

/// (sum_i sqrt(c_i))^2.
template <typename Derived>
typename Derived::Scalar qf_funding(const Eigen::MatrixBase<Derived>& contributions) {
  using Scalar = typename Derived::Scalar;
  Scalar root_sum(0);
  for (Eigen::Index i = 0; i < contributions.size(); ++i) root_sum += std::sqrt(contributions[i]);
  return root_sum * root_sum;
}

inline double qf_funding(const ContributionProfile& profile) {
  return qf_funding(profile.contributions());
}

/// g(sum_j h(c_j)).
double deterministic_funding(const ContributionProfile& profile, const MechanismParams& params);

/// a * || sum_i omega_i h(c_i) ||^r for one realization of the phases.
double q4f_realized(const ContributionProfile& profile, std::span<const Direction> directions,
                    const MechanismParams& params);

/// Monte Carlo distribution of the realized funding; deterministic given seed.
FundingStats q4f_sample_distribution(const ContributionProfile& profile,
                                     const MechanismParams& params, std::size_t n_samples,
                                     std::uint64_t seed, unsigned workers = 1);

/// Mean, sample std, stderr and interpolated quantiles of `values`.
FundingStats summarize(std::span<const double> values, std::uint64_t seed,
                       std::span<const double> probabilities = kDefaultQuantiles);

}  // namespace q4f
