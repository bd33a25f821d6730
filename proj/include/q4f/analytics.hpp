#pragma once

#include <span>

#include <Eigen/Dense>

#include "q4f/mechanisms.hpp"

namespace q4f {

/// Isotropic Gaussian stand-in for sum_i omega_i h_i: every coordinate has
/// standard deviation sigma, so sigma^2 d = sum_i h_i^2.
struct RadialModel {
  double sigma = 1.0;
  int d = 1;
};

/// sigma = sqrt(sum h^2 / d). Throws DegenerateModel when every weight is zero.
RadialModel radial_model(std::span<const double> weights, int d);

/// The three pieces of the quartic expectation with one weight singled out.
struct Norm4Terms {
  double bulk = 0.0;    // ((d+2)/d) (sum_{j!=i} h_j^2)^2
  double cross = 0.0;   // (2(d+2)/d) h_i^2 sum_{j!=i} h_j^2
  double single = 0.0;  // h_i^4

  [[nodiscard]] double total() const noexcept { return bulk + cross + single; }
};

/// Terms of E||sum omega_j h_j||^4 with the Gaussian approximation applied to
/// every weight except `singled_index`. Throws InvalidIndex.
Norm4Terms expected_norm4_terms(std::span<const double> weights, std::size_t singled_index, int d);

inline double expected_norm4_asymmetric(std::span<const double> weights, std::size_t singled_index,
                                        int d) {
  return expected_norm4_terms(weights, singled_index, d).total();
}

/// a * expected_norm4_asymmetric over h(c). Quartic lever only (r = 4).
double expected_funding_closed_form(const ContributionProfile& profile,
                                    const MechanismParams& params, std::size_t singled_index);

/// a ((d+2)/d) (sum h^2)^2. Equals qf_funding for calibrated params.
double expected_funding_symmetric(const ContributionProfile& profile,
                                  const MechanismParams& params);

/// d/dc_i of expected_funding_symmetric: (4(d+2)/d) a h'(c_i) h(c_i) sum_j h(c_j)^2.
/// Throws SingularFOC for contributions below kMinFocContribution.
Eigen::VectorXd expected_funding_gradient(const ContributionProfile& profile,
                                          const MechanismParams& params);

inline constexpr double kMinFocContribution = 1e-12;

/// h'(c) = (b/q) c^(1/q - 1).
double weight_derivative(double c, const MechanismParams& params);

/// Chi density of the radius of the model's Gaussian vector.
double chi_pdf(double radius, const RadialModel& model);

/// E[R^k] for even k: sigma^k d (d+2) ... (d+k-2). Throws UnsupportedMoment for odd k.
double chi_moment(int k, const RadialModel& model);

/// E[R^order] = sigma^order 2^(order/2) Gamma((d+order)/2) / Gamma(d/2), any order > -d.
double radial_moment(double order, const RadialModel& model);

/// std/mean of a R^4 under the radial model. Only r = 4 is supported.
double concentration_ratio(int d, double r);

}  // namespace q4f
