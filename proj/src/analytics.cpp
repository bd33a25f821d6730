#include "q4f/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "q4f/numerics.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace q4f {
namespace {

void require_quartic(double r) {
  if (r != 4.0) {
    throw Error(ErrorCode::UnsupportedExponent, "closed form needs r = 4, got " + std::to_string(r));
  }
}

void check_model(const RadialModel& model) {
  if (model.d < 1) throw Error(ErrorCode::InvalidDimension, "d must be >= 1");
  if (!(model.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
}

double sum_of_squares(const Eigen::VectorXd& h) {
  CompensatedSum<double> acc;
  for (double x : h) acc += x * x;
  return acc.value();
}

}  // namespace

RadialModel radial_model(std::span<const double> weights, int d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "d must be >= 1");
  CompensatedSum<double> acc;
  for (double h : weights) acc += h * h;
  if (!(acc.value() > 0.0)) throw Error(ErrorCode::DegenerateModel, "all weights are zero");
  return {std::sqrt(acc.value() / d), d};
}

Norm4Terms expected_norm4_terms(std::span<const double> weights, std::size_t singled_index, int d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "d must be >= 1");
  if (singled_index >= weights.size()) {
    throw Error(ErrorCode::InvalidIndex, "singled index " + std::to_string(singled_index) +
                                             " out of range for " + std::to_string(weights.size()) +
                                             " weights");
  }
  CompensatedSum<double> rest;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (j != singled_index) rest += weights[j] * weights[j];
  }
  const double s = rest.value();
  const double hi2 = weights[singled_index] * weights[singled_index];
  const double factor = (d + 2.0) / d;
  return {factor * s * s, 2.0 * factor * hi2 * s, hi2 * hi2};
}

double expected_funding_closed_form(const ContributionProfile& profile,
                                    const MechanismParams& params, std::size_t singled_index) {
  params.validate();
  require_quartic(params.r);
  const Eigen::VectorXd h = weights(profile.contributions(), params);
  return params.a * expected_norm4_asymmetric({h.data(), static_cast<std::size_t>(h.size())},
                                              singled_index, params.d);
}

double expected_funding_symmetric(const ContributionProfile& profile,
                                  const MechanismParams& params) {
  params.validate();
  require_quartic(params.r);
  const double s = sum_of_squares(weights(profile.contributions(), params));
  return params.a * ((params.d + 2.0) / params.d) * s * s;
}

double weight_derivative(double c, const MechanismParams& params) {
  if (c < kMinFocContribution) {
    throw Error(ErrorCode::SingularFOC, "h'(c) is undefined for c = " + std::to_string(c));
  }
  return (params.b / params.q) * std::pow(c, 1.0 / params.q - 1.0);
}

Eigen::VectorXd expected_funding_gradient(const ContributionProfile& profile,
                                          const MechanismParams& params) {
  params.validate();
  require_quartic(params.r);
  const Eigen::VectorXd& c = profile.contributions();
  const Eigen::VectorXd h = weights(c, params);
  const double scale = 4.0 * (params.d + 2.0) / params.d * params.a * sum_of_squares(h);
  Eigen::VectorXd grad(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) grad[i] = scale * weight_derivative(c[i], params) * h[i];
  return grad;
}

double chi_pdf(double radius, const RadialModel& model) {
  check_model(model);
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  const double half_d = 0.5 * model.d;
  const double log_norm = (1.0 - half_d) * std::numbers::ln2 - std::lgamma(half_d) - std::log(model.sigma);
  const double x = radius / model.sigma;
  if (x == 0.0) return model.d == 1 ? std::exp(log_norm) : 0.0;
  return std::exp(log_norm + (model.d - 1) * std::log(x) - 0.5 * x * x);
}

double chi_moment(int k, const RadialModel& model) {
  check_model(model);
  if (k < 0 || k % 2 != 0) {
    throw Error(ErrorCode::UnsupportedMoment, "only non-negative even moments, got " + std::to_string(k));
  }
  double m = 1.0;
  for (int j = 0; j < k / 2; ++j) m *= (model.d + 2.0 * j) * model.sigma * model.sigma;
  return m;
}

double radial_moment(double order, const RadialModel& model) {
  check_model(model);
  if (order >= 0.0 && order == std::floor(order) && static_cast<long>(order) % 2 == 0) {
    return chi_moment(static_cast<int>(order), model);
  }
  if (!(order > -model.d)) throw Error(ErrorCode::UnsupportedMoment, "moment diverges");
  // Gamma((d+order)/2) / Gamma(d/2) without forming either gamma value
  const double gamma_ratio = 1.0 / boost::math::tgamma_delta_ratio(0.5 * model.d, 0.5 * order);
  return std::pow(model.sigma, order) * std::pow(2.0, 0.5 * order) * gamma_ratio;
}

double concentration_ratio(int d, double r) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "d must be >= 1");
  require_quartic(r);
  const double dd = d;
  // E[R^8] / E[R^4]^2 - 1 = (d+4)(d+6) / (d(d+2)) - 1 = 8(d+3) / (d(d+2))
  return std::sqrt(8.0 * (dd + 3.0) / (dd * (dd + 2.0)));
}

}  // namespace q4f
