#include "q4f/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "q4f/analytics.hpp"
#include "q4f/numerics.hpp"

namespace q4f {
namespace {

double aggregate_marginal(std::span<const ValuationSpec> valuations, double funding) {
  CompensatedSum<double> sum;
  for (const auto& spec : valuations) {
    if (funding == 0.0 && spec.family == ValuationFamily::Power) {
      return std::numeric_limits<double>::infinity();
    }
    sum += marginal_valuation(spec, funding);
  }
  return sum.value();
}

void check_agent_count(std::span<const ValuationSpec> valuations, const ContributionProfile& profile) {
  if (valuations.size() != static_cast<std::size_t>(profile.size())) {
    throw Error(ErrorCode::ShapeMismatch, "one valuation per contribution is required");
  }
}

void check_foc_inputs(const ContributionProfile& profile, const MechanismParams& params) {
  params.validate();
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    if (profile.contributions()[i] < kMinFocContribution) {
      throw Error(ErrorCode::SingularFOC, "contribution " + std::to_string(i) + " is (near) zero");
    }
  }
}

}  // namespace

ValuationSpec ValuationSpec::linear_saturating(double v, double s) {
  ValuationSpec spec{ValuationFamily::LinearSaturating, v, s, 0.5};
  spec.validate();
  return spec;
}

ValuationSpec ValuationSpec::power(double v, double alpha) {
  ValuationSpec spec{ValuationFamily::Power, v, 1.0, alpha};
  spec.validate();
  return spec;
}

void ValuationSpec::validate() const {
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "valuation scale v must be positive");
  switch (family) {
    case ValuationFamily::LinearSaturating:
      if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "saturation s must be positive");
      break;
    case ValuationFamily::Power:
      if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
      break;
  }
}

double valuation(const ValuationSpec& spec, double funding) {
  if (!(funding >= 0.0)) throw Error(ErrorCode::InvalidArgument, "funding must be >= 0");
  switch (spec.family) {
    case ValuationFamily::LinearSaturating:
      return spec.v * spec.s * std::log1p(funding / spec.s);
    case ValuationFamily::Power:
      return funding == 0.0 ? 0.0 : spec.v * std::pow(funding, spec.alpha);
  }
  return 0.0;
}

double marginal_valuation(const ValuationSpec& spec, double funding) {
  if (!(funding >= 0.0)) throw Error(ErrorCode::InvalidArgument, "funding must be >= 0");
  switch (spec.family) {
    case ValuationFamily::LinearSaturating:
      return spec.v / (1.0 + funding / spec.s);
    case ValuationFamily::Power:
      if (funding == 0.0) throw Error(ErrorCode::SingularMarginal, "power valuation has V'(0) = inf");
      return spec.v * spec.alpha * std::pow(funding, spec.alpha - 1.0);
  }
  return 0.0;
}

double utility(const ValuationSpec& spec, double funding, double contribution) {
  if (!(contribution >= 0.0)) throw Error(ErrorCode::NegativeContribution, "contribution must be >= 0");
  return valuation(spec, funding) - contribution;
}

double welfare(std::span<const ValuationSpec> valuations, double funding) {
  CompensatedSum<double> w;
  for (const auto& spec : valuations) w += valuation(spec, funding);
  w += -funding;
  return w.value();
}

double welfare(std::span<const std::vector<ValuationSpec>> valuations, std::span<const double> funding) {
  if (valuations.size() != funding.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one funding level per project is required");
  }
  CompensatedSum<double> w;
  for (std::size_t p = 0; p < funding.size(); ++p) w += welfare(valuations[p], funding[p]);
  return w.value();
}

double solve_social_optimum(std::span<const ValuationSpec> valuations, const BisectionConfig& config) {
  if (valuations.empty()) throw Error(ErrorCode::NoPositiveOptimum, "no agents");
  for (const auto& spec : valuations) spec.validate();
  auto residual = [&](double f) { return aggregate_marginal(valuations, f) - 1.0; };

  if (!(residual(0.0) > 0.0)) {
    throw Error(ErrorCode::NoPositiveOptimum, "sum of marginal valuations at zero funding is <= 1");
  }

  double lo = 0.0;
  double hi = config.initial_upper;
  double f_hi = residual(hi);
  for (int k = 0; k < config.max_doublings && f_hi > 0.0; ++k) {
    lo = hi;
    hi *= 2.0;
    f_hi = residual(hi);
  }
  if (f_hi > 0.0) {
    throw Error(ErrorCode::SolverFailure, "no sign change below F = " + std::to_string(hi));
  }
  if (std::abs(f_hi) <= config.tolerance) return hi;

  double best = hi;
  double best_abs = std::abs(f_hi);
  for (int it = 0; it < config.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = residual(mid);
    if (std::abs(f_mid) < best_abs) {
      best = mid;
      best_abs = std::abs(f_mid);
    }
    if (best_abs <= config.tolerance) return best;
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorCode::SolverFailure, "bisection did not reach the residual tolerance");
}

EquilibriumResult equilibrium_contributions(std::span<const ValuationSpec> valuations) {
  EquilibriumResult result;
  result.funding = solve_social_optimum(valuations);
  const double f_star = result.funding;

  result.contributions.reserve(valuations.size());
  for (const auto& spec : valuations) {
    const double m = marginal_valuation(spec, f_star);
    result.contributions.push_back(m * m * f_star);
  }

  const Eigen::Map<const Eigen::VectorXd> c(result.contributions.data(),
                                            static_cast<Eigen::Index>(result.contributions.size()));
  const double realized = qf_funding(c);
  if (!(std::abs(realized - f_star) <= 1e-8 * f_star)) {
    throw Error(ErrorCode::SolverFailure, "QF of equilibrium contributions does not reproduce F*");
  }

  result.social_residual = aggregate_marginal(valuations, f_star) - 1.0;
  // QF first-order condition: V_i'(F) dF/dc_i = V_i'(F) sqrt(F) / sqrt(c_i) = 1
  const double root = std::sqrt(realized);
  for (std::size_t i = 0; i < valuations.size(); ++i) {
    const double dfdc = root / std::sqrt(result.contributions[i]);
    result.foc_residuals.push_back(marginal_valuation(valuations[i], realized) * dfdc - 1.0);
  }
  return result;
}

std::vector<double> foc_residual(std::span<const ValuationSpec> valuations,
                                 const ContributionProfile& profile, const MechanismParams& params) {
  check_agent_count(valuations, profile);
  check_foc_inputs(profile, params);
  const double expected = expected_funding_symmetric(profile, params);
  const Eigen::VectorXd grad = expected_funding_gradient(profile, params);
  std::vector<double> residuals(valuations.size());
  for (std::size_t i = 0; i < valuations.size(); ++i) {
    residuals[i] = marginal_valuation(valuations[i], expected) * grad[static_cast<Eigen::Index>(i)] - 1.0;
  }
  return residuals;
}

double gradient_fd_gap(const ContributionProfile& profile, const MechanismParams& params,
                       double relative_step) {
  check_foc_inputs(profile, params);
  const Eigen::VectorXd analytic = expected_funding_gradient(profile, params);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    const double step = relative_step * profile.contributions()[i];
    Eigen::VectorXd up = profile.contributions();
    Eigen::VectorXd down = profile.contributions();
    up[i] += step;
    down[i] -= step;
    const double fd = (expected_funding_symmetric(ContributionProfile(up), params) -
                       expected_funding_symmetric(ContributionProfile(down), params)) /
                      (up[i] - down[i]);
    worst = std::max(worst, std::abs(fd - analytic[i]) / std::abs(analytic[i]));
  }
  return worst;
}

double social_optimality_residual(const ContributionProfile& profile, const MechanismParams& params) {
  check_foc_inputs(profile, params);
  if (params.r != 4.0) throw Error(ErrorCode::UnsupportedExponent, "substituted condition needs r = 4");
  const Eigen::VectorXd h = weights(profile.contributions(), params);
  const double sum_h2 = h.squaredNorm();
  const double d = params.d;
  CompensatedSum<double> total;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double hh = weight_derivative(profile.contributions()[i], params) * h[i];
    total += (d / (4.0 * (d + 2.0))) / (params.a * hh * sum_h2);
  }
  return total.value() - 1.0;
}

double social_optimality_residual_gaussian(const ContributionProfile& profile,
                                           const MechanismParams& params) {
  check_foc_inputs(profile, params);
  const Eigen::VectorXd h = weights(profile.contributions(), params);
  const double sum_h2 = h.squaredNorm();
  // E F = a C (sum h^2)^(r/2) with C = E[R^r | sigma = 1] / d^(r/2)
  const double c_dr = radial_moment(params.r, RadialModel{1.0, params.d}) / std::pow(params.d, 0.5 * params.r);
  const double outer = params.a * c_dr * params.r * std::pow(sum_h2, 0.5 * params.r - 1.0);
  CompensatedSum<double> total;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    total += 1.0 / (outer * weight_derivative(profile.contributions()[i], params) * h[i]);
  }
  return total.value() - 1.0;
}

}  // namespace q4f
