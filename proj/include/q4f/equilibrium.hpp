#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "q4f/mechanisms.hpp"

namespace q4f {

enum class ValuationFamily { LinearSaturating, Power };

/// Concave valuation V(F) with strictly decreasing V'(F) > 0.
///
/// LinearSaturating: V = v s ln(1 + F/s), V' = v / (1 + F/s).
/// Power:            V = v F^alpha,        V' = v alpha F^(alpha-1), alpha in (0, 1).
struct ValuationSpec {
  ValuationFamily family = ValuationFamily::LinearSaturating;
  double v = 1.0;
  double s = 1.0;      // LinearSaturating only
  double alpha = 0.5;  // Power only

  static ValuationSpec linear_saturating(double v, double s);
  static ValuationSpec power(double v, double alpha);

  /// Throws InvalidArgument when the family's parameters are out of range.
  void validate() const;

  friend bool operator==(const ValuationSpec&, const ValuationSpec&) = default;
};

struct EquilibriumResult {
  double funding = 0.0;
  std::vector<double> contributions;
  double social_residual = 0.0;
  std::vector<double> foc_residuals;
};

double valuation(const ValuationSpec& spec, double funding);

/// V'(F). Throws SingularMarginal for the Power family at F = 0.
double marginal_valuation(const ValuationSpec& spec, double funding);

/// V(F) - c.
double utility(const ValuationSpec& spec, double funding, double contribution);

/// sum_p (sum_i V_i^p(F^p) - F^p). One valuation list per project.
double welfare(std::span<const std::vector<ValuationSpec>> valuations, std::span<const double> funding);

/// Single-project welfare sum_i V_i(F) - F.
double welfare(std::span<const ValuationSpec> valuations, double funding);

/// Bracketing and bisection settings for solve_social_optimum.
struct BisectionConfig {
  double initial_upper = 1.0;
  int max_doublings = 10;
  int max_iterations = 200;
  double tolerance = 1e-10;
};

/// Unique F* with sum_i V_i'(F*) = 1.
/// Throws NoPositiveOptimum if sum_i V_i'(0) <= 1, SolverFailure if no bracket is found.
double solve_social_optimum(std::span<const ValuationSpec> valuations, const BisectionConfig& config = {});

/// F* together with c_i = V_i'(F*)^2 F*, the contributions that satisfy every
/// individual first-order condition under QF (and calibrated Q4F in expectation).
EquilibriumResult equilibrium_contributions(std::span<const ValuationSpec> valuations);

/// Per-agent V_i'(E F) (4(d+2)/d) a h'(c_i) h(c_i) sum_j h(c_j)^2 - 1, with E F
/// from expected_funding_symmetric. Throws SingularFOC on (near-)zero contributions.
std::vector<double> foc_residual(std::span<const ValuationSpec> valuations,
                                 const ContributionProfile& profile, const MechanismParams& params);

/// Largest relative gap between expected_funding_gradient and a central finite
/// difference of expected_funding_symmetric.
double gradient_fd_gap(const ContributionProfile& profile, const MechanismParams& params,
                       double relative_step = 1e-6);

/// sum_i (d / (4(d+2))) / (a h'(c_i) h(c_i) sum_j h(c_j)^2) - 1: the social
/// optimality condition with each V_i' replaced through its own first-order
/// condition. Quartic lever only.
double social_optimality_residual(const ContributionProfile& profile, const MechanismParams& params);

/// Same substitution for any lever exponent r, with the expected funding taken
/// from the Gaussian radial model: E F = a E[R^r], sigma^2 = sum h^2 / d.
/// Coincides with social_optimality_residual at r = 4.
double social_optimality_residual_gaussian(const ContributionProfile& profile,
                                           const MechanismParams& params);

}  // namespace q4f
