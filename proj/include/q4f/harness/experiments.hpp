#pragma once

#include <cstdint>

#include "q4f/harness/config.hpp"
#include "q4f/harness/report.hpp"
#include "q4f/rng.hpp"

namespace q4f::harness {

/// Thresholds used by the experiment checks.
namespace thresholds {
inline constexpr double kZ = 4.0;                     // |MC - reference| <= 4 stderr
inline constexpr double kEquivalenceCoverage = 0.95;  // share of profiles within kZ
inline constexpr double kMedianRelativeGap = 0.01;
inline constexpr double kFlagStd = 1e-9;        // residual std treated as identically zero
inline constexpr double kSeparationStd = 1e-3;  // every other exponent cell must exceed this
inline constexpr double kConcentrationRelative = 0.02;
inline constexpr double kOracleRelative = 0.002;  // symmetric formula vs 2n^2 - n
inline constexpr double kTermShare = 0.01;
inline constexpr double kSocialResidual = 1e-10;
inline constexpr double kFocResidual = 1e-8;
inline constexpr double kQfClosure = 1e-8;
inline constexpr double kGridStep = 1e-3;
}  // namespace thresholds

/// Contributions drawn log-uniformly on [lo, hi].
ContributionProfile random_profile(RngStream& rng, std::size_t n, double lo, double hi);

/// E||sum of n uniform unit complex phases||^4 = 2n^2 - n.
double exact_norm4_unit_phases_d2(std::size_t n);

ExperimentReport run_equivalence(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_exponent_grid(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_d_convergence(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_mc_validation(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_equilibrium(const ExperimentConfig& config, unsigned workers = 1);

/// Validates, dispatches on config.experiment and fills report metadata.
ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers = 1);

}  // namespace q4f::harness
