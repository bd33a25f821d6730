#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "q4f/equilibrium.hpp"
#include "q4f/mechanisms.hpp"

namespace q4f::harness {

enum class ExperimentKind { Equivalence, ExponentGrid, DConvergence, McValidation, Equilibrium };

std::string_view to_string(ExperimentKind kind) noexcept;
/// Throws ConfigError for unknown names.
ExperimentKind parse_experiment_kind(std::string_view name);

/// Optional overrides of the calibrated mechanism (b = 1, a = d/(d+2), r = q = 4).
struct ParamOverrides {
  std::optional<double> r;
  std::optional<double> q;
  std::optional<double> a;
  std::optional<double> b;

  friend bool operator==(const ParamOverrides&, const ParamOverrides&) = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Equivalence;
  std::uint64_t seed = 0;
  std::vector<int> dims;
  std::size_t n_agents = 50;
  std::size_t n_profiles = 100;
  std::size_t n_samples = 100000;
  ParamOverrides params;
  std::vector<ValuationSpec> valuations;
  std::string output_path;

  double contribution_min = 0.1;
  double contribution_max = 10.0;
  std::vector<double> exponents{2.0, 3.0, 4.0, 5.0, 6.0};  // exponent_grid
  std::vector<int> analytic_dims;                          // d_convergence, no Monte Carlo
  double dominant_weight = 30.0;                           // mc_validation

  /// Throws ConfigError on any violated constraint.
  void validate() const;

  /// Mechanism parameters for dimension d: calibrated defaults plus overrides.
  [[nodiscard]] MechanismParams params_for(int d) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict parse: unknown keys and wrong types are ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::string& path);

}  // namespace q4f::harness
