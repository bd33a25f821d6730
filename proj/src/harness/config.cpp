#include "q4f/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "q4f/errors.hpp"

namespace q4f::harness {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_field(const json& obj, const std::string& key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error("field '" + key + "': " + e.what());
  }
}

std::size_t get_count(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    config_error("field '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

ValuationSpec valuation_from_json(const json& obj) {
  if (!obj.is_object()) config_error("valuation entries must be objects");
  const auto family = get_field<std::string>(obj, "family");
  if (family == "LinearSaturating") {
    reject_unknown_keys(obj, {"family", "v", "s"}, "LinearSaturating valuation");
    return ValuationSpec{ValuationFamily::LinearSaturating, get_field<double>(obj, "v"),
                         get_field<double>(obj, "s"), 0.5};
  }
  if (family == "Power") {
    reject_unknown_keys(obj, {"family", "v", "alpha"}, "Power valuation");
    return ValuationSpec{ValuationFamily::Power, get_field<double>(obj, "v"), 1.0,
                         get_field<double>(obj, "alpha")};
  }
  config_error("unknown valuation family '" + family + "'");
}

json valuation_to_json(const ValuationSpec& spec) {
  if (spec.family == ValuationFamily::LinearSaturating) {
    return {{"family", "LinearSaturating"}, {"v", spec.v}, {"s", spec.s}};
  }
  return {{"family", "Power"}, {"v", spec.v}, {"alpha", spec.alpha}};
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Equivalence: return "equivalence";
    case ExperimentKind::ExponentGrid: return "exponent_grid";
    case ExperimentKind::DConvergence: return "d_convergence";
    case ExperimentKind::McValidation: return "mc_validation";
    case ExperimentKind::Equilibrium: return "equilibrium";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto kind : {ExperimentKind::Equivalence, ExperimentKind::ExponentGrid, ExperimentKind::DConvergence,
                    ExperimentKind::McValidation, ExperimentKind::Equilibrium}) {
    if (to_string(kind) == name) return kind;
  }
  config_error("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (dims.empty()) config_error("dims must be non-empty");
  for (int d : dims) {
    if (d < 1) config_error("dims entries must be >= 1");
  }
  for (int d : analytic_dims) {
    if (d < 1) config_error("analytic_dims entries must be >= 1");
  }
  if (n_agents < 1 || n_profiles < 1 || n_samples < 1) config_error("all counts must be >= 1");
  if (!(contribution_min > 0.0) || !(contribution_max >= contribution_min)) {
    config_error("contribution range must satisfy 0 < min <= max");
  }
  for (auto v : {params.r, params.q, params.a, params.b}) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) config_error("params overrides must be positive");
  }
  if (exponents.empty()) config_error("exponents must be non-empty");
  for (double e : exponents) {
    if (!(e > 0.0)) config_error("exponents must be positive");
  }
  if (!(dominant_weight > 0.0)) config_error("dominant_weight must be positive");

  switch (experiment) {
    case ExperimentKind::Equivalence:
      for (int d : dims) {
        if (!params_for(d).calibrated()) config_error("equivalence needs calibrated params for every d");
      }
      break;
    case ExperimentKind::ExponentGrid:
      if (n_agents < 2) config_error("exponent_grid needs n_agents >= 2");
      break;
    case ExperimentKind::McValidation:
      if (n_agents < 2) config_error("mc_validation needs n_agents >= 2");
      break;
    case ExperimentKind::Equilibrium:
      if (valuations.empty()) config_error("equilibrium needs at least one valuation");
      for (const auto& spec : valuations) {
        try {
          spec.validate();
        } catch (const Error& e) {
          config_error(e.what());
        }
      }
      break;
    case ExperimentKind::DConvergence:
      if (params_for(1).r != 4.0) config_error("d_convergence needs r = 4");
      break;
  }
}

MechanismParams ExperimentConfig::params_for(int d) const {
  MechanismParams p;
  p.d = d;
  p.b = params.b.value_or(1.0);
  p.r = params.r.value_or(4.0);
  p.q = params.q.value_or(4.0);
  p.a = params.a.value_or((static_cast<double>(d) / (d + 2.0)) / std::pow(p.b, 4));
  return p;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) config_error("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"experiment", "seed", "dims", "n_agents", "n_profiles", "n_samples", "params",
                       "valuations", "output_path", "contribution_range", "exponents", "analytic_dims",
                       "dominant_weight"},
                      "config");
  for (const char* key : {"experiment", "seed", "dims", "n_agents", "n_profiles", "n_samples"}) {
    if (!doc.contains(key)) config_error(std::string("missing required field '") + key + "'");
  }

  ExperimentConfig cfg;
  cfg.experiment = parse_experiment_kind(get_field<std::string>(doc, "experiment"));
  const json& seed = doc.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    config_error("seed must be a non-negative integer");
  }
  cfg.seed = seed.get<std::uint64_t>();
  cfg.dims = get_field<std::vector<int>>(doc, "dims");
  cfg.n_agents = get_count(doc, "n_agents");
  cfg.n_profiles = get_count(doc, "n_profiles");
  cfg.n_samples = get_count(doc, "n_samples");

  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) config_error("params must be an object");
    reject_unknown_keys(p, {"r", "q", "a", "b"}, "params");
    if (p.contains("r")) cfg.params.r = get_field<double>(p, "r");
    if (p.contains("q")) cfg.params.q = get_field<double>(p, "q");
    if (p.contains("a")) cfg.params.a = get_field<double>(p, "a");
    if (p.contains("b")) cfg.params.b = get_field<double>(p, "b");
  }
  if (doc.contains("valuations")) {
    const json& vs = doc.at("valuations");
    if (!vs.is_array()) config_error("valuations must be an array");
    for (const auto& v : vs) cfg.valuations.push_back(valuation_from_json(v));
  }
  if (doc.contains("output_path")) cfg.output_path = get_field<std::string>(doc, "output_path");
  if (doc.contains("contribution_range")) {
    const auto range = get_field<std::vector<double>>(doc, "contribution_range");
    if (range.size() != 2) config_error("contribution_range must be [min, max]");
    cfg.contribution_min = range[0];
    cfg.contribution_max = range[1];
  }
  if (doc.contains("exponents")) cfg.exponents = get_field<std::vector<double>>(doc, "exponents");
  if (doc.contains("analytic_dims")) cfg.analytic_dims = get_field<std::vector<int>>(doc, "analytic_dims");
  if (doc.contains("dominant_weight")) cfg.dominant_weight = get_field<double>(doc, "dominant_weight");

  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["experiment"] = std::string(to_string(cfg.experiment));
  doc["seed"] = cfg.seed;
  doc["dims"] = cfg.dims;
  doc["n_agents"] = cfg.n_agents;
  doc["n_profiles"] = cfg.n_profiles;
  doc["n_samples"] = cfg.n_samples;
  json params = json::object();
  if (cfg.params.r) params["r"] = *cfg.params.r;
  if (cfg.params.q) params["q"] = *cfg.params.q;
  if (cfg.params.a) params["a"] = *cfg.params.a;
  if (cfg.params.b) params["b"] = *cfg.params.b;
  doc["params"] = params;
  doc["valuations"] = json::array();
  for (const auto& v : cfg.valuations) doc["valuations"].push_back(valuation_to_json(v));
  doc["output_path"] = cfg.output_path;
  doc["contribution_range"] = {cfg.contribution_min, cfg.contribution_max};
  doc["exponents"] = cfg.exponents;
  doc["analytic_dims"] = cfg.analytic_dims;
  doc["dominant_weight"] = cfg.dominant_weight;
  return doc;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(doc);
}

}  // namespace q4f::harness
