#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "birgn/field.hpp"
#include "birgn/forward.hpp"
#include "birgn/penalty.hpp"
#include "birgn/subproblem.hpp"

namespace birgn::cli {

/// A problem assembled from Field CSV files instead of a preset.
struct CustomProblem {
  /// reaction1d, reaction2d or diffusion1d.
  std::string op;
  std::string source;
  /// Field whose boundary nodes carry the Dirichlet data.
  std::string boundary;
  /// Exact parameter. Synthetic data F(truth) + noise is generated from it
  /// unless `data` is given.
  std::string truth;
  /// Observed data used as-is (no noise is added).
  std::string data;
  double initial_guess = 0.0;
  double lower_bound = -1.0;
};

struct RunConfig {
  std::string preset;
  int subdivisions = 0;
  std::optional<CustomProblem> custom;

  PenaltyKind penalty = PenaltyKind::SquaredL2;
  double lambda = 0.01;
  double epsilon = 1e-6;
  double p_exponent = 2.0;
  /// Constant anchor x0; when empty the problem's initial guess is used.
  std::optional<double> anchor;

  double alpha0 = 1.0;
  double ratio = 0.5;
  int rule = 1;
  double tau = 1.05;
  int max_outer = 60;

  double delta = 1e-4;
  std::uint64_t seed = 1;

  double residual_exponent = 2.0;
  InnerControls inner;

  std::string output = "birgn-out";
};

/// Defaults for a preset (or the generic defaults for an empty name) as JSON.
nlohmann::json preset_defaults(const std::string& preset);

/// Accepts either a bare config document or a meta.json (config under "config").
nlohmann::json unwrap_config(const nlohmann::json& doc);

/// Merges defaults <- file <- flags, each as a JSON merge patch.
nlohmann::json resolve_config(const nlohmann::json& file_doc, const nlohmann::json& flag_doc);

/// Converts a resolved document; type errors and unknown keys are appended to
/// `violations` and leave the affected field at its default.
RunConfig config_from_json(const nlohmann::json& doc, std::vector<std::string>& violations);

nlohmann::json config_to_json(const RunConfig& config);

/// Checks every field against the preconditions of the modules that use it.
/// Returns one message per violation.
std::vector<std::string> validate(const RunConfig& config);

/// Forward operator, truth, initial guess and the data the run inverts.
struct Experiment {
  std::string name;
  std::shared_ptr<const ForwardOperator> op;
  std::optional<Field> truth;
  Field initial_guess;
  Field data;
};

/// Builds the operator and data; noise is added with (delta, seed) unless the
/// custom problem provides observed data or delta is 0.
Experiment build_experiment(const RunConfig& config);

PenaltyFunctional build_penalty(const RunConfig& config, const Experiment& experiment);

}  // namespace birgn::cli
