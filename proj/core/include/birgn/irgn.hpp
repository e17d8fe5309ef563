#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "birgn/field.hpp"
#include "birgn/forward.hpp"
#include "birgn/penalty.hpp"
#include "birgn/schedule.hpp"
#include "birgn/subproblem.hpp"

namespace birgn {

/// Which a-posteriori rule ends the outer iteration.
///   1: first n with r_n <= tau*delta (discrepancy principle)
///   2: n = 0 if r_0 <= tau*delta, else first n >= 1 with (r_n + r_{n-1})/2 <= tau*delta
///   3: n = 0 if r_0 <= tau*delta, else first n >= 2 with max(r_n, r_{n-1}) <= tau*delta
struct StoppingConfig {
  int rule = 1;
  double tau = 1.05;
  int max_outer = 60;

  void validate() const;
};

/// Stopping indices of the three rules over one residual sequence; an index
/// is empty when the sequence ends before the rule is satisfied.
struct StoppingIndices {
  std::optional<int> n1;
  std::optional<int> n2;
  std::optional<int> n3;

  std::optional<int> for_rule(int rule) const;
  bool operator==(const StoppingIndices&) const = default;
};

StoppingIndices stopping_indices(const std::vector<double>& residuals, double tau, double delta);

enum class StopReason { RuleSatisfied, MaxOuter, InnerFailure };
std::string_view to_string(StopReason reason);

struct RunResult {
  std::vector<IterationRecord> records;
  StoppingIndices indices;
  /// n_delta of the configured rule when it was satisfied.
  std::optional<int> stop_index;
  StopReason stop_reason = StopReason::MaxOuter;
  Field final_iterate;
  double delta = 0.0;
  int configured_rule = 1;
  double tau = 1.05;
  /// Outer indices n whose subproblem hit max_iter with a large gradient.
  std::vector<int> inner_warnings;
  std::string failure_message;

  std::vector<double> residuals() const;
  int total_inner_iterations() const;
};

struct RunOptions {
  double residual_exponent = 2.0;
  InnerControls inner = {};
};

/// Iteratively regularized Gauss-Newton iteration started at the penalty anchor.
///
/// Each step minimizes the convex subproblem at alpha_n, warm-started at x_n,
/// then clips the minimizer to the operator's domain. All three stopping
/// indices are recorded; the configured rule decides when to stop.
RunResult run(const ForwardOperator& op, const PenaltyFunctional& penalty, const Field& y_delta,
              double delta, const RegSchedule& schedule, const StoppingConfig& stop,
              const std::optional<Field>& truth = std::nullopt, const RunOptions& options = {});

struct ScalingReport {
  double norm_estimate = 0.0;
  double exponent = 2.0;
  double alpha0 = 1.0;
  bool satisfied = true;
  std::optional<double> suggested_alpha0;
};

/// Advisory check of ||F'(x0)||^p <= alpha0 (convexity constant taken as 1).
ScalingReport scaling_check(const ForwardOperator& op, const PenaltyFunctional& penalty,
                            const RegSchedule& schedule, double exponent = 2.0,
                            int power_iterations = 50);

}  // namespace birgn
