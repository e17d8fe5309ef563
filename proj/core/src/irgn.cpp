#include "birgn/irgn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "birgn/errors.hpp"

namespace birgn {

void StoppingConfig::validate() const {
  if (rule < 1 || rule > 3) throw std::invalid_argument("stopping: rule must be 1, 2 or 3");
  if (!(tau > 1.0)) throw std::invalid_argument("stopping: tau must exceed 1");
  if (max_outer < 0) throw std::invalid_argument("stopping: max_outer must be nonnegative");
}

std::optional<int> StoppingIndices::for_rule(int rule) const {
  switch (rule) {
    case 1: return n1;
    case 2: return n2;
    case 3: return n3;
    default: throw std::invalid_argument("stopping: rule must be 1, 2 or 3");
  }
}

StoppingIndices stopping_indices(const std::vector<double>& residuals, double tau, double delta) {
  if (residuals.empty()) throw std::invalid_argument("stopping_indices: empty residual sequence");
  if (!(tau > 1.0)) throw std::invalid_argument("stopping_indices: tau must exceed 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("stopping_indices: delta must be nonnegative");
  const double bound = tau * delta;
  const int count = static_cast<int>(residuals.size());
  auto r = [&](int n) { return residuals[static_cast<std::size_t>(n)]; };

  StoppingIndices out;
  for (int n = 0; n < count; ++n) {
    if (r(n) <= bound) {
      out.n1 = n;
      break;
    }
  }
  if (r(0) <= bound) {
    out.n2 = 0;
    out.n3 = 0;
    return out;
  }
  for (int n = 1; n < count; ++n) {
    if (0.5 * (r(n) + r(n - 1)) <= bound) {
      out.n2 = n;
      break;
    }
  }
  for (int n = 2; n < count; ++n) {
    if (std::max(r(n), r(n - 1)) <= bound) {
      out.n3 = n;
      break;
    }
  }
  return out;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::RuleSatisfied: return "rule-satisfied";
    case StopReason::MaxOuter: return "max_outer";
    case StopReason::InnerFailure: return "inner-failure";
  }
  return "?";
}

std::vector<double> RunResult::residuals() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.residual_norm);
  return out;
}

int RunResult::total_inner_iterations() const {
  int total = 0;
  for (const auto& r : records) total += r.inner_iterations;
  return total;
}

RunResult run(const ForwardOperator& op, const PenaltyFunctional& penalty, const Field& y_delta,
              double delta, const RegSchedule& schedule, const StoppingConfig& stop,
              const std::optional<Field>& truth, const RunOptions& options) {
  stop.validate();
  if (!(delta >= 0.0)) throw std::invalid_argument("run: delta must be nonnegative");
  if (!same_grid(y_delta.grid(), op.observation_grid())) {
    throw GridMismatch("run: data is not on the operator's observation grid");
  }
  if (!y_delta.all_finite()) throw InvalidField("run: data has non-finite values");
  if (truth && !same_grid(truth->grid(), op.parameter_grid())) {
    throw GridMismatch("run: truth is not on the parameter grid");
  }
  op.check_parameter(penalty.anchor());

  RunResult result;
  result.delta = delta;
  result.configured_rule = stop.rule;
  result.tau = stop.tau;

  Field x = penalty.anchor();
  std::vector<double> residuals;
  int inner_for_current = 0;

  for (int n = 0;; ++n) {
    std::unique_ptr<Linearization> lin;
    try {
      lin = op.linearize(x);
    } catch (const Error& e) {
      result.stop_reason = StopReason::InnerFailure;
      result.failure_message = e.what();
      break;
    }

    IterationRecord rec;
    rec.n = n;
    rec.alpha_n = schedule.alpha(n);
    rec.residual_norm = l2_norm(lin->state() - y_delta);
    rec.inner_iterations = inner_for_current;
    if (truth) rec.error_to_truth = l2_norm(x - *truth);
    result.records.push_back(rec);
    residuals.push_back(rec.residual_norm);

    result.indices = stopping_indices(residuals, stop.tau, delta);
    if (auto idx = result.indices.for_rule(stop.rule)) {
      result.stop_index = *idx;
      result.stop_reason = StopReason::RuleSatisfied;
      break;
    }
    if (n >= stop.max_outer) {
      result.stop_reason = StopReason::MaxOuter;
      break;
    }

    SubproblemSpec spec{*lin, y_delta, penalty, rec.alpha_n, options.residual_exponent, options.inner};
    try {
      MinimizeResult inner = minimize(spec);
      if (inner.nonconvergence_warning) result.inner_warnings.push_back(n);
      inner_for_current = inner.inner_iterations;
      x = op.clip_to_domain(inner.x);
    } catch (const Error& e) {
      result.stop_reason = StopReason::InnerFailure;
      result.failure_message = e.what();
      break;
    }
  }

  result.final_iterate = std::move(x);
  return result;
}

ScalingReport scaling_check(const ForwardOperator& op, const PenaltyFunctional& penalty,
                            const RegSchedule& schedule, double exponent, int power_iterations) {
  ScalingReport report;
  report.exponent = exponent;
  report.alpha0 = schedule.alpha0();
  const auto lin = op.linearize(penalty.anchor());
  report.norm_estimate = estimate_operator_norm(*lin, power_iterations);
  const double scaled = std::pow(report.norm_estimate, exponent);
  report.satisfied = scaled <= schedule.alpha0();
  if (!report.satisfied) report.suggested_alpha0 = scaled;
  return report;
}

}  // namespace birgn
