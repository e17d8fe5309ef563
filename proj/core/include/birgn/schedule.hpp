#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace birgn {

/// Geometric regularization schedule alpha_n = alpha0 * ratio^n.
///
/// The ratio bound theta = 1/ratio governs 1 <= alpha_n / alpha_{n+1} <= theta.
class RegSchedule {
 public:
  RegSchedule() = default;
  RegSchedule(double alpha0, double ratio) : alpha0_(alpha0), ratio_(ratio) {
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
      throw std::invalid_argument("schedule: alpha0 must be positive");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
      throw std::invalid_argument("schedule: ratio must lie in (0,1)");
    }
  }

  double alpha0() const noexcept { return alpha0_; }
  double ratio() const noexcept { return ratio_; }
  double theta() const noexcept { return 1.0 / ratio_; }

  /// Exact in binary for ratio = 1/2.
  double alpha(int n) const {
    if (n < 0) throw std::invalid_argument("schedule: negative index");
    return alpha0_ * std::pow(ratio_, n);
  }

 private:
  double alpha0_ = 1.0;
  double ratio_ = 0.5;
};

/// Per-outer-iteration diagnostics.
struct IterationRecord {
  int n = 0;
  double alpha_n = 0.0;
  double residual_norm = 0.0;
  /// Inner CG iterations spent producing this iterate (0 for the initial guess).
  int inner_iterations = 0;
  std::optional<double> error_to_truth;

  bool operator==(const IterationRecord&) const = default;
};

}  // namespace birgn
