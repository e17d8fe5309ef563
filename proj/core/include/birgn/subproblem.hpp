#pragma once

#include "birgn/field.hpp"
#include "birgn/forward.hpp"
#include "birgn/penalty.hpp"

namespace birgn {

/// Controls for the restarted nonlinear conjugate-gradient inner solver.
struct InnerControls {
  int max_iter = 500;
  double grad_tol_rel = 1e-8;
  int restart_period = 50;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  /// Precondition with the penalty curvature model plus a multiple of the
  /// identity sized to the data term.
  bool precondition = true;
  double precondition_shift = 1e-4;
};

/// Gauss-Newton subproblem at the iterate x_n:
///
///   G(x) = ||y - F(x_n) - T (x - x_n)||^p + alpha * (Theta(x) - Theta(x0) - <xi0, x - x0>)
///
/// with T = F'(x_n) from `linearization`, Theta, x0, xi0 from `penalty`.
/// Gradients are L2 (Riesz) gradients: G'(x)h = inner(gradient, h).
struct SubproblemSpec {
  const Linearization& linearization;
  const Field& y_delta;
  const PenaltyFunctional& penalty;
  double alpha;
  double residual_exponent = 2.0;
  InnerControls controls = {};

  const Field& iterate() const noexcept { return linearization.base(); }
  /// Throws std::invalid_argument on an invalid spec.
  void validate() const;
};

struct ObjectiveAndGradient {
  double value;
  Field gradient;
};

ObjectiveAndGradient objective_and_gradient(const SubproblemSpec& spec, const Field& x);

struct MinimizeResult {
  Field x;
  int inner_iterations = 0;
  double objective = 0.0;
  double initial_gradient_norm = 0.0;
  double final_gradient_norm = 0.0;
  bool converged = false;
  /// Set when max_iter was reached with the gradient above 1e3 times the target.
  bool nonconvergence_warning = false;
};

/// Polak-Ribiere-plus nonlinear CG with Armijo backtracking, warm-started at
/// x_n. Restarts to steepest descent every restart_period iterations and
/// whenever the direction fails the descent test.
MinimizeResult minimize(const SubproblemSpec& spec);

/// Direct solve of the quadratic case (p = 2, SquaredL2 penalty): assembles T
/// column by column from tangent probes and solves the weighted normal
/// equations. Throws UnsupportedOracle outside that scope or above 200 unknowns.
Field dense_oracle(const SubproblemSpec& spec);

}  // namespace birgn
