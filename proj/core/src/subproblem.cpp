#include "birgn/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/SparseCholesky>
#include <stdexcept>
#include <string>

#include "birgn/errors.hpp"

namespace birgn {

void SubproblemSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("subproblem: alpha must be positive");
  if (!(residual_exponent >= 1.0)) throw std::invalid_argument("subproblem: residual exponent must be >= 1");
  if (controls.max_iter < 0 || !(controls.grad_tol_rel > 0.0) || controls.restart_period < 1 ||
      !(controls.armijo_c1 > 0.0 && controls.armijo_c1 < 1.0) ||
      !(controls.backtrack > 0.0 && controls.backtrack < 1.0) || !(controls.initial_step > 0.0) ||
      !(controls.precondition_shift >= 0.0)) {
    throw std::invalid_argument("subproblem: invalid inner-solver controls");
  }
  require_same_grid(y_delta, linearization.state(), "subproblem data");
  require_same_grid(iterate(), penalty.anchor(), "subproblem penalty");
}

namespace {

// d/dr ||r||^p = p ||r||^(p-2) r; the factor is taken as 0 at r = 0.
double residual_power_factor(double norm, double p) {
  if (norm == 0.0) return 0.0;
  return p * std::pow(norm, p - 2.0);
}

class SubproblemEvaluator {
 public:
  explicit SubproblemEvaluator(const SubproblemSpec& spec) : spec_(spec) {}

  Field residual(const Field& x) const {
    Field r = spec_.y_delta - spec_.linearization.state();
    r -= spec_.linearization.tangent(x - spec_.iterate());
    return r;
  }

  double value(const Field& x, const Field& r) const {
    const double v = std::pow(l2_norm(r), spec_.residual_exponent) +
                     spec_.alpha * spec_.penalty.anchored_value(x);
    if (!std::isfinite(v)) throw DivergedEvaluation("subproblem objective is not finite");
    return v;
  }

  Field gradient(const Field& x, const Field& r) const {
    Field g = spec_.penalty.riesz_gradient(x);
    g -= spec_.penalty.xi0();
    g *= spec_.alpha;
    const double factor = residual_power_factor(l2_norm(r), spec_.residual_exponent);
    if (factor != 0.0) g.axpy(-factor, spec_.linearization.adjoint(r));
    if (!g.all_finite()) throw DivergedEvaluation("subproblem gradient is not finite");
    return g;
  }

  // phi(s) = G(x + s d) given r and q = T d.
  double line_value(const Field& x, const Field& d, const Field& r, const Field& q, double s) const {
    Field xs = x;
    xs.axpy(s, d);
    Field rs = r;
    rs.axpy(-s, q);
    return value(xs, rs);
  }

  double line_slope(const Field& x, const Field& d, const Field& r, const Field& q, double s) const {
    Field xs = x;
    xs.axpy(s, d);
    Field rs = r;
    rs.axpy(-s, q);
    const double factor = residual_power_factor(l2_norm(rs), spec_.residual_exponent);
    const Field pen_grad = spec_.penalty.gradient(xs);
    const double pen_slope = pen_grad.values().dot(d.values()) - inner(spec_.penalty.xi0(), d);
    return -factor * inner(rs, q) + spec_.alpha * pen_slope;
  }

 private:
  const SubproblemSpec& spec_;
};

// Root of the nondecreasing line slope on s > 0 (the objective is convex along
// the line). Returns a step that is then safeguarded by Armijo backtracking.
double trial_step(const SubproblemEvaluator& ev, const Field& x, const Field& d, const Field& r,
                  const Field& q, double slope0, double initial_step) {
  double lo = 0.0, dlo = slope0;
  double hi = initial_step;
  double dhi = ev.line_slope(x, d, r, q, hi);
  for (int k = 0; k < 80 && dhi < 0.0; ++k) {
    lo = hi;
    dlo = dhi;
    hi *= 2.0;
    dhi = ev.line_slope(x, d, r, q, hi);
  }
  if (dhi < 0.0) return hi;

  const double target = 1e-12 * std::abs(slope0);
  int side = 0;
  double s = hi;
  for (int k = 0; k < 100; ++k) {
    s = (lo * dhi - hi * dlo) / (dhi - dlo);
    if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
    const double ds = ev.line_slope(x, d, r, q, s);
    if (std::abs(ds) <= target || hi - lo <= 1e-15 * hi) break;
    // Illinois modification of regula falsi.
    if (ds < 0.0) {
      lo = s;
      dlo = ds;
      if (side == -1) dhi *= 0.5;
      side = -1;
    } else {
      hi = s;
      dhi = ds;
      if (side == 1) dlo *= 0.5;
      side = 1;
    }
  }
  return s;
}

// z = M^-1 W g for the nodal model M = alpha * curvature(x) + shift * W, so
// that the direction -z is a Newton-like step for the penalty part.
class Preconditioner {
 public:
  Preconditioner(const PenaltyFunctional& penalty, double alpha, double shift)
      : penalty_(penalty), alpha_(alpha), shift_(shift) {}

  void refresh(const Field& x) {
    const auto& w = x.grid()->weights();
    Eigen::SparseMatrix<double> m = penalty_.curvature(x) * alpha_;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      m.coeffRef(ii, ii) += shift_ * w[i];
    }
    if (!analysed_) {
      solver_.analyzePattern(m);
      analysed_ = true;
    }
    solver_.factorize(m);
    ok_ = solver_.info() == Eigen::Success;
  }

  Field apply(const Field& g) const {
    if (!ok_) return g;
    const auto& w = g.grid()->weights();
    Eigen::VectorXd rhs = g.values();
    for (std::size_t i = 0; i < w.size(); ++i) rhs[static_cast<Eigen::Index>(i)] *= w[i];
    Field z(g.grid(), solver_.solve(rhs));
    return z.all_finite() ? z : g;
  }

 private:
  const PenaltyFunctional& penalty_;
  double alpha_;
  double shift_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool analysed_ = false;
  bool ok_ = false;
};

}  // namespace

ObjectiveAndGradient objective_and_gradient(const SubproblemSpec& spec, const Field& x) {
  spec.validate();
  require_same_grid(x, spec.iterate(), "subproblem objective");
  SubproblemEvaluator ev(spec);
  const Field r = ev.residual(x);
  return {ev.value(x, r), ev.gradient(x, r)};
}

MinimizeResult minimize(const SubproblemSpec& spec) {
  spec.validate();
  const auto& ctl = spec.controls;
  SubproblemEvaluator ev(spec);

  MinimizeResult out;
  Field x = spec.iterate();
  Field r = spec.y_delta - spec.linearization.state();
  double f = ev.value(x, r);
  Field g = ev.gradient(x, r);
  const double g0 = l2_norm(g);
  const double target = ctl.grad_tol_rel * g0;
  out.initial_gradient_norm = g0;

  std::optional<Preconditioner> precond;
  if (ctl.precondition && g0 > target) {
    const double t_norm = estimate_operator_norm(spec.linearization, 20);
    const double data_scale = residual_power_factor(l2_norm(r), spec.residual_exponent) * t_norm * t_norm;
    const double shift = std::max(ctl.precondition_shift * data_scale, 1e-10 * spec.alpha);
    precond.emplace(spec.penalty, spec.alpha, shift);
    precond->refresh(x);
  }
  auto apply_precond = [&](const Field& grad) { return precond ? precond->apply(grad) : grad; };

  double gnorm = g0;
  Field z = apply_precond(g);
  double gz = inner(g, z);
  Field d = -z;
  int k = 0;
  bool steepest = true;
  while (gnorm > target) {
    if (k >= ctl.max_iter) break;

    double slope0 = inner(g, d);
    if (!(slope0 < 0.0)) {
      d = -z;
      steepest = true;
      slope0 = -gz;
      if (!(slope0 < 0.0)) {
        z = g;
        gz = gnorm * gnorm;
        d = -g;
        slope0 = -gz;
      }
    }
    const Field q = spec.linearization.tangent(d);

    double s = trial_step(ev, x, d, r, q, slope0, ctl.initial_step);
    double fs = ev.line_value(x, d, r, q, s);
    int backtracks = 0;
    while (!(fs <= f + ctl.armijo_c1 * s * slope0) && backtracks < 60) {
      s *= ctl.backtrack;
      fs = ev.line_value(x, d, r, q, s);
      ++backtracks;
    }
    if (!(fs <= f + ctl.armijo_c1 * s * slope0)) {
      if (!steepest) {
        d = -z;
        steepest = true;
        continue;
      }
      break;  // no decrease possible at working precision
    }
    if (fs > f) throw std::logic_error("subproblem: accepted step increased the objective");

    x.axpy(s, d);
    r.axpy(-s, q);
    ++k;

    if (k % ctl.restart_period == 0) {
      // Periodic restart; also refresh the residual to shed accumulated drift.
      r = ev.residual(x);
      f = ev.value(x, r);
      g = ev.gradient(x, r);
      gnorm = l2_norm(g);
      if (precond) precond->refresh(x);
      z = apply_precond(g);
      gz = inner(g, z);
      d = -z;
      steepest = true;
      continue;
    }

    Field g_new = ev.gradient(x, r);
    Field z_new = apply_precond(g_new);
    const double beta = std::max(0.0, inner(g_new - g, z_new) / gz);
    f = fs;
    g = std::move(g_new);
    z = std::move(z_new);
    gnorm = l2_norm(g);
    gz = inner(g, z);
    d *= beta;
    d -= z;
    steepest = beta == 0.0;
  }

  out.x = std::move(x);
  out.inner_iterations = k;
  out.objective = f;
  out.final_gradient_norm = gnorm;
  out.converged = gnorm <= target;
  out.nonconvergence_warning = k >= ctl.max_iter && gnorm > 1e3 * target;
  return out;
}

Field dense_oracle(const SubproblemSpec& spec) {
  spec.validate();
  if (spec.residual_exponent != 2.0) throw UnsupportedOracle("dense oracle needs residual exponent 2");
  if (spec.penalty.kind() != PenaltyKind::SquaredL2) throw UnsupportedOracle("dense oracle needs the SquaredL2 penalty");
  const auto& lin = spec.linearization;
  const auto& par_grid = lin.base().grid();
  const auto& obs_grid = lin.state().grid();
  const auto np = static_cast<Eigen::Index>(par_grid->node_count());
  const auto no = static_cast<Eigen::Index>(obs_grid->node_count());
  if (np > 200) throw UnsupportedOracle("dense oracle is limited to 200 unknowns");

  Eigen::MatrixXd t(no, np);
  for (Eigen::Index j = 0; j < np; ++j) {
    Field e(par_grid);
    e[static_cast<std::size_t>(j)] = 1.0;
    t.col(j) = lin.tangent(e).values();
  }
  const Eigen::VectorXd wp = Eigen::Map<const Eigen::VectorXd>(par_grid->weights().data(), np);
  const Eigen::VectorXd wo = Eigen::Map<const Eigen::VectorXd>(obs_grid->weights().data(), no);

  const Eigen::VectorXd b = (spec.y_delta - lin.state()).values() + t * lin.base().values();
  Eigen::MatrixXd normal = t.transpose() * wo.asDiagonal() * t;
  normal.diagonal() += spec.alpha * wp;
  const Eigen::VectorXd rhs = t.transpose() * (wo.asDiagonal() * b) +
                              0.5 * spec.alpha * (wp.asDiagonal() * spec.penalty.xi0().values());
  return Field(par_grid, normal.ldlt().solve(rhs));
}

}  // namespace birgn
