#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "birgn/forward.hpp"
#include "birgn/penalty.hpp"

namespace birgn {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Measured quantity (mismatch, slope, ...).
  double value = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// One `PASS|FAIL name value detail` line per check.
  void print(std::ostream& out) const;
};

// -- derivative checks ------------------------------------------------------

/// max over `pairs` random (h, w) of |<T h, w> - <h, T* w>| / (||T h|| ||w||).
CheckResult adjoint_dot_test(const ForwardOperator& op, const Field& x, int pairs = 20,
                             std::uint64_t seed = 1, double threshold = 1e-10);

/// Log-log slope of ||F(x+sh) - F(x) - s T h|| over s in {1e-1, ..., 1e-4}.
CheckResult taylor_test(const ForwardOperator& op, const Field& x, std::uint64_t seed = 2,
                        double slope_min = 1.9, double slope_max = 2.1);

/// Tangent probes of unit vectors against a central-difference Jacobian;
/// relative (max-entry) mismatch must stay below tol.
CheckResult jacobian_test(const ForwardOperator& op, const Field& x, double tol = 1e-6,
                          double step = 1e-4);

/// Adjoint probes against the weighted transpose W_p^-1 J^T W_o of the
/// central-difference Jacobian.
CheckResult transpose_test(const ForwardOperator& op, const Field& x, double tol = 1e-6,
                           double step = 1e-4);

/// Dot-product and Taylor tests at (op, x), dense Jacobian/transpose oracles
/// at (reduced_op, reduced_x).
SuiteReport derivative_suite(const ForwardOperator& op, const Field& x, const ForwardOperator& reduced_op,
                             const Field& reduced_x, std::string label);

/// Base point for a preset's derivative suite.
enum class DerivativeBase { Truth, Zero };

/// Runs derivative_suite on a preset; reduced grids use 10 subdivisions.
SuiteReport derivative_suite(std::string_view preset, DerivativeBase base = DerivativeBase::Truth);

/// Fault-injection wrapper: adjoint(w) = inner adjoint(w) + scale * w.
/// Used to confirm that the dot-product test detects a wrong adjoint.
class PerturbedAdjointOperator final : public ForwardOperator {
 public:
  PerturbedAdjointOperator(std::shared_ptr<const ForwardOperator> inner, double scale)
      : inner_(std::move(inner)), scale_(scale) {}

  OperatorKind kind() const noexcept override { return inner_->kind(); }
  const GridPtr& parameter_grid() const noexcept override { return inner_->parameter_grid(); }
  const GridPtr& observation_grid() const noexcept override { return inner_->observation_grid(); }
  double lower_bound() const noexcept override { return inner_->lower_bound(); }
  Field apply(const Field& x) const override { return inner_->apply(x); }
  std::unique_ptr<Linearization> linearize(const Field& x) const override;

 private:
  std::shared_ptr<const ForwardOperator> inner_;
  double scale_;
};

// -- penalty checks ---------------------------------------------------------

/// A convex functional under test, described by callables so that deliberately
/// broken functionals can be fed through the same checks.
struct PenaltyProbe {
  std::string name;
  GridPtr grid;
  std::function<double(const Field&)> value;
  std::function<Field(const Field&)> riesz_gradient;
  /// c with D(z,x) >= c ||z-x||^2, when the functional is 2-convex.
  std::optional<double> convexity_modulus;
  /// Bregman distance equals ||z-x||^2 exactly (SquaredL2).
  bool squared_norm = false;
};

PenaltyProbe make_probe(std::shared_ptr<const PenaltyFunctional> penalty, std::string name);

/// Convexity (midpoint), Bregman nonnegativity, three-point identity, gradient
/// consistency, and where applicable the 2-convexity witness and the exact
/// SquaredL2 identity; each on `seeds` random draws.
SuiteReport penalty_suite(const std::vector<PenaltyProbe>& probes, int seeds = 10);

/// All four penalty kinds on a 1D and a 2D grid.
SuiteReport penalty_suite(int seeds = 10);

// -- convergence rates ------------------------------------------------------

struct RateTestSpec {
  /// Source-condition exponent in (0, 1]. The truth is x_k = sigma_k^nu, which
  /// satisfies the variational source condition with this exponent.
  double nu = 1.0;
  /// Convexity exponent of the penalty (SquaredL2, so 2).
  double p = 2.0;
  int rule = 3;
  double tau = 1.05;
  std::vector<double> deltas = default_deltas();
  int seeds = 5;
  int nodes = 101;
  /// Singular values span 10^0 .. 10^-decades.
  double decades = 8.0;
  int max_outer = 60;

  static std::vector<double> default_deltas();
  void validate() const;
};

struct RateSample {
  double delta = 0.0;
  int seed = 0;
  std::optional<int> n_delta;
  double error = 0.0;
  bool ok = false;
};

struct RateReport {
  std::vector<RateSample> samples;
  std::vector<double> deltas;
  std::vector<double> median_errors;
  double slope = 0.0;
  double predicted = 0.0;
  bool complete = true;
};

/// Predicted slope nu / (p - 1 + nu).
double predicted_rate(double nu, double p = 2.0);
/// Accepted slope band: [0.4, 0.6] for nu = 1, [0.23, 0.43] for nu = 1/2,
/// predicted +- 0.1 otherwise.
std::pair<double, double> rate_band(double nu);

RateReport rate_test(const RateTestSpec& spec);

/// `delta,seed,n_delta,error`.
void write_rates_csv(std::ostream& out, const RateReport& report);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace birgn
