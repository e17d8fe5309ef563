#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "birgn/field.hpp"

namespace birgn {

enum class PenaltyKind { SquaredL2, ElasticNetSmoothed, TVSmoothed, SobolevWp };

std::string_view to_string(PenaltyKind kind);
/// Accepts the CLI spellings l2, elasticnet, tv, sobolev.
PenaltyKind parse_penalty_kind(std::string_view name);

/// Convex penalty Theta on a grid, smoothed so that it is differentiable.
///
/// Per kind, with nodal weights w and forward-difference cells of measure |K|:
///   SquaredL2           sum w x^2
///   ElasticNetSmoothed  lambda sum w x^2 + sum w sqrt(x^2 + eps)
///   TVSmoothed          lambda sum w x^2 + sum |K| sqrt(|grad x|^2 + eps)
///   SobolevWp           sum w (|x-a|^2 + eps)^(p/2) + sum |K| (|grad(x-a)|^2 + eps)^(p/2)
/// where a is the anchor. Cells exist for every node that has a forward
/// neighbour along each axis; the last row/column contributes no cell.
///
/// The anchor x0 and the dual sample xi0 define D_{xi0}Theta(x, x0). xi0 is
/// stored as a Riesz representative: it pairs with fields through the weighted
/// inner product. It defaults to riesz_gradient(x0).
class PenaltyFunctional {
 public:
  struct Options {
    PenaltyKind kind = PenaltyKind::SquaredL2;
    double lambda = 0.0;
    double epsilon = 1e-6;
    double p_exponent = 2.0;
  };

  PenaltyFunctional(Options opts, Field anchor, std::optional<Field> xi0 = std::nullopt);

  PenaltyKind kind() const noexcept { return opts_.kind; }
  double lambda() const noexcept { return opts_.lambda; }
  double epsilon() const noexcept { return opts_.epsilon; }
  double p_exponent() const noexcept { return opts_.p_exponent; }
  const Options& options() const noexcept { return opts_; }
  const GridPtr& grid() const noexcept { return anchor_.grid(); }
  const Field& anchor() const noexcept { return anchor_; }
  const Field& xi0() const noexcept { return xi0_; }

  double value(const Field& x) const;

  /// Derivative of value() with respect to the nodal values.
  Field gradient(const Field& x) const;

  /// L2 gradient: gradient() divided node-wise by the quadrature weights, so
  /// that value'(x)h = inner(riesz_gradient(x), h).
  Field riesz_gradient(const Field& x) const;

  /// Symmetric positive definite curvature model at x in nodal coordinates:
  /// each smoothed term psi(s^2 + eps) contributes 2 psi'(s^2 + eps) times its
  /// stencil outer product (lagged diffusivity). Exact for SquaredL2, and for
  /// p <= 2 an upper bound on the Hessian of every term.
  Eigen::SparseMatrix<double> curvature(const Field& x) const;

  /// value(z) - value(x) - inner(xi, z - x). Negative roundoff down to -1e-8
  /// is returned as 0; anything below throws ConvexityViolation.
  double bregman(const Field& z, const Field& x, const Field& xi) const;

  /// D_{xi0}Theta(x, x0).
  double bregman_to_anchor(const Field& x) const;

  /// value(x) - value(x0) - inner(xi0, x - x0) without clamping or checks;
  /// the penalty term of the Gauss-Newton subproblem.
  double anchored_value(const Field& x) const;

 private:
  void check_grid(const Field& x, const char* context) const;
  double cell_sum(const Field& d, double power) const;
  void add_cell_gradient(const Field& d, double power, double scale, Field& grad) const;
  void add_cell_curvature(const Field& d, double power, std::vector<Eigen::Triplet<double>>& out) const;

  Options opts_;
  Field anchor_;
  Field xi0_;
  double anchor_value_ = 0.0;
};

}  // namespace birgn
