#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "birgn/forward.hpp"

namespace birgn {

/// -(a u')' = f on (0,1), u(0) = left, u(1) = right, by piecewise-linear
/// finite elements on the grid.
///
/// The coefficient a is stored at nodes; each element uses a at its midpoint
/// (the mean of its two nodal values). The load vector integrates f times the
/// hat functions with two-point Gauss quadrature per element, so it is exact
/// for sources that are linear on every element, discontinuities at nodes
/// included.
class Diffusion1D final : public ForwardOperator {
 public:
  /// Nodal source, linearly interpolated inside elements.
  Diffusion1D(Field source, double left, double right, double nu0 = 0.1);
  /// Source given as a function, sampled at the Gauss points.
  Diffusion1D(GridPtr grid, const std::function<double(double)>& source, double left, double right,
              double nu0 = 0.1);

  OperatorKind kind() const noexcept override { return OperatorKind::Diffusion1D; }
  const GridPtr& parameter_grid() const noexcept override { return source_.grid(); }
  const GridPtr& observation_grid() const noexcept override { return source_.grid(); }
  double lower_bound() const noexcept override { return nu0_; }

  const Field& source() const noexcept { return source_; }
  double left() const noexcept { return left_; }
  double right() const noexcept { return right_; }

  Field apply(const Field& a) const override;
  std::unique_ptr<Linearization> linearize(const Field& a) const override;

 private:
  void validate() const;

  Field source_;
  std::vector<double> load_;  // interior nodes 1..n-1
  double left_;
  double right_;
  double nu0_;
};

}  // namespace birgn
