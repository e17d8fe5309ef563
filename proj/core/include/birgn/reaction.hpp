#pragma once

#include <memory>

#include "birgn/forward.hpp"

namespace birgn {

/// -u'' + c u = f on (0,1), u(0) = left, u(1) = right.
///
/// Three-point finite differences on the grid's interior nodes; the
/// tridiagonal system is solved by the Thomas algorithm. The parameter c
/// lives on the same grid as u; its boundary samples do not enter the solve.
class Reaction1D final : public ForwardOperator {
 public:
  Reaction1D(Field source, double left, double right, double lower_bound = -1.0);

  OperatorKind kind() const noexcept override { return OperatorKind::Reaction1D; }
  const GridPtr& parameter_grid() const noexcept override { return source_.grid(); }
  const GridPtr& observation_grid() const noexcept override { return source_.grid(); }
  double lower_bound() const noexcept override { return lower_bound_; }

  const Field& source() const noexcept { return source_; }
  double left() const noexcept { return left_; }
  double right() const noexcept { return right_; }

  Field apply(const Field& c) const override;
  std::unique_ptr<Linearization> linearize(const Field& c) const override;

 private:
  Field source_;
  double left_;
  double right_;
  double lower_bound_;
};

struct GaussSeidelControls {
  double relative_tolerance = 1e-10;
  int max_sweeps = 100000;
};

/// -Laplace(u) + c u = f on the unit square, u = g on the boundary.
///
/// Five-point finite differences. apply() runs lexicographic Gauss-Seidel
/// sweeps until the relative residual falls below the tolerance; the
/// linearization factors A(c) once (sparse LDL^T) so that tangent and adjoint
/// solves are exact transposes of each other.
class Reaction2D final : public ForwardOperator {
 public:
  /// Only the boundary samples of `boundary` are used.
  Reaction2D(Field source, Field boundary, double lower_bound = -1.0,
             GaussSeidelControls gs = {});

  OperatorKind kind() const noexcept override { return OperatorKind::Reaction2D; }
  const GridPtr& parameter_grid() const noexcept override { return source_.grid(); }
  const GridPtr& observation_grid() const noexcept override { return source_.grid(); }
  double lower_bound() const noexcept override { return lower_bound_; }

  const Field& source() const noexcept { return source_; }
  const Field& boundary() const noexcept { return boundary_; }
  const GaussSeidelControls& gauss_seidel() const noexcept { return gs_; }

  Field apply(const Field& c) const override;
  std::unique_ptr<Linearization> linearize(const Field& c) const override;

  /// Sweeps used by the most recent apply() on this thread.
  static int last_sweep_count() noexcept;

 private:
  Field source_;
  Field boundary_;
  double lower_bound_;
  GaussSeidelControls gs_;
};

}  // namespace birgn
