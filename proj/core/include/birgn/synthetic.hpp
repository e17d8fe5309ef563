#pragma once

#include <limits>
#include <memory>

#include "birgn/forward.hpp"

namespace birgn {

/// Linear operator (T x)_k = sigma_k x_k on a 1D grid. Self-adjoint in the
/// weighted inner product; F'(x) = T everywhere. Unconstrained domain.
class DiagonalLinearOperator final : public ForwardOperator {
 public:
  explicit DiagonalLinearOperator(Field singular_values);

  /// sigma_k = 10^(-decades * k / (nodes-1)), k = 0..nodes-1.
  static DiagonalLinearOperator log_spaced(int nodes, double decades);

  OperatorKind kind() const noexcept override { return OperatorKind::SyntheticLinear; }
  const GridPtr& parameter_grid() const noexcept override { return sigma_.grid(); }
  const GridPtr& observation_grid() const noexcept override { return sigma_.grid(); }
  double lower_bound() const noexcept override { return -std::numeric_limits<double>::infinity(); }

  const Field& singular_values() const noexcept { return sigma_; }

  Field apply(const Field& x) const override;
  std::unique_ptr<Linearization> linearize(const Field& x) const override;

 private:
  Field sigma_;
};

}  // namespace birgn
