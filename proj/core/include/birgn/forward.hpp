#pragma once

#include <memory>
#include <string_view>

#include "birgn/field.hpp"

namespace birgn {

enum class OperatorKind { Reaction1D, Reaction2D, Diffusion1D, SyntheticLinear };

std::string_view to_string(OperatorKind kind);

/// F'(x) and its adjoint at a fixed base parameter.
///
/// The adjoint is taken with respect to the weighted inner products of the
/// parameter and observation grids:
///   inner(tangent(h), w) == inner(h, adjoint(w)).
class Linearization {
 public:
  Linearization(Field base, Field state) : base_(std::move(base)), state_(std::move(state)) {}
  virtual ~Linearization() = default;

  const Field& base() const noexcept { return base_; }
  /// F(base), computed when the linearization was built.
  const Field& state() const noexcept { return state_; }

  virtual Field tangent(const Field& h) const = 0;
  virtual Field adjoint(const Field& w) const = 0;

 private:
  Field base_;
  Field state_;
};

/// Parameter-to-state map F with its linearization.
class ForwardOperator {
 public:
  virtual ~ForwardOperator() = default;

  virtual OperatorKind kind() const noexcept = 0;
  virtual const GridPtr& parameter_grid() const noexcept = 0;
  virtual const GridPtr& observation_grid() const noexcept = 0;

  /// Pointwise lower bound of the admissible parameter set.
  virtual double lower_bound() const noexcept = 0;

  virtual Field apply(const Field& x) const = 0;
  virtual std::unique_ptr<Linearization> linearize(const Field& x) const = 0;

  /// Throws DomainError / GridMismatch / InvalidField for inadmissible x.
  void check_parameter(const Field& x) const;
  /// Pointwise max(x, lower_bound()).
  Field clip_to_domain(const Field& x) const;
};

/// sqrt of the dominant eigenvalue of T*T by power iteration in the weighted
/// inner products, from a fixed pseudo-random start vector.
double estimate_operator_norm(const Linearization& lin, int iterations);

}  // namespace birgn
