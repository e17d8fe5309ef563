#include "birgn/synthetic.hpp"

#include <cmath>

#include "birgn/errors.hpp"

namespace birgn {

namespace {

class DiagonalLinearization final : public Linearization {
 public:
  DiagonalLinearization(Field x, Field state, const Field& sigma)
      : Linearization(std::move(x), std::move(state)), sigma_(sigma) {}

  Field tangent(const Field& h) const override {
    require_same_grid(h, sigma_, "diagonal tangent");
    return Field(h.grid(), sigma_.values().cwiseProduct(h.values()));
  }
  Field adjoint(const Field& w) const override {
    require_same_grid(w, sigma_, "diagonal adjoint");
    return Field(w.grid(), sigma_.values().cwiseProduct(w.values()));
  }

 private:
  Field sigma_;
};

}  // namespace

DiagonalLinearOperator::DiagonalLinearOperator(Field singular_values) : sigma_(std::move(singular_values)) {
  if (!sigma_.grid() || sigma_.grid()->dimension() != 1) throw GridMismatch("diagonal operator needs a 1D grid");
  if (!sigma_.all_finite()) throw InvalidField("diagonal operator: non-finite singular values");
}

DiagonalLinearOperator DiagonalLinearOperator::log_spaced(int nodes, double decades) {
  auto grid = Grid::unit_interval(nodes - 1);
  Field sigma(grid);
  for (int k = 0; k < nodes; ++k) {
    sigma[static_cast<std::size_t>(k)] = std::pow(10.0, -decades * k / (nodes - 1));
  }
  return DiagonalLinearOperator(std::move(sigma));
}

Field DiagonalLinearOperator::apply(const Field& x) const {
  check_parameter(x);
  return Field(x.grid(), sigma_.values().cwiseProduct(x.values()));
}

std::unique_ptr<Linearization> DiagonalLinearOperator::linearize(const Field& x) const {
  return std::make_unique<DiagonalLinearization>(x, apply(x), sigma_);
}

}  // namespace birgn
