#include "birgn/field.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "birgn/errors.hpp"

namespace birgn {

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidField("field needs a grid");
  values_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid_->node_count()), fill);
}

Field::Field(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidField("field needs a grid");
  if (static_cast<std::size_t>(values_.size()) != grid_->node_count()) {
    throw InvalidField("field has " + std::to_string(values_.size()) + " values, grid has " +
                       std::to_string(grid_->node_count()) + " nodes");
  }
}

Field Field::sample(GridPtr grid, const std::function<double(double, double)>& f) {
  Field out(grid);
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    const double x = grid->coord(k, 0);
    const double y = grid->dimension() == 2 ? grid->coord(k, 1) : 0.0;
    out[k] = f(x, y);
  }
  return out;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other, "field addition");
  values_ += other.values_;
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other, "field subtraction");
  values_ -= other.values_;
  return *this;
}

Field& Field::operator*=(double s) {
  values_ *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& other) {
  require_same_grid(*this, other, "field axpy");
  values_ += s * other.values_;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }
Field operator-(Field a) { return a *= -1.0; }

void require_same_grid(const Field& a, const Field& b, const char* context) {
  if (!same_grid(a.grid(), b.grid())) {
    throw GridMismatch(std::string(context) + ": fields live on different grids");
  }
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner product");
  const auto& w = a.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

double l2_norm(const Field& f) {
  if (!f.all_finite()) throw InvalidField("l2_norm: field has non-finite values");
  const auto& w = f.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * f[i];
  return std::sqrt(s);
}

}  // namespace birgn
