#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

#include "birgn/grid.hpp"

namespace birgn {

/// Real-valued nodal samples on a Grid.
///
/// Fields are regular values: copying duplicates the samples, the grid is
/// shared. Arithmetic between fields requires the same grid.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0);
  Field(GridPtr grid, Eigen::VectorXd values);

  /// Samples f at every node; f receives (x, y) with y = 0 in one dimension.
  static Field sample(GridPtr grid, const std::function<double(double, double)>& f);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  bool all_finite() const noexcept { return values_.allFinite(); }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  /// this += s * other
  Field& axpy(double s, const Field& other);

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator-(Field a);

/// Throws GridMismatch unless both fields sit on the same grid.
void require_same_grid(const Field& a, const Field& b, const char* context);

/// Weighted inner product sum_i w_i a_i b_i.
double inner(const Field& a, const Field& b);

/// Discrete L2 norm sqrt(sum_i w_i f_i^2). Throws InvalidField on non-finite input.
double l2_norm(const Field& f);

}  // namespace birgn
