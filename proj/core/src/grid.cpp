#include "birgn/grid.hpp"

#include <stdexcept>

namespace birgn {

namespace {

std::vector<double> trapezoid_1d(int n) {
  const double h = 1.0 / n;
  std::vector<double> w(static_cast<std::size_t>(n) + 1, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

}  // namespace

Grid::Grid(int dimension, int subdivisions) : dimension_(dimension), subdivisions_(subdivisions) {
  if (dimension != 1 && dimension != 2) {
    throw std::invalid_argument("grid dimension must be 1 or 2");
  }
  if (subdivisions < 1) {
    throw std::invalid_argument("grid needs at least one subdivision per axis");
  }
  const auto w1 = trapezoid_1d(subdivisions);
  if (dimension == 1) {
    weights_ = w1;
    return;
  }
  weights_.reserve(w1.size() * w1.size());
  for (double wx : w1) {
    for (double wy : w1) {
      weights_.push_back(wx * wy);
    }
  }
}

GridPtr Grid::unit_interval(int subdivisions) {
  return GridPtr(new Grid(1, subdivisions));
}

GridPtr Grid::unit_square(int subdivisions) {
  return GridPtr(new Grid(2, subdivisions));
}

double Grid::coord(std::size_t node, int axis) const {
  const auto m = static_cast<std::size_t>(points_per_axis());
  if (dimension_ == 1) {
    if (axis != 0) throw std::out_of_range("1D grid has a single axis");
    return axis_coord(static_cast<int>(node));
  }
  if (axis == 0) return axis_coord(static_cast<int>(node / m));
  if (axis == 1) return axis_coord(static_cast<int>(node % m));
  throw std::out_of_range("axis out of range");
}

bool Grid::is_boundary(std::size_t node) const {
  const auto n = static_cast<std::size_t>(subdivisions_);
  if (dimension_ == 1) return node == 0 || node == n;
  const auto m = n + 1;
  const auto i = node / m;
  const auto j = node % m;
  return i == 0 || j == 0 || i == n || j == n;
}

double Grid::cell_measure() const noexcept {
  const double h = spacing();
  return dimension_ == 1 ? h : h * h;
}

}  // namespace birgn
