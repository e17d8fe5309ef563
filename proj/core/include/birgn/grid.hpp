#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace birgn {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform tensor grid on [0,1] or [0,1]^2 with trapezoidal quadrature weights.
///
/// Nodes are ordered lexicographically by (x, y): in two dimensions the node
/// with axis indices (i, j) sits at (i*h, j*h) and has flat index
/// i*(n+1) + j, where n is the number of subdivisions per axis.
class Grid {
 public:
  static GridPtr unit_interval(int subdivisions);
  static GridPtr unit_square(int subdivisions);

  int dimension() const noexcept { return dimension_; }
  int subdivisions() const noexcept { return subdivisions_; }
  int points_per_axis() const noexcept { return subdivisions_ + 1; }
  std::size_t node_count() const noexcept { return weights_.size(); }
  double spacing() const noexcept { return 1.0 / subdivisions_; }

  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t node) const { return weights_[node]; }

  /// Coordinate of a node along an axis (0 = x, 1 = y).
  double coord(std::size_t node, int axis = 0) const;
  /// Coordinate of the k-th point along any axis, computed as k/n.
  double axis_coord(int k) const noexcept { return static_cast<double>(k) / subdivisions_; }

  std::size_t index(int i) const noexcept { return static_cast<std::size_t>(i); }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * points_per_axis() + static_cast<std::size_t>(j);
  }

  bool is_boundary(std::size_t node) const;

  /// Measure of one forward-difference cell (h or h^2).
  double cell_measure() const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return dimension_ == other.dimension_ && subdivisions_ == other.subdivisions_;
  }

 private:
  Grid(int dimension, int subdivisions);

  int dimension_;
  int subdivisions_;
  std::vector<double> weights_;
};

inline bool same_grid(const GridPtr& a, const GridPtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace birgn
