#include "birgn/tridiagonal.hpp"

#include <stdexcept>

#include "birgn/errors.hpp"

namespace birgn {

TridiagonalFactor::TridiagonalFactor(std::vector<double> lower, std::vector<double> diag,
                                     std::vector<double> upper, bool require_positive_pivots)
    : lower_(std::move(lower)) {
  const std::size_t n = diag.size();
  if (n == 0 || lower_.size() != n || upper.size() != n) {
    throw std::invalid_argument("tridiagonal: band sizes must match and be nonempty");
  }
  pivot_.resize(n);
  upper_scaled_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = i == 0 ? diag[0] : diag[i] - lower_[i] * upper_scaled_[i - 1];
    if (m == 0.0 || (require_positive_pivots && !(m > 0.0))) {
      throw SolverError("tridiagonal: non-positive pivot at row " + std::to_string(i), m);
    }
    pivot_[i] = m;
    upper_scaled_[i] = i + 1 < n ? upper[i] / m : 0.0;
  }
}

void TridiagonalFactor::solve(std::span<double> rhs) const {
  const std::size_t n = pivot_.size();
  if (rhs.size() != n) throw std::invalid_argument("tridiagonal: rhs size mismatch");
  rhs[0] /= pivot_[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) / pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_scaled_[i] * rhs[i + 1];
}

std::vector<double> TridiagonalFactor::solve(std::vector<double> rhs) const {
  solve(std::span<double>(rhs));
  return rhs;
}

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  TridiagonalFactor f({lower.begin(), lower.end()}, {diag.begin(), diag.end()},
                      {upper.begin(), upper.end()});
  return f.solve(std::vector<double>(rhs.begin(), rhs.end()));
}

}  // namespace birgn
