#pragma once

#include <span>
#include <vector>

namespace birgn {

/// LU factorization of a tridiagonal matrix by the Thomas algorithm.
///
/// Row i reads lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1];
/// lower[0] and upper[n-1] are ignored. No pivoting: a zero pivot throws.
/// With require_positive_pivots the factorization doubles as a positive
/// definiteness test for symmetric input.
class TridiagonalFactor {
 public:
  TridiagonalFactor() = default;
  TridiagonalFactor(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                    bool require_positive_pivots = false);

  std::size_t size() const noexcept { return pivot_.size(); }

  /// Solves in place.
  void solve(std::span<double> rhs) const;
  std::vector<double> solve(std::vector<double> rhs) const;

 private:
  std::vector<double> lower_;
  std::vector<double> pivot_;
  std::vector<double> upper_scaled_;
};

/// One-shot Thomas solve.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

}  // namespace birgn
