#include "birgn/reaction.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>
#include <vector>

#include "birgn/errors.hpp"
#include "birgn/tridiagonal.hpp"

namespace birgn {

namespace {

thread_local int g_last_sweeps = 0;

void require_1d(const GridPtr& g, const char* what) {
  if (!g || g->dimension() != 1) throw GridMismatch(std::string(what) + " needs a 1D grid");
}

void require_2d(const GridPtr& g, const char* what) {
  if (!g || g->dimension() != 2) throw GridMismatch(std::string(what) + " needs a 2D grid");
}

TridiagonalFactor reaction_matrix_1d(const Field& c) {
  const auto& g = *c.grid();
  const int n = g.subdivisions();
  const std::size_t m = static_cast<std::size_t>(n - 1);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<double> lower(m, -inv_h2), diag(m), upper(m, -inv_h2);
  for (std::size_t k = 0; k < m; ++k) diag[k] = 2.0 * inv_h2 + c[k + 1];
  return TridiagonalFactor(std::move(lower), std::move(diag), std::move(upper), true);
}

class ReactionLinearization1D final : public Linearization {
 public:
  ReactionLinearization1D(Field c, Field u, TridiagonalFactor factor)
      : Linearization(std::move(c), std::move(u)), factor_(std::move(factor)) {}

  // A(c) v = -h u on the interior, v = 0 on the boundary.
  Field tangent(const Field& h) const override {
    require_same_grid(h, base(), "reaction1d tangent");
    const auto& u = state();
    const std::size_t m = factor_.size();
    std::vector<double> rhs(m);
    for (std::size_t k = 0; k < m; ++k) rhs[k] = -h[k + 1] * u[k + 1];
    factor_.solve(std::span<double>(rhs));
    Field v(h.grid());
    for (std::size_t k = 0; k < m; ++k) v[k + 1] = rhs[k];
    return v;
  }

  // A(c) z = W w on the interior; adjoint = -u z / W, zero on the boundary.
  Field adjoint(const Field& w) const override {
    require_same_grid(w, state(), "reaction1d adjoint");
    const auto& u = state();
    const auto& weights = w.grid()->weights();
    const std::size_t m = factor_.size();
    std::vector<double> rhs(m);
    for (std::size_t k = 0; k < m; ++k) rhs[k] = weights[k + 1] * w[k + 1];
    factor_.solve(std::span<double>(rhs));
    Field out(base().grid());
    for (std::size_t k = 0; k < m; ++k) out[k + 1] = -u[k + 1] * rhs[k] / weights[k + 1];
    return out;
  }

 private:
  TridiagonalFactor factor_;
};

// Interior unknown numbering for the 2D problem: (i, j), 1 <= i, j <= n-1,
// mapped to (i-1)*(n-1) + (j-1).
struct Interior2D {
  int n;
  int m;  // n - 1
  int unknown(int i, int j) const { return (i - 1) * m + (j - 1); }
};

using SparseMatrix = Eigen::SparseMatrix<double>;
using SparseFactor = Eigen::SimplicialLDLT<SparseMatrix>;

SparseMatrix reaction_matrix_2d(const Field& c) {
  const auto& g = *c.grid();
  const Interior2D in{g.subdivisions(), g.subdivisions() - 1};
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(5 * in.m * in.m));
  for (int i = 1; i < in.n; ++i) {
    for (int j = 1; j < in.n; ++j) {
      const int r = in.unknown(i, j);
      t.emplace_back(r, r, 4.0 * inv_h2 + c[g.index(i, j)]);
      if (i > 1) t.emplace_back(r, in.unknown(i - 1, j), -inv_h2);
      if (i < in.n - 1) t.emplace_back(r, in.unknown(i + 1, j), -inv_h2);
      if (j > 1) t.emplace_back(r, in.unknown(i, j - 1), -inv_h2);
      if (j < in.n - 1) t.emplace_back(r, in.unknown(i, j + 1), -inv_h2);
    }
  }
  SparseMatrix a(in.m * in.m, in.m * in.m);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

class ReactionLinearization2D final : public Linearization {
 public:
  ReactionLinearization2D(Field c, Field u, std::shared_ptr<const SparseFactor> factor)
      : Linearization(std::move(c), std::move(u)), factor_(std::move(factor)) {}

  Field tangent(const Field& h) const override {
    require_same_grid(h, base(), "reaction2d tangent");
    const auto& g = *h.grid();
    const Interior2D in{g.subdivisions(), g.subdivisions() - 1};
    const auto& u = state();
    Eigen::VectorXd rhs(in.m * in.m);
    for (int i = 1; i < in.n; ++i) {
      for (int j = 1; j < in.n; ++j) rhs[in.unknown(i, j)] = -h[g.index(i, j)] * u[g.index(i, j)];
    }
    const Eigen::VectorXd v = factor_->solve(rhs);
    Field out(h.grid());
    for (int i = 1; i < in.n; ++i) {
      for (int j = 1; j < in.n; ++j) out[g.index(i, j)] = v[in.unknown(i, j)];
    }
    return out;
  }

  Field adjoint(const Field& w) const override {
    require_same_grid(w, state(), "reaction2d adjoint");
    const auto& g = *w.grid();
    const Interior2D in{g.subdivisions(), g.subdivisions() - 1};
    const auto& u = state();
    const auto& weights = g.weights();
    Eigen::VectorXd rhs(in.m * in.m);
    for (int i = 1; i < in.n; ++i) {
      for (int j = 1; j < in.n; ++j) {
        const auto k = g.index(i, j);
        rhs[in.unknown(i, j)] = weights[k] * w[k];
      }
    }
    const Eigen::VectorXd z = factor_->solve(rhs);
    Field out(base().grid());
    for (int i = 1; i < in.n; ++i) {
      for (int j = 1; j < in.n; ++j) {
        const auto k = g.index(i, j);
        out[k] = -u[k] * z[in.unknown(i, j)] / weights[k];
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const SparseFactor> factor_;
};

}  // namespace

Reaction1D::Reaction1D(Field source, double left, double right, double lower_bound)
    : source_(std::move(source)), left_(left), right_(right), lower_bound_(lower_bound) {
  require_1d(source_.grid(), "reaction1d");
  if (source_.grid()->subdivisions() < 2) throw InvalidField("reaction1d needs an interior node");
  if (!source_.all_finite() || !std::isfinite(left) || !std::isfinite(right)) {
    throw InvalidField("reaction1d: source or boundary data not finite");
  }
}

Field Reaction1D::apply(const Field& c) const {
  check_parameter(c);
  const auto& g = *c.grid();
  const int n = g.subdivisions();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<double> rhs(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) rhs[static_cast<std::size_t>(i - 1)] = source_[g.index(i)];
  rhs.front() += left_ * inv_h2;
  rhs.back() += right_ * inv_h2;
  reaction_matrix_1d(c).solve(std::span<double>(rhs));
  Field u(c.grid());
  u[0] = left_;
  u[static_cast<std::size_t>(n)] = right_;
  for (int i = 1; i < n; ++i) u[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i - 1)];
  return u;
}

std::unique_ptr<Linearization> Reaction1D::linearize(const Field& c) const {
  Field u = apply(c);
  return std::make_unique<ReactionLinearization1D>(c, std::move(u), reaction_matrix_1d(c));
}

Reaction2D::Reaction2D(Field source, Field boundary, double lower_bound, GaussSeidelControls gs)
    : source_(std::move(source)), boundary_(std::move(boundary)), lower_bound_(lower_bound), gs_(gs) {
  require_2d(source_.grid(), "reaction2d");
  require_same_grid(source_, boundary_, "reaction2d boundary data");
  if (source_.grid()->subdivisions() < 2) throw InvalidField("reaction2d needs an interior node");
  if (!source_.all_finite() || !boundary_.all_finite()) {
    throw InvalidField("reaction2d: source or boundary data not finite");
  }
  if (!(gs_.relative_tolerance > 0.0) || gs_.max_sweeps < 1) {
    throw std::invalid_argument("reaction2d: invalid Gauss-Seidel controls");
  }
}

int Reaction2D::last_sweep_count() noexcept { return g_last_sweeps; }

Field Reaction2D::apply(const Field& c) const {
  check_parameter(c);
  const auto& g = *c.grid();
  const int n = g.subdivisions();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());

  Field u(c.grid());
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (g.is_boundary(k)) u[k] = boundary_[k];
  }

  // b = f plus the boundary couplings moved to the right-hand side.
  std::vector<double> b(u.size(), 0.0);
  double b_norm2 = 0.0;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      double r = source_[g.index(i, j)];
      if (i == 1) r += inv_h2 * u[g.index(0, j)];
      if (i == n - 1) r += inv_h2 * u[g.index(n, j)];
      if (j == 1) r += inv_h2 * u[g.index(i, 0)];
      if (j == n - 1) r += inv_h2 * u[g.index(i, n)];
      b[g.index(i, j)] = r;
      b_norm2 += r * r;
    }
  }
  const double b_norm = std::sqrt(b_norm2);
  g_last_sweeps = 0;
  if (b_norm == 0.0) return u;

  auto neighbours = [&](int i, int j) {
    double s = 0.0;
    if (i > 1) s += u[g.index(i - 1, j)];
    if (i < n - 1) s += u[g.index(i + 1, j)];
    if (j > 1) s += u[g.index(i, j - 1)];
    if (j < n - 1) s += u[g.index(i, j + 1)];
    return s;
  };
  auto relative_residual = [&]() {
    double r2 = 0.0;
    for (int i = 1; i < n; ++i) {
      for (int j = 1; j < n; ++j) {
        const auto k = g.index(i, j);
        const double r = b[k] - (4.0 * inv_h2 + c[k]) * u[k] + inv_h2 * neighbours(i, j);
        r2 += r * r;
      }
    }
    return std::sqrt(r2) / b_norm;
  };

  constexpr int kCheckEvery = 10;
  double residual = relative_residual();
  int sweep = 0;
  while (residual > gs_.relative_tolerance) {
    if (sweep >= gs_.max_sweeps) {
      g_last_sweeps = sweep;
      throw SolverError("reaction2d: Gauss-Seidel did not converge in " + std::to_string(sweep) +
                            " sweeps (relative residual " + std::to_string(residual) + ")",
                        residual);
    }
    for (int i = 1; i < n; ++i) {
      for (int j = 1; j < n; ++j) {
        const auto k = g.index(i, j);
        u[k] = (b[k] + inv_h2 * neighbours(i, j)) / (4.0 * inv_h2 + c[k]);
      }
    }
    ++sweep;
    if (sweep % kCheckEvery == 0 || sweep >= gs_.max_sweeps) residual = relative_residual();
  }
  g_last_sweeps = sweep;
  return u;
}

std::unique_ptr<Linearization> Reaction2D::linearize(const Field& c) const {
  Field u = apply(c);
  auto factor = std::make_shared<SparseFactor>(reaction_matrix_2d(c));
  if (factor->info() != Eigen::Success) {
    throw SolverError("reaction2d: A(c) is not positive definite", 0.0);
  }
  return std::make_unique<ReactionLinearization2D>(c, std::move(u), std::move(factor));
}

}  // namespace birgn
