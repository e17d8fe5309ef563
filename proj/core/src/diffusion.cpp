#include "birgn/diffusion.hpp"

#include <cmath>
#include <string>

#include "birgn/errors.hpp"
#include "birgn/tridiagonal.hpp"

namespace birgn {

namespace {

// Integrates f * phi_i over every element with two-point Gauss quadrature.
// f_at(e, t) evaluates the source inside element e at coordinate t.
template <typename SourceAt>
std::vector<double> assemble_load(const Grid& g, SourceAt f_at) {
  const int n = g.subdivisions();
  const double h = g.spacing();
  const double offset = 0.5 * h / std::sqrt(3.0);
  std::vector<double> full(static_cast<std::size_t>(n) + 1, 0.0);
  for (int e = 0; e < n; ++e) {
    const double t0 = g.axis_coord(e);
    const double mid = t0 + 0.5 * h;
    for (double t : {mid - offset, mid + offset}) {
      const double f = f_at(e, t);
      const double phi_right = (t - t0) / h;
      full[static_cast<std::size_t>(e)] += 0.5 * h * f * (1.0 - phi_right);
      full[static_cast<std::size_t>(e) + 1] += 0.5 * h * f * phi_right;
    }
  }
  return {full.begin() + 1, full.end() - 1};
}

double element_coefficient(const Field& a, int e) {
  return 0.5 * (a[static_cast<std::size_t>(e)] + a[static_cast<std::size_t>(e) + 1]);
}

TridiagonalFactor stiffness(const Field& a) {
  const auto& g = *a.grid();
  const int n = g.subdivisions();
  const double inv_h = 1.0 / g.spacing();
  const std::size_t m = static_cast<std::size_t>(n - 1);
  std::vector<double> lower(m), diag(m), upper(m);
  for (int i = 1; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i - 1);
    const double a_left = element_coefficient(a, i - 1);
    const double a_right = element_coefficient(a, i);
    diag[r] = (a_left + a_right) * inv_h;
    lower[r] = -a_left * inv_h;
    upper[r] = -a_right * inv_h;
  }
  try {
    return TridiagonalFactor(std::move(lower), std::move(diag), std::move(upper), true);
  } catch (const SolverError& e) {
    throw SolverError(std::string("diffusion1d: stiffness matrix is not positive definite: ") + e.what(),
                      e.last_residual());
  }
}

class DiffusionLinearization final : public Linearization {
 public:
  DiffusionLinearization(Field a, Field u, TridiagonalFactor factor)
      : Linearization(std::move(a), std::move(u)), factor_(std::move(factor)) {}

  // K(a) v = -K'(a)[h] u on the interior, v = 0 on the boundary.
  Field tangent(const Field& h) const override {
    require_same_grid(h, base(), "diffusion1d tangent");
    const auto& u = state();
    const auto& g = *h.grid();
    const int n = g.subdivisions();
    const double inv_h = 1.0 / g.spacing();
    std::vector<double> rhs(static_cast<std::size_t>(n - 1), 0.0);
    for (int e = 0; e < n; ++e) {
      const double flux = element_coefficient(h, e) * inv_h *
                          (u[static_cast<std::size_t>(e) + 1] - u[static_cast<std::size_t>(e)]);
      // element e couples nodes e and e+1; rows are interior nodes shifted by one
      if (e >= 1) rhs[static_cast<std::size_t>(e - 1)] += flux;
      if (e + 1 <= n - 1) rhs[static_cast<std::size_t>(e)] -= flux;
    }
    factor_.solve(std::span<double>(rhs));
    Field v(h.grid());
    for (int i = 1; i < n; ++i) v[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i - 1)];
    return v;
  }

  // K(a) z = W w; the functional h -> -sum_e h_e (z'_e)(u'_e) h, divided by W.
  Field adjoint(const Field& w) const override {
    require_same_grid(w, state(), "diffusion1d adjoint");
    const auto& u = state();
    const auto& g = *w.grid();
    const auto& weights = g.weights();
    const int n = g.subdivisions();
    const double h = g.spacing();
    std::vector<double> z(static_cast<std::size_t>(n) + 1, 0.0);
    {
      std::vector<double> rhs(static_cast<std::size_t>(n - 1));
      for (int i = 1; i < n; ++i) {
        rhs[static_cast<std::size_t>(i - 1)] = weights[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
      }
      factor_.solve(std::span<double>(rhs));
      for (int i = 1; i < n; ++i) z[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i - 1)];
    }
    Field out(base().grid());
    for (int e = 0; e < n; ++e) {
      const auto l = static_cast<std::size_t>(e);
      const double c = -0.5 * (z[l + 1] - z[l]) * (u[l + 1] - u[l]) / h;
      out[l] += c;
      out[l + 1] += c;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= weights[i];
    return out;
  }

 private:
  TridiagonalFactor factor_;
};

}  // namespace

Diffusion1D::Diffusion1D(Field source, double left, double right, double nu0)
    : source_(std::move(source)), left_(left), right_(right), nu0_(nu0) {
  validate();
  const auto& g = *source_.grid();
  load_ = assemble_load(g, [&](int e, double t) {
    const double t0 = g.axis_coord(e);
    const double s = (t - t0) / g.spacing();
    return (1.0 - s) * source_[static_cast<std::size_t>(e)] + s * source_[static_cast<std::size_t>(e) + 1];
  });
}

Diffusion1D::Diffusion1D(GridPtr grid, const std::function<double(double)>& source, double left,
                         double right, double nu0)
    : source_(Field::sample(grid, [&](double x, double) { return source(x); })),
      left_(left),
      right_(right),
      nu0_(nu0) {
  validate();
  load_ = assemble_load(*grid, [&](int, double t) { return source(t); });
}

void Diffusion1D::validate() const {
  const auto& g = source_.grid();
  if (!g || g->dimension() != 1) throw GridMismatch("diffusion1d needs a 1D grid");
  if (g->subdivisions() < 2) throw InvalidField("diffusion1d needs an interior node");
  if (!source_.all_finite() || !std::isfinite(left_) || !std::isfinite(right_)) {
    throw InvalidField("diffusion1d: source or boundary data not finite");
  }
  if (!(nu0_ > 0.0)) throw std::invalid_argument("diffusion1d: nu0 must be positive");
}

Field Diffusion1D::apply(const Field& a) const {
  check_parameter(a);
  const auto& g = *a.grid();
  const int n = g.subdivisions();
  const double inv_h = 1.0 / g.spacing();
  std::vector<double> rhs = load_;
  rhs.front() += element_coefficient(a, 0) * inv_h * left_;
  rhs.back() += element_coefficient(a, n - 1) * inv_h * right_;
  stiffness(a).solve(std::span<double>(rhs));
  Field u(a.grid());
  u[0] = left_;
  u[static_cast<std::size_t>(n)] = right_;
  for (int i = 1; i < n; ++i) u[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i - 1)];
  return u;
}

std::unique_ptr<Linearization> Diffusion1D::linearize(const Field& a) const {
  Field u = apply(a);
  return std::make_unique<DiffusionLinearization>(a, std::move(u), stiffness(a));
}

}  // namespace birgn
