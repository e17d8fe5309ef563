#include "birgn/penalty.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "birgn/errors.hpp"

namespace birgn {

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::SquaredL2: return "l2";
    case PenaltyKind::ElasticNetSmoothed: return "elasticnet";
    case PenaltyKind::TVSmoothed: return "tv";
    case PenaltyKind::SobolevWp: return "sobolev";
  }
  return "?";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  if (name == "l2") return PenaltyKind::SquaredL2;
  if (name == "elasticnet") return PenaltyKind::ElasticNetSmoothed;
  if (name == "tv") return PenaltyKind::TVSmoothed;
  if (name == "sobolev") return PenaltyKind::SobolevWp;
  throw std::invalid_argument("unknown penalty kind '" + std::string(name) + "'");
}

PenaltyFunctional::PenaltyFunctional(Options opts, Field anchor, std::optional<Field> xi0)
    : opts_(opts), anchor_(std::move(anchor)) {
  if (!anchor_.grid()) throw InvalidField("penalty anchor needs a grid");
  if (!anchor_.all_finite()) throw InvalidField("penalty anchor has non-finite values");
  if (!(opts_.lambda >= 0.0)) throw std::invalid_argument("penalty: lambda must be nonnegative");
  if (!(opts_.epsilon > 0.0)) throw std::invalid_argument("penalty: epsilon must be positive");
  if (opts_.kind == PenaltyKind::SobolevWp && !(opts_.p_exponent > 1.0)) {
    throw std::invalid_argument("penalty: Sobolev exponent must exceed 1");
  }

  const Field grad = riesz_gradient(anchor_);
  if (xi0) {
    check_grid(*xi0, "penalty xi0");
    const double mismatch = (xi0->values() - grad.values()).lpNorm<Eigen::Infinity>();
    if (mismatch > 1e-8 * (1.0 + grad.values().lpNorm<Eigen::Infinity>())) {
      throw std::invalid_argument("penalty: xi0 is not the gradient of the smoothed penalty at the anchor");
    }
    xi0_ = *xi0;
  } else {
    xi0_ = grad;
  }
  anchor_value_ = value(anchor_);
}

void PenaltyFunctional::check_grid(const Field& x, const char* context) const {
  if (!same_grid(x.grid(), anchor_.grid())) {
    throw GridMismatch(std::string(context) + ": field is not on the penalty's grid");
  }
}

double PenaltyFunctional::cell_sum(const Field& d, double power) const {
  const auto& g = *d.grid();
  const int n = g.subdivisions();
  const double inv_h = 1.0 / g.spacing();
  const double eps = opts_.epsilon;
  double sum = 0.0;
  if (g.dimension() == 1) {
    for (int k = 0; k < n; ++k) {
      const double gx = (d[g.index(k + 1)] - d[g.index(k)]) * inv_h;
      sum += std::pow(gx * gx + eps, power);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double c = d[g.index(i, j)];
        const double gx = (d[g.index(i + 1, j)] - c) * inv_h;
        const double gy = (d[g.index(i, j + 1)] - c) * inv_h;
        sum += std::pow(gx * gx + gy * gy + eps, power);
      }
    }
  }
  return g.cell_measure() * sum;
}

void PenaltyFunctional::add_cell_gradient(const Field& d, double power, double scale,
                                          Field& grad) const {
  const auto& g = *d.grid();
  const int n = g.subdivisions();
  const double inv_h = 1.0 / g.spacing();
  const double eps = opts_.epsilon;
  const double m = scale * g.cell_measure();
  if (g.dimension() == 1) {
    for (int k = 0; k < n; ++k) {
      const double gx = (d[g.index(k + 1)] - d[g.index(k)]) * inv_h;
      const double c = m * power * std::pow(gx * gx + eps, power - 1.0) * 2.0 * gx * inv_h;
      grad[g.index(k + 1)] += c;
      grad[g.index(k)] -= c;
    }
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto k = g.index(i, j);
      const auto kx = g.index(i + 1, j);
      const auto ky = g.index(i, j + 1);
      const double gx = (d[kx] - d[k]) * inv_h;
      const double gy = (d[ky] - d[k]) * inv_h;
      const double c = m * power * std::pow(gx * gx + gy * gy + eps, power - 1.0) * 2.0 * inv_h;
      grad[kx] += c * gx;
      grad[ky] += c * gy;
      grad[k] -= c * (gx + gy);
    }
  }
}

void PenaltyFunctional::add_cell_curvature(const Field& d, double power,
                                           std::vector<Eigen::Triplet<double>>& out) const {
  const auto& g = *d.grid();
  const int n = g.subdivisions();
  const double inv_h = 1.0 / g.spacing();
  const double eps = opts_.epsilon;
  const double m = g.cell_measure() * inv_h * inv_h;
  auto couple = [&out](std::size_t a, std::size_t b, double c) {
    out.emplace_back(a, a, c);
    out.emplace_back(b, b, c);
    out.emplace_back(a, b, -c);
    out.emplace_back(b, a, -c);
  };
  if (g.dimension() == 1) {
    for (int k = 0; k < n; ++k) {
      const double gx = (d[g.index(k + 1)] - d[g.index(k)]) * inv_h;
      couple(g.index(k), g.index(k + 1), m * 2.0 * power * std::pow(gx * gx + eps, power - 1.0));
    }
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto k = g.index(i, j);
      const auto kx = g.index(i + 1, j);
      const auto ky = g.index(i, j + 1);
      const double gx = (d[kx] - d[k]) * inv_h;
      const double gy = (d[ky] - d[k]) * inv_h;
      const double c = m * 2.0 * power * std::pow(gx * gx + gy * gy + eps, power - 1.0);
      couple(k, kx, c);
      couple(k, ky, c);
    }
  }
}

double PenaltyFunctional::value(const Field& x) const {
  check_grid(x, "penalty value");
  const auto& w = x.grid()->weights();
  const double eps = opts_.epsilon;
  double node = 0.0;
  switch (opts_.kind) {
    case PenaltyKind::SquaredL2:
      for (std::size_t i = 0; i < w.size(); ++i) node += w[i] * x[i] * x[i];
      return node;
    case PenaltyKind::ElasticNetSmoothed:
      for (std::size_t i = 0; i < w.size(); ++i) {
        node += w[i] * (opts_.lambda * x[i] * x[i] + std::sqrt(x[i] * x[i] + eps));
      }
      return node;
    case PenaltyKind::TVSmoothed:
      for (std::size_t i = 0; i < w.size(); ++i) node += w[i] * x[i] * x[i];
      return opts_.lambda * node + cell_sum(x, 0.5);
    case PenaltyKind::SobolevWp: {
      const Field d = x - anchor_;
      const double half_p = 0.5 * opts_.p_exponent;
      for (std::size_t i = 0; i < w.size(); ++i) node += w[i] * std::pow(d[i] * d[i] + eps, half_p);
      return node + cell_sum(d, half_p);
    }
  }
  return 0.0;
}

Field PenaltyFunctional::gradient(const Field& x) const {
  check_grid(x, "penalty gradient");
  const auto& w = x.grid()->weights();
  const double eps = opts_.epsilon;
  Field grad(x.grid());
  switch (opts_.kind) {
    case PenaltyKind::SquaredL2:
      for (std::size_t i = 0; i < w.size(); ++i) grad[i] = 2.0 * w[i] * x[i];
      break;
    case PenaltyKind::ElasticNetSmoothed:
      for (std::size_t i = 0; i < w.size(); ++i) {
        grad[i] = w[i] * (2.0 * opts_.lambda * x[i] + x[i] / std::sqrt(x[i] * x[i] + eps));
      }
      break;
    case PenaltyKind::TVSmoothed:
      for (std::size_t i = 0; i < w.size(); ++i) grad[i] = 2.0 * opts_.lambda * w[i] * x[i];
      add_cell_gradient(x, 0.5, 1.0, grad);
      break;
    case PenaltyKind::SobolevWp: {
      const Field d = x - anchor_;
      const double p = opts_.p_exponent;
      for (std::size_t i = 0; i < w.size(); ++i) {
        grad[i] = w[i] * p * std::pow(d[i] * d[i] + eps, 0.5 * p - 1.0) * d[i];
      }
      add_cell_gradient(d, 0.5 * p, 1.0, grad);
      break;
    }
  }
  return grad;
}

Eigen::SparseMatrix<double> PenaltyFunctional::curvature(const Field& x) const {
  check_grid(x, "penalty curvature");
  const auto& w = x.grid()->weights();
  const double eps = opts_.epsilon;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(w.size() * 9);
  switch (opts_.kind) {
    case PenaltyKind::SquaredL2:
      for (std::size_t i = 0; i < w.size(); ++i) trips.emplace_back(i, i, 2.0 * w[i]);
      break;
    case PenaltyKind::ElasticNetSmoothed:
      for (std::size_t i = 0; i < w.size(); ++i) {
        trips.emplace_back(i, i, w[i] * (2.0 * opts_.lambda + 1.0 / std::sqrt(x[i] * x[i] + eps)));
      }
      break;
    case PenaltyKind::TVSmoothed:
      for (std::size_t i = 0; i < w.size(); ++i) trips.emplace_back(i, i, 2.0 * opts_.lambda * w[i]);
      add_cell_curvature(x, 0.5, trips);
      break;
    case PenaltyKind::SobolevWp: {
      const Field d = x - anchor_;
      const double p = opts_.p_exponent;
      for (std::size_t i = 0; i < w.size(); ++i) {
        trips.emplace_back(i, i, w[i] * p * std::pow(d[i] * d[i] + eps, 0.5 * p - 1.0));
      }
      add_cell_curvature(d, 0.5 * p, trips);
      break;
    }
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::SparseMatrix<double> h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

Field PenaltyFunctional::riesz_gradient(const Field& x) const {
  Field grad = gradient(x);
  const auto& w = x.grid()->weights();
  for (std::size_t i = 0; i < w.size(); ++i) grad[i] /= w[i];
  return grad;
}

double PenaltyFunctional::bregman(const Field& z, const Field& x, const Field& xi) const {
  check_grid(z, "bregman");
  check_grid(x, "bregman");
  check_grid(xi, "bregman");
  if (x.values() == anchor_.values()) {
    const double mismatch = (xi.values() - xi0_.values()).lpNorm<Eigen::Infinity>();
    if (mismatch > 1e-8 * (1.0 + xi0_.values().lpNorm<Eigen::Infinity>())) {
      throw ConvexityViolation("bregman: xi is not the gradient at the anchor");
    }
  }
  const double d = value(z) - value(x) - inner(xi, z - x);
  if (d < -1e-8) {
    throw ConvexityViolation("bregman distance " + std::to_string(d) +
                             " is negative: xi is not a subgradient at x");
  }
  return d < 0.0 ? 0.0 : d;
}

double PenaltyFunctional::bregman_to_anchor(const Field& x) const {
  return bregman(x, anchor_, xi0_);
}

double PenaltyFunctional::anchored_value(const Field& x) const {
  return value(x) - anchor_value_ - inner(xi0_, x - anchor_);
}

}  // namespace birgn
