#include "birgn/forward.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "birgn/errors.hpp"

namespace birgn {

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Reaction1D: return "reaction1d";
    case OperatorKind::Reaction2D: return "reaction2d";
    case OperatorKind::Diffusion1D: return "diffusion1d";
    case OperatorKind::SyntheticLinear: return "synthetic";
  }
  return "?";
}

void ForwardOperator::check_parameter(const Field& x) const {
  if (!same_grid(x.grid(), parameter_grid())) {
    throw GridMismatch(std::string(to_string(kind())) + ": parameter is not on the operator's grid");
  }
  if (!x.all_finite()) throw InvalidField("parameter has non-finite values");
  const double lb = lower_bound();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lb) {
      throw DomainError(std::string(to_string(kind())) + ": parameter value " + std::to_string(x[i]) +
                        " at node " + std::to_string(i) + " is below the lower bound " +
                        std::to_string(lb));
    }
  }
}

Field ForwardOperator::clip_to_domain(const Field& x) const {
  Field out = x;
  const double lb = lower_bound();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], lb);
  return out;
}

double estimate_operator_norm(const Linearization& lin, int iterations) {
  if (iterations < 1) iterations = 1;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Field v(lin.base().grid());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = uniform(rng);
  double nv = l2_norm(v);
  v *= 1.0 / nv;

  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Field next = lin.adjoint(lin.tangent(v));
    const double norm = l2_norm(next);
    estimate = norm;
    if (norm == 0.0) return 0.0;
    v = (1.0 / norm) * std::move(next);
  }
  return std::sqrt(estimate);
}

}  // namespace birgn
