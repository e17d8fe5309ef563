#include "birgn/noise.hpp"

#include <random>
#include <stdexcept>

namespace birgn {

Field add_noise(const Field& exact, double delta, std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("add_noise: delta must be positive");
  for (std::uint64_t s = seed;; ++s) {
    std::mt19937_64 rng(s);
    std::normal_distribution<double> normal(0.0, 1.0);
    Field eta(exact.grid());
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = normal(rng);
    const double norm = l2_norm(eta);
    if (norm == 0.0) continue;
    Field out = exact;
    out.axpy(delta / norm, eta);
    return out;
  }
}

}  // namespace birgn
