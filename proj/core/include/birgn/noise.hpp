#pragma once

#include <cstdint>

#include "birgn/field.hpp"

namespace birgn {

/// Returns exact + delta * eta / l2_norm(eta) for a seeded standard-normal eta,
/// so that l2_norm(result - exact) equals delta up to rounding.
Field add_noise(const Field& exact, double delta, std::uint64_t seed);

}  // namespace birgn
