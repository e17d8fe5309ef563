#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "birgn/field.hpp"

namespace birgn::cli {

/// 1D fields: line plot of truth (dashed) and reconstruction over [0,1].
/// 2D fields: side-by-side heat maps sharing one colour scale.
void write_plot_svg(std::ostream& out, const Field& reconstruction, const std::optional<Field>& truth,
                    const std::string& title);

}  // namespace birgn::cli
