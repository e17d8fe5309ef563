#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "birgn/forward.hpp"

namespace birgn {

/// A forward operator bundled with its true parameter and default initial guess.
struct Problem {
  std::string name;
  std::shared_ptr<const ForwardOperator> op;
  Field truth;
  /// Initial guess x0, also the penalty anchor.
  Field initial_guess;
};

/// Names accepted by make_preset().
std::vector<std::string> preset_names();

/// reaction1d-paper, reaction2d-paper or diffusion1d-paper.
/// subdivisions <= 0 selects the preset's own resolution (100, 30, 400).
Problem make_preset(std::string_view name, int subdivisions = 0);

/// Piecewise-constant reaction coefficient: 0.5 on [0.3,0.4], 1 on [0.6,0.7], else 0.
double reaction1d_truth(double t);
/// 1 inside the disc of radius 0.15 at (0.3,0.7), 0.5 on [0.6,0.8]x[0.2,0.5], else 0.
double reaction2d_truth(double x, double y);
/// Diffusion coefficient with plateaus 1, 2, 1 joined by linear ramps.
double diffusion1d_truth(double t);
/// Source for which u = t(t-1) solves the diffusion problem with diffusion1d_truth.
double diffusion1d_source(double t);

}  // namespace birgn
