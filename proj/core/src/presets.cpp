#include "birgn/presets.hpp"

#include <stdexcept>

#include "birgn/diffusion.hpp"
#include "birgn/reaction.hpp"

namespace birgn {

double reaction1d_truth(double t) {
  if (0.3 <= t && t <= 0.4) return 0.5;
  if (0.6 <= t && t <= 0.7) return 1.0;
  return 0.0;
}

double reaction2d_truth(double x, double y) {
  const double dx = x - 0.3;
  const double dy = y - 0.7;
  if (dx * dx + dy * dy <= 0.15 * 0.15) return 1.0;
  if (0.6 <= x && x <= 0.8 && 0.2 <= y && y <= 0.5) return 0.5;
  return 0.0;
}

double diffusion1d_truth(double t) {
  if (t <= 0.3) return 1.0;
  if (t < 0.35) return 20.0 * t - 5.0;
  if (t <= 0.65) return 2.0;
  if (t < 0.7) return 15.0 - 20.0 * t;
  return 1.0;
}

double diffusion1d_source(double t) {
  if (t <= 0.3) return -2.0;
  if (t < 0.35) return 30.0 - 80.0 * t;
  if (t <= 0.65) return -4.0;
  if (t < 0.7) return 80.0 * t - 50.0;
  return -2.0;
}

std::vector<std::string> preset_names() {
  return {"reaction1d-paper", "reaction2d-paper", "diffusion1d-paper"};
}

Problem make_preset(std::string_view name, int subdivisions) {
  if (name == "reaction1d-paper") {
    auto grid = Grid::unit_interval(subdivisions > 0 ? subdivisions : 100);
    Field truth = Field::sample(grid, [](double t, double) { return reaction1d_truth(t); });
    Field source = Field::sample(grid, [](double t, double) { return (1.0 + 5.0 * t) * reaction1d_truth(t); });
    auto op = std::make_shared<Reaction1D>(std::move(source), 1.0, 6.0);
    return {std::string(name), op, std::move(truth), Field(grid, 0.0)};
  }
  if (name == "reaction2d-paper") {
    auto grid = Grid::unit_square(subdivisions > 0 ? subdivisions : 30);
    Field truth = Field::sample(grid, reaction2d_truth);
    Field source = Field::sample(grid, [](double x, double y) { return (x + y) * reaction2d_truth(x, y); });
    Field boundary = Field::sample(grid, [](double x, double y) { return x + y; });
    auto op = std::make_shared<Reaction2D>(std::move(source), std::move(boundary));
    return {std::string(name), op, std::move(truth), Field(grid, 0.0)};
  }
  if (name == "diffusion1d-paper") {
    auto grid = Grid::unit_interval(subdivisions > 0 ? subdivisions : 400);
    Field truth = Field::sample(grid, [](double t, double) { return diffusion1d_truth(t); });
    auto op = std::make_shared<Diffusion1D>(grid, diffusion1d_source, 0.0, 0.0);
    return {std::string(name), op, std::move(truth), Field(grid, 1.0)};
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace birgn
