#pragma once

#include <string>

#include "tomo/success_grid.hpp"

namespace tomo {

// Standalone SVG phase map: grayscale success probabilities over the
// (d, threshold) lattice for one burn-in time, with the threshold curve
// overlaid as a polyline.
std::string render_phase_svg(const SuccessGrid& grid, const ThresholdCurve& curve);

}  // namespace tomo
