#pragma once

#include <string>

#include "codap/sweeps.hpp"

namespace codap {

/// Minimal line plot of MSP_position and MSP_shape against the swept
/// parameter: one row of panels per noise level, one polyline per
/// energy/angle. Axis values are placed at equal spacing.
std::string sweep_svg(const SweepResult& result);

}  // namespace codap
