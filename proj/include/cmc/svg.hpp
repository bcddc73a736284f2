#pragma once

#include <string>

#include "cmc/sweep.hpp"

namespace cmc {

// Accuracy, recall and specificity against component count, with a vertical
// marker at the operating point.
std::string sweep_chart_svg(const SweepCurve& curve, int c0, const std::string& title);

}  // namespace cmc
