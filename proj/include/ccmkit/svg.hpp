#pragma once

#include "ccmkit/report.hpp"

#include <string>
#include <vector>

namespace ccmkit {

/// Convergence plot: rho against library size, one mean polyline and one
/// filled mean +/- sd band per curve, axes, and a legend. Output depends only
/// on the input, byte for byte.
std::string convergence_svg(const std::vector<CurveFile>& curves, const std::string& title = "Cross-map skill");

} // namespace ccmkit
