#pragma once

#include <string>

#include "cascnn/report.hpp"

namespace cascnn {

/// Self-contained SVG of the compared FROC curves: FP/scan on a log2 x-axis
/// from 0.125 to 8, sensitivity from 0 to 1, with a legend.
std::string froc_svg(const RunComparison& comparison);

}  // namespace cascnn
