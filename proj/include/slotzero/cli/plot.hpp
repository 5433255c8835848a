#pragma once

#include <string>
#include <vector>

#include "slotzero/trainer/run.hpp"

namespace sz::cli {

/// Two stacked panels: eval success against env steps, then training loss against env steps.
/// Each data point is a <circle class="point">.
std::string render_learning_curve_svg(const std::vector<trainer::MetricsRow>& rows);

/// Plain-text table: final and best eval success, final loss terms, fault count.
std::string summary_table(const std::vector<trainer::MetricsRow>& rows);

}  // namespace sz::cli
