#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdlhn/experiments.hpp"

namespace mdlhn {

/// Line chart of mean slot count against golden count, one series per
/// exemplars-per-digit value, with the identity line for reference.
std::string slot_count_svg(std::span<const ConditionSummary> rows, std::string_view title);

/// Splits rows by (type, noise, regime, followup) and writes one chart per
/// group as slots_<type>_<noise>_<regime>[_followup].svg. Returns the paths.
std::vector<std::filesystem::path> write_sweep_plots(const std::filesystem::path& dir,
                                                     std::span<const ConditionSummary> rows);

}  // namespace mdlhn
