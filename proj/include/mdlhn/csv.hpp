#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mdlhn {

/// Fixed-point text with `decimals` digits; negative zero prints as zero.
std::string format_fixed(double value, int decimals);

std::vector<std::string_view> split_csv_line(std::string_view line);

/// Whole-field parse; throws std::runtime_error on trailing garbage.
double parse_double(std::string_view text);

}  // namespace mdlhn
