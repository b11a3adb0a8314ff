// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace smartmeter::core {

/// Parses a plain decimal literal ("12", "-0.05", "14.208") into an integer
/// scaled by 10^scale. More fractional digits than `scale` is a ParseError,
/// never a silent rounding.
std::int64_t parse_scaled(std::string_view text, int scale);

/// Renders value / 10^scale with exactly `scale` fractional digits.
std::string format_scaled(std::int64_t value, int scale);

} // namespace smartmeter::core
