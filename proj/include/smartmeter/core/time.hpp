// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace smartmeter {

/// UTC instant on the simulated clock, millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

/// "2019-06-01T00:00:06.000Z"
std::string format_timestamp(Timestamp t);
/// Accepts "YYYY-MM-DDThh:mm:ss[.fff]Z" and a bare "YYYY-MM-DD".
Timestamp parse_timestamp(std::string_view text);

/// "2019-06-01"
std::string format_date(std::chrono::sys_days day);
std::chrono::sys_days parse_date(std::string_view text);

/// UTC calendar day containing t.
inline std::chrono::sys_days day_of(Timestamp t) {
    return std::chrono::floor<std::chrono::days>(t);
}

} // namespace smartmeter
