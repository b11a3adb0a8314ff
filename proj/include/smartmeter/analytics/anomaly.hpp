// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "smartmeter/analytics/daily.hpp"
#include "smartmeter/core/ratio.hpp"

namespace smartmeter::analytics {

enum class AnomalyReason { above_band, below_band };

std::string_view to_string(AnomalyReason reason);

/// A day whose consumption fell outside the band spanned by the days before
/// it, widened by a margin on each side.
struct AnomalyFlag {
    std::chrono::sys_days day;
    core::EnergyKwh kwh;
    AnomalyReason reason;
    // Band endpoints rounded to the nearest mWh for display; the flag
    // decision itself is exact.
    core::EnergyKwh band_low;
    core::EnergyKwh band_high;

    bool operator==(const AnomalyFlag&) const = default;
};

/// Every row with at least `trailing_window` predecessors is tested against
/// band = [min - m, max + m] of those predecessors, m = margin_ratio x (max -
/// min). Rows earlier in the series are not tested.
/// Throws WindowTooShort when trailing_window < 2.
std::vector<AnomalyFlag> flag_anomalies(std::span<const DailyConsumption> rows,
                                        std::size_t trailing_window,
                                        core::Ratio margin_ratio = core::Ratio::percent(10));

} // namespace smartmeter::analytics
