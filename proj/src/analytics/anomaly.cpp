// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/analytics/anomaly.hpp"

#include <algorithm>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::analytics {

std::string_view to_string(AnomalyReason reason) {
    return reason == AnomalyReason::above_band ? "above_band" : "below_band";
}

std::vector<AnomalyFlag> flag_anomalies(std::span<const DailyConsumption> rows,
                                        std::size_t trailing_window, core::Ratio margin_ratio) {
    if (trailing_window < 2) {
        throw WindowTooShort("trailing window must cover at least 2 days");
    }
    using core::EnergyKwh;
    using core::Ratio;

    std::vector<AnomalyFlag> flags;
    for (std::size_t i = trailing_window; i < rows.size(); ++i) {
        const auto window = rows.subspan(i - trailing_window, trailing_window);
        const auto [lo, hi] = std::minmax_element(
            window.begin(), window.end(),
            [](const auto& a, const auto& b) { return a.kwh < b.kwh; });
        const std::int64_t base = lo->kwh.milliwatt_hours();
        const std::int64_t max = hi->kwh.milliwatt_hours();
        const std::int64_t x = rows[i].kwh.milliwatt_hours();

        // margin = ppm * (max - base) / 1e6; compare scaled by 1e6 to stay exact.
        const __int128 margin_scaled = static_cast<__int128>(margin_ratio.ppm()) * (max - base);
        const __int128 above = static_cast<__int128>(x - max) * Ratio::kOne;
        const __int128 below = static_cast<__int128>(base - x) * Ratio::kOne;

        std::optional<AnomalyReason> reason;
        if (above > margin_scaled) {
            reason = AnomalyReason::above_band;
        } else if (below > margin_scaled) {
            reason = AnomalyReason::below_band;
        }
        if (reason) {
            const auto margin =
                core::div_round_half_up(static_cast<std::int64_t>(margin_scaled), Ratio::kOne);
            flags.push_back({rows[i].day, rows[i].kwh, *reason,
                             EnergyKwh::from_milliwatt_hours(base - margin),
                             EnergyKwh::from_milliwatt_hours(max + margin)});
        }
    }
    return flags;
}

} // namespace smartmeter::analytics
