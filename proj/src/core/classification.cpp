// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/classification.hpp"

#include <algorithm>
#include <stdexcept>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::core {

WeekClassification classify_week(std::span<const EnergyKwh> daily, AverageRounding rounding) {
    if (daily.empty()) {
        throw EmptySeries("cannot classify an empty consumption series");
    }
    constexpr std::int64_t kHundredth = EnergyKwh::kMilliWhPerKwh / 100;

    const auto [lo, hi] = std::minmax_element(daily.begin(), daily.end());
    std::int64_t sum = 0;
    for (const auto& day : daily) {
        if (day.milliwatt_hours() < 0) {
            throw std::invalid_argument("daily consumption must be non-negative");
        }
        sum += day.milliwatt_hours();
    }
    const auto divisor = static_cast<std::int64_t>(daily.size()) * kHundredth;
    const std::int64_t hundredths = rounding == AverageRounding::half_up
                                        ? div_round_half_up(sum, divisor)
                                        : sum / divisor;
    // Sub-hundredth inputs can round the mean outside [min, max].
    const auto average = std::clamp(EnergyKwh::from_milliwatt_hours(hundredths * kHundredth), *lo, *hi);
    return WeekClassification{*lo, *hi, average};
}

bool prepaid_alert_due(Money balance, Money consumed_cost, Ratio threshold) {
    if (balance.paisa() <= 0) {
        throw NonPositiveBalance("prepaid balance must be positive, got " + balance.to_string());
    }
    const __int128 lhs = static_cast<__int128>(consumed_cost.paisa()) * Ratio::kOne;
    const __int128 rhs = static_cast<__int128>(threshold.ppm()) * balance.paisa();
    return lhs >= rhs;
}

} // namespace smartmeter::core
