// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "smartmeter/core/energy.hpp"
#include "smartmeter/core/money.hpp"
#include "smartmeter/core/ratio.hpp"

namespace smartmeter::core {

enum class AverageRounding { half_up, truncate };

/// Base (minimum day), maximum day and the two-decimal mean of a series.
struct WeekClassification {
    EnergyKwh base_kwh;
    EnergyKwh max_kwh;
    EnergyKwh average_kwh;

    bool operator==(const WeekClassification&) const = default;
};

/// Throws EmptySeries on an empty input.
WeekClassification classify_week(std::span<const EnergyKwh> daily,
                                 AverageRounding rounding = AverageRounding::half_up);

/// True once consumed_cost reaches `threshold` of balance (default 80 %).
/// Throws NonPositiveBalance when balance <= 0.
bool prepaid_alert_due(Money balance, Money consumed_cost,
                       Ratio threshold = Ratio::percent(80));

} // namespace smartmeter::core
