// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "smartmeter/analytics/daily.hpp"
#include "smartmeter/core/classification.hpp"

namespace smartmeter::analytics {

struct ChartPoint {
    std::string day;  // YYYY-MM-DD
    core::EnergyKwh kwh;

    bool operator==(const ChartPoint&) const = default;
};

struct WeeklyReport {
    core::WeekClassification classification;
    std::vector<ChartPoint> series;  // input day order
};

/// Throws EmptySeries when rows is empty.
WeeklyReport weekly_report(std::span<const DailyConsumption> rows,
                           core::AverageRounding rounding = core::AverageRounding::half_up);

std::vector<ChartPoint> chart_series(std::span<const DailyConsumption> rows);

/// "day,kwh" header plus one line per point; header only for an empty series.
void write_chart_csv(std::ostream& out, std::span<const ChartPoint> series);

} // namespace smartmeter::analytics
