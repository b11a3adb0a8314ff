// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/analytics/weekly.hpp"

namespace smartmeter::analytics {

std::vector<ChartPoint> chart_series(std::span<const DailyConsumption> rows) {
    std::vector<ChartPoint> series;
    series.reserve(rows.size());
    for (const auto& row : rows) {
        series.push_back({format_date(row.day), row.kwh});
    }
    return series;
}

WeeklyReport weekly_report(std::span<const DailyConsumption> rows,
                           core::AverageRounding rounding) {
    std::vector<core::EnergyKwh> daily;
    daily.reserve(rows.size());
    for (const auto& row : rows) {
        daily.push_back(row.kwh);
    }
    return WeeklyReport{core::classify_week(daily, rounding), chart_series(rows)};
}

void write_chart_csv(std::ostream& out, std::span<const ChartPoint> series) {
    out << "day,kwh\n";
    for (const auto& point : series) {
        out << point.day << ',' << point.kwh.to_string(1) << '\n';
    }
}

} // namespace smartmeter::analytics
