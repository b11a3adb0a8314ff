// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "smartmeter/core/billing.hpp"
#include "smartmeter/core/model.hpp"

namespace smartmeter::analytics {

/// One row of the daily bill table.
struct DailyConsumption {
    std::chrono::sys_days day;
    core::PulseCount pulse_count;
    core::EnergyKwh kwh;  // rounded to one decimal for billing
    core::Money vat;
    core::Money total;

    bool operator==(const DailyConsumption&) const = default;
};

/// Inclusive range of UTC calendar days.
struct DayRange {
    std::chrono::sys_days from;
    std::chrono::sys_days to;

    bool contains(std::chrono::sys_days d) const { return from <= d && d <= to; }
};

/// Buckets report pulses by the UTC day of reported_at and bills each day as
/// a stand-alone prepaid bill. With a range, every day of the range gets a
/// row (zero rows for silent days) and reports outside it are ignored;
/// without one, rows span the first to the last reported day.
std::vector<DailyConsumption> aggregate_daily(std::span<const PulseReport> reports,
                                              const core::TariffSchedule& schedule,
                                              std::optional<DayRange> range = std::nullopt);

DailyConsumption bill_day(std::chrono::sys_days day, core::PulseCount pulses,
                          const core::TariffSchedule& schedule);

/// "day,pulses,kwh,vat,total" header plus one line per row.
void write_daily_csv(std::ostream& out, std::span<const DailyConsumption> rows);

} // namespace smartmeter::analytics
