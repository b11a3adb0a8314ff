// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/analytics/daily.hpp"

#include <map>

namespace smartmeter::analytics {

using namespace std::chrono;

DailyConsumption bill_day(sys_days day, core::PulseCount pulses,
                          const core::TariffSchedule& schedule) {
    const auto bill = core::prepaid_bill_for_pulses(pulses, schedule);
    return DailyConsumption{day, pulses, bill.billed_units, bill.vat, bill.total};
}

std::vector<DailyConsumption> aggregate_daily(std::span<const PulseReport> reports,
                                              const core::TariffSchedule& schedule,
                                              std::optional<DayRange> range) {
    std::map<sys_days, std::uint64_t> buckets;
    for (const auto& report : reports) {
        const auto day = day_of(report.reported_at);
        if (range && !range->contains(day)) {
            continue;
        }
        buckets[day] += report.pulse_delta;
    }

    std::vector<DailyConsumption> rows;
    sys_days first;
    sys_days last;
    if (range) {
        first = range->from;
        last = range->to;
    } else if (!buckets.empty()) {
        first = buckets.begin()->first;
        last = buckets.rbegin()->first;
    } else {
        return rows;
    }
    for (auto day = first; day <= last; day += days{1}) {
        const auto it = buckets.find(day);
        rows.push_back(bill_day(day, {it == buckets.end() ? 0 : it->second}, schedule));
    }
    return rows;
}

void write_daily_csv(std::ostream& out, std::span<const DailyConsumption> rows) {
    out << "day,pulses,kwh,vat,total\n";
    for (const auto& row : rows) {
        out << format_date(row.day) << ',' << row.pulse_count.count << ','
            << row.kwh.to_string(1) << ',' << row.vat.to_string() << ','
            << row.total.to_string() << '\n';
    }
}

} // namespace smartmeter::analytics
