// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/tariff.hpp"

#include <string>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::core {

namespace {

void require_rate(Ratio rate, const char* name) {
    if (rate.ppm() < 0 || rate.ppm() > Ratio::kOne) {
        throw InvalidSchedule(std::string(name) + " must lie in [0, 1], got " + rate.to_string());
    }
}

void require_non_negative(Money m, const char* name) {
    if (m.paisa() < 0) {
        throw InvalidSchedule(std::string(name) + " must be >= 0, got " + m.to_string());
    }
}

} // namespace

void TariffSchedule::validate() const {
    if (tiers.empty()) {
        throw InvalidSchedule("schedule has no tiers");
    }
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const auto& tier = tiers[i];
        if (tier.unbounded() && i + 1 != tiers.size()) {
            throw InvalidSchedule("only the final tier may be unbounded (tier " +
                                  std::to_string(i + 1) + ")");
        }
        if (!tier.unbounded() && tier.units->milliwatt_hours() <= 0) {
            throw InvalidSchedule("tier " + std::to_string(i + 1) + " has a non-positive span");
        }
        require_non_negative(tier.price_per_unit, "price_per_unit");
    }
    require_non_negative(demand_charge_prepaid, "demand_charge_prepaid");
    require_non_negative(demand_charge_postpaid, "demand_charge_postpaid");
    require_non_negative(meter_rent, "meter_rent");
    require_rate(vat_rate, "vat_rate");
    require_rate(rebate_rate, "rebate_rate");
}

std::optional<EnergyKwh> TariffSchedule::total_span() const {
    EnergyKwh span;
    for (const auto& tier : tiers) {
        if (tier.unbounded()) {
            return std::nullopt;
        }
        span += *tier.units;
    }
    return span;
}

TariffSchedule demo_flat_schedule() {
    TariffSchedule schedule;
    schedule.tiers.push_back(TariffTier{std::nullopt, Money::from_paisa(400)});
    return schedule;
}

} // namespace smartmeter::core
