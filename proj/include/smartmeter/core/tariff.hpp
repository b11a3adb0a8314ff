// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "smartmeter/core/energy.hpp"
#include "smartmeter/core/money.hpp"
#include "smartmeter/core/ratio.hpp"

namespace smartmeter::core {

/// One consumption band. `units` is the span of the band; an empty span marks
/// the unbounded final band.
struct TariffTier {
    std::optional<EnergyKwh> units;
    Money price_per_unit;

    bool unbounded() const { return !units.has_value(); }
    bool operator==(const TariffTier&) const = default;
};

struct TariffSchedule {
    std::vector<TariffTier> tiers;
    Money demand_charge_prepaid = Money::from_taka(150);
    Money demand_charge_postpaid = Money::from_taka(50);
    Ratio vat_rate = Ratio::percent(5);
    Money meter_rent = Money::from_taka(40);
    Ratio rebate_rate = Ratio::percent(1);

    /// Throws InvalidSchedule when a structural invariant is broken: no tiers,
    /// a non-final unbounded tier, a zero-width bounded tier, a negative
    /// money field, or a rate outside [0, 1].
    void validate() const;

    /// Sum of all bounded spans, or nullopt when the last tier is unbounded.
    std::optional<EnergyKwh> total_span() const;

    bool operator==(const TariffSchedule&) const = default;
};

/// Single unbounded tier at 4.00 BDT/unit with the default charges. Every row
/// of the published seven-day bill table is reproduced by this schedule.
TariffSchedule demo_flat_schedule();

} // namespace smartmeter::core
