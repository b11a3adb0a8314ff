// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "smartmeter/core/energy.hpp"
#include "smartmeter/core/money.hpp"
#include "smartmeter/core/tariff.hpp"

namespace smartmeter::core {

/// Greedy split of a consumption figure over the schedule's tiers.
struct TierSplit {
    std::vector<EnergyKwh> units;  // one per tier, sums to the input
    std::vector<Money> charges;    // per-tier charge, each rounded half-up
    Money energy_charge;           // sum of charges
};

/// Throws UnitsExceedSchedule when `units` overflow a bounded schedule.
TierSplit tiered_energy_charge(EnergyKwh units, const TariffSchedule& schedule);

struct BillBreakdown {
    std::vector<Money> tier_charges;
    Money energy_charge;
    Money demand_charge;
    Money vat;
    Money total;
    EnergyKwh billed_units;

    bool operator==(const BillBreakdown&) const = default;
};

/// Prepaid bill on an already-rounded consumption figure.
BillBreakdown prepaid_total_cost(EnergyKwh units, const TariffSchedule& schedule);

/// pulses -> kWh -> one-decimal rounding -> prepaid bill.
BillBreakdown prepaid_bill_for_pulses(PulseCount pulses, const TariffSchedule& schedule);

struct PostpaidBreakdown {
    Money paid_amount;
    Money vat;
    Money meter_rent;
    Money demand_charge;
    Money purchasable;
    Money rebate;
    EnergyKwh purchasable_units;

    bool operator==(const PostpaidBreakdown&) const = default;
};

/// Throws InsufficientPayment when the fixed charges and VAT exceed `paid`.
PostpaidBreakdown postpaid_purchasable(Money paid, const TariffSchedule& schedule);

/// Largest consumption, in whole 0.1 kWh steps, whose tiered energy charge
/// does not exceed `budget`. Capped at the span of a bounded schedule.
EnergyKwh units_purchasable(Money budget, const TariffSchedule& schedule);

} // namespace smartmeter::core
