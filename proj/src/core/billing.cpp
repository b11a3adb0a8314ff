// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/billing.hpp"

#include <algorithm>
#include <stdexcept>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::core {

namespace {

constexpr std::int64_t kPerKwh = EnergyKwh::kMilliWhPerKwh;
constexpr std::int64_t kTenthKwh = kPerKwh / 10;

// round_half_up(mwh * price / 1 kWh), in paisa.
Money charge_for(EnergyKwh units, Money price) {
    const __int128 product =
        static_cast<__int128>(units.milliwatt_hours()) * price.paisa();
    const __int128 q = product / kPerKwh;
    const __int128 r = product % kPerKwh;
    return Money::from_paisa(static_cast<std::int64_t>(2 * r >= kPerKwh ? q + 1 : q));
}

} // namespace

TierSplit tiered_energy_charge(EnergyKwh units, const TariffSchedule& schedule) {
    if (units.milliwatt_hours() < 0) {
        throw std::invalid_argument("consumption must be non-negative");
    }
    schedule.validate();

    TierSplit split;
    split.units.reserve(schedule.tiers.size());
    split.charges.reserve(schedule.tiers.size());
    EnergyKwh remaining = units;
    for (const auto& tier : schedule.tiers) {
        const EnergyKwh take = tier.unbounded() ? remaining : std::min(remaining, *tier.units);
        remaining = remaining - take;
        const Money charge = charge_for(take, tier.price_per_unit);
        split.units.push_back(take);
        split.charges.push_back(charge);
        split.energy_charge += charge;
    }
    if (remaining.milliwatt_hours() > 0) {
        throw UnitsExceedSchedule(units.to_string(3) + " kWh exceeds the schedule span of " +
                                  schedule.total_span()->to_string(3) + " kWh");
    }
    return split;
}

BillBreakdown prepaid_total_cost(EnergyKwh units, const TariffSchedule& schedule) {
    auto split = tiered_energy_charge(units, schedule);
    BillBreakdown bill;
    bill.tier_charges = std::move(split.charges);
    bill.energy_charge = split.energy_charge;
    bill.demand_charge = schedule.demand_charge_prepaid;
    bill.vat = schedule.vat_rate.apply(bill.energy_charge + bill.demand_charge);
    bill.total = bill.energy_charge + bill.demand_charge + bill.vat;
    bill.billed_units = units;
    return bill;
}

BillBreakdown prepaid_bill_for_pulses(PulseCount pulses, const TariffSchedule& schedule) {
    return prepaid_total_cost(round_kwh_billing(pulses_to_kwh(pulses)), schedule);
}

EnergyKwh units_purchasable(Money budget, const TariffSchedule& schedule) {
    schedule.validate();
    if (budget.paisa() < 0) {
        throw InsufficientPayment("negative budget " + budget.to_string());
    }

    std::int64_t total_mwh = 0;
    Money remaining = budget;
    for (const auto& tier : schedule.tiers) {
        const std::int64_t price = tier.price_per_unit.paisa();
        if (!tier.unbounded()) {
            const Money full = charge_for(*tier.units, tier.price_per_unit);
            if (full <= remaining) {
                total_mwh += tier.units->milliwatt_hours();
                remaining -= full;
                continue;
            }
        } else if (price == 0) {
            throw InvalidSchedule("an unbounded tier priced at zero makes energy unlimited");
        }
        // charge(w) <= remaining  <=>  w * price < remaining * 1 kWh + kWh / 2
        const __int128 limit = static_cast<__int128>(remaining.paisa()) * kPerKwh + kPerKwh / 2 - 1;
        total_mwh += static_cast<std::int64_t>(limit / price);
        break;
    }
    return EnergyKwh::from_milliwatt_hours(total_mwh / kTenthKwh * kTenthKwh);
}

PostpaidBreakdown postpaid_purchasable(Money paid, const TariffSchedule& schedule) {
    schedule.validate();
    PostpaidBreakdown out;
    out.paid_amount = paid;
    out.meter_rent = schedule.meter_rent;
    out.demand_charge = schedule.demand_charge_postpaid;
    if (paid < out.meter_rent + out.demand_charge) {
        throw InsufficientPayment("paid " + paid.to_string() + " does not cover meter rent " +
                                  out.meter_rent.to_string() + " and demand charge " +
                                  out.demand_charge.to_string());
    }
    out.vat = schedule.vat_rate.apply(paid - out.meter_rent);
    out.purchasable = paid - (out.vat + out.meter_rent + out.demand_charge);
    if (out.purchasable.paisa() < 0) {
        throw InsufficientPayment("paid " + paid.to_string() + " leaves " +
                                  out.purchasable.to_string() + " after VAT and fixed charges");
    }
    out.rebate = schedule.rebate_rate.apply(paid - out.vat + out.demand_charge);
    out.purchasable_units = units_purchasable(out.purchasable, schedule);
    return out;
}

} // namespace smartmeter::core
