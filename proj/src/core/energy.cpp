// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/energy.hpp"

#include "smartmeter/core/decimal.hpp"
#include "smartmeter/core/errors.hpp"
#include "smartmeter/core/money.hpp"

namespace smartmeter::core {

EnergyKwh EnergyKwh::parse_kwh(std::string_view text) {
    const auto mwh = parse_scaled(text, 6);
    if (mwh < 0) {
        throw ParseError("negative energy '" + std::string(text) + "'");
    }
    return EnergyKwh{mwh};
}

std::string EnergyKwh::to_string(int decimals) const {
    if (decimals < 0 || decimals > 6) {
        decimals = 6;
    }
    std::int64_t step = 1;
    for (int i = decimals; i < 6; ++i) {
        step *= 10;
    }
    return format_scaled(div_round_half_up(mwh_, step), decimals);
}

EnergyKwh pulses_to_kwh(PulseCount pulses) {
    return EnergyKwh::from_milliwatt_hours(static_cast<std::int64_t>(pulses.count) *
                                           EnergyKwh::kMilliWhPerPulse);
}

EnergyKwh round_kwh_billing(EnergyKwh energy) {
    constexpr std::int64_t kTenth = EnergyKwh::kMilliWhPerKwh / 10;
    return EnergyKwh::from_milliwatt_hours(div_round_half_up(energy.milliwatt_hours(), kTenth) *
                                           kTenth);
}

} // namespace smartmeter::core
