// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace smartmeter::core {

/// Tally of meter pulses. One pulse is 1 Wh.
struct PulseCount {
    std::uint64_t count = 0;

    constexpr auto operator<=>(const PulseCount&) const = default;
};

/// Energy held exactly in milliwatt-hours.
class EnergyKwh {
public:
    static constexpr std::int64_t kMilliWhPerKwh = 1'000'000;
    static constexpr std::int64_t kMilliWhPerPulse = 1'000;

    constexpr EnergyKwh() = default;
    static constexpr EnergyKwh from_milliwatt_hours(std::int64_t mwh) { return EnergyKwh{mwh}; }
    static constexpr EnergyKwh from_watt_hours(std::int64_t wh) { return EnergyKwh{wh * 1000}; }
    /// Parses a decimal kWh literal with up to six fractional digits.
    static EnergyKwh parse_kwh(std::string_view text);

    constexpr std::int64_t milliwatt_hours() const { return mwh_; }
    double kwh() const { return static_cast<double>(mwh_) / kMilliWhPerKwh; }

    /// Fixed-point kWh rendering with `decimals` digits (0..6), half-up.
    std::string to_string(int decimals = 1) const;

    constexpr EnergyKwh operator+(EnergyKwh o) const { return EnergyKwh{mwh_ + o.mwh_}; }
    constexpr EnergyKwh operator-(EnergyKwh o) const { return EnergyKwh{mwh_ - o.mwh_}; }
    constexpr EnergyKwh& operator+=(EnergyKwh o) {
        mwh_ += o.mwh_;
        return *this;
    }

    constexpr auto operator<=>(const EnergyKwh&) const = default;

private:
    constexpr explicit EnergyKwh(std::int64_t mwh) : mwh_(mwh) {}

    std::int64_t mwh_ = 0;
};

EnergyKwh pulses_to_kwh(PulseCount pulses);

/// Half-up rounding to one decimal kWh; billing consumes this figure.
EnergyKwh round_kwh_billing(EnergyKwh energy);

} // namespace smartmeter::core
