// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "smartmeter/core/money.hpp"

namespace smartmeter::core {

/// Dimensionless rate (VAT, rebate, alert threshold) held in parts per million.
class Ratio {
public:
    static constexpr std::int64_t kOne = 1'000'000;

    constexpr Ratio() = default;
    static constexpr Ratio from_ppm(std::int64_t ppm) { return Ratio{ppm}; }
    static constexpr Ratio percent(std::int64_t pct) { return Ratio{pct * 10'000}; }
    static Ratio parse(std::string_view text);

    constexpr std::int64_t ppm() const { return ppm_; }
    std::string to_string() const;

    /// round_half_up(ratio * amount) in paisa.
    Money apply(Money amount) const;

    constexpr auto operator<=>(const Ratio&) const = default;

private:
    constexpr explicit Ratio(std::int64_t ppm) : ppm_(ppm) {}

    std::int64_t ppm_ = 0;
};

} // namespace smartmeter::core
