// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/money.hpp"

#include "smartmeter/core/decimal.hpp"
#include "smartmeter/core/ratio.hpp"

namespace smartmeter::core {

std::int64_t div_round_half_up(std::int64_t numerator, std::int64_t denominator) {
    const std::int64_t quotient = numerator / denominator;
    const std::int64_t remainder = numerator % denominator;
    if (remainder == 0) {
        return quotient;
    }
    const std::int64_t twice = (remainder < 0 ? -remainder : remainder) * 2;
    if (twice >= denominator) {
        return numerator < 0 ? quotient - 1 : quotient + 1;
    }
    return quotient;
}

Money Money::parse(std::string_view text) { return Money{parse_scaled(text, 2)}; }

std::string Money::to_string() const { return format_scaled(paisa_, 2); }

Ratio Ratio::parse(std::string_view text) { return Ratio{parse_scaled(text, 6)}; }

std::string Ratio::to_string() const {
    std::string s = format_scaled(ppm_, 6);
    // "0.050000" -> "0.05"
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') {
        s.pop_back();
    }
    return s;
}

Money Ratio::apply(Money amount) const {
    return Money::from_paisa(div_round_half_up(amount.paisa() * ppm_, kOne));
}

} // namespace smartmeter::core
