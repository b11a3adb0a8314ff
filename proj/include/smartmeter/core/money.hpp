// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace smartmeter::core {

/// Integer division of a signed numerator by a positive denominator, rounding
/// halves away from zero.
std::int64_t div_round_half_up(std::int64_t numerator, std::int64_t denominator);

/// Amount of BDT held exactly in paisa (1 BDT = 100 paisa).
class Money {
public:
    constexpr Money() = default;

    static constexpr Money from_paisa(std::int64_t paisa) { return Money{paisa}; }
    static constexpr Money from_taka(std::int64_t taka) { return Money{taka * 100}; }

    /// Parses "217.14", "150", "-5.00". At most two fractional digits.
    static Money parse(std::string_view text);

    constexpr std::int64_t paisa() const { return paisa_; }

    /// Two-decimal rendering, e.g. "10.34".
    std::string to_string() const;

    constexpr Money operator+(Money other) const { return Money{paisa_ + other.paisa_}; }
    constexpr Money operator-(Money other) const { return Money{paisa_ - other.paisa_}; }
    constexpr Money operator-() const { return Money{-paisa_}; }
    constexpr Money& operator+=(Money other) {
        paisa_ += other.paisa_;
        return *this;
    }
    constexpr Money& operator-=(Money other) {
        paisa_ -= other.paisa_;
        return *this;
    }

    constexpr auto operator<=>(const Money&) const = default;

private:
    constexpr explicit Money(std::int64_t paisa) : paisa_(paisa) {}

    std::int64_t paisa_ = 0;
};

} // namespace smartmeter::core
