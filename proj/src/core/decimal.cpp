// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/decimal.hpp"

#include <limits>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::core {

std::int64_t parse_scaled(std::string_view text, int scale) {
    const std::string original(text);
    if (text.empty()) {
        throw ParseError("empty decimal literal");
    }
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_point = false;
    bool seen_digit = false;
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max() / 100;
    for (char c : text) {
        if (c == '.') {
            if (seen_point) {
                throw ParseError("malformed decimal '" + original + "'");
            }
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9') {
            throw ParseError("malformed decimal '" + original + "'");
        }
        seen_digit = true;
        if (seen_point) {
            if (++frac_digits > scale) {
                if (c != '0') {
                    throw ParseError("too many fractional digits in '" + original + "'");
                }
                continue;
            }
            frac = frac * 10 + (c - '0');
        } else {
            if (whole > kMax) {
                throw ParseError("decimal out of range '" + original + "'");
            }
            whole = whole * 10 + (c - '0');
        }
    }
    if (!seen_digit) {
        throw ParseError("malformed decimal '" + original + "'");
    }
    for (int i = std::min(frac_digits, scale); i < scale; ++i) {
        frac *= 10;
    }
    std::int64_t unit = 1;
    for (int i = 0; i < scale; ++i) {
        unit *= 10;
    }
    if (whole > std::numeric_limits<std::int64_t>::max() / unit) {
        throw ParseError("decimal out of range '" + original + "'");
    }
    const std::int64_t value = whole * unit + frac;
    return negative ? -value : value;
}

std::string format_scaled(std::int64_t value, int scale) {
    std::int64_t unit = 1;
    for (int i = 0; i < scale; ++i) {
        unit *= 10;
    }
    const bool negative = value < 0;
    const std::uint64_t magnitude =
        negative ? 0 - static_cast<std::uint64_t>(value) : static_cast<std::uint64_t>(value);
    std::string out = negative ? "-" : "";
    out += std::to_string(magnitude / static_cast<std::uint64_t>(unit));
    if (scale > 0) {
        std::string frac = std::to_string(magnitude % static_cast<std::uint64_t>(unit));
        out += '.';
        out.append(static_cast<std::size_t>(scale) - frac.size(), '0');
        out += frac;
    }
    return out;
}

} // namespace smartmeter::core
