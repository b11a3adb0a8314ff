// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "smartmeter/core/energy.hpp"
#include "smartmeter/core/errors.hpp"
#include "smartmeter/core/money.hpp"
#include "smartmeter/core/ratio.hpp"

using namespace smartmeter;
using namespace smartmeter::core;

TEST(Money, ParseAndFormat) {
    EXPECT_EQ(Money::parse("217.14").paisa(), 21714);
    EXPECT_EQ(Money::parse("150").paisa(), 15000);
    EXPECT_EQ(Money::parse("0.5").paisa(), 50);
    EXPECT_EQ(Money::parse("-5.00").paisa(), -500);
    EXPECT_EQ(Money::parse("10.340").paisa(), 1034);
    EXPECT_EQ(Money::from_paisa(1034).to_string(), "10.34");
    EXPECT_EQ(Money::from_paisa(-7).to_string(), "-0.07");
    EXPECT_EQ(Money::from_paisa(0).to_string(), "0.00");
}

TEST(Money, RejectsMalformed) {
    EXPECT_THROW(Money::parse(""), ParseError);
    EXPECT_THROW(Money::parse("1.234"), ParseError);
    EXPECT_THROW(Money::parse("1.2.3"), ParseError);
    EXPECT_THROW(Money::parse("abc"), ParseError);
    EXPECT_THROW(Money::parse("."), ParseError);
}

TEST(Money, RoundHalfUp) {
    EXPECT_EQ(div_round_half_up(5, 10), 1);
    EXPECT_EQ(div_round_half_up(4, 10), 0);
    EXPECT_EQ(div_round_half_up(15, 10), 2);
    EXPECT_EQ(div_round_half_up(-5, 10), -1);
    EXPECT_EQ(div_round_half_up(-4, 10), 0);
}

TEST(Ratio, AppliesWithHalfUpRounding) {
    const auto vat = Ratio::parse("0.05");
    EXPECT_EQ(vat.ppm(), 50'000);
    EXPECT_EQ(vat.to_string(), "0.05");
    EXPECT_EQ(vat.apply(Money::parse("206.80")), Money::parse("10.34"));
    // 5 % of 0.10 = 0.005 -> 0.01
    EXPECT_EQ(vat.apply(Money::parse("0.10")), Money::parse("0.01"));
    EXPECT_EQ(Ratio::parse("1").to_string(), "1.0");
}

TEST(Energy, PulsesToKwh) {
    EXPECT_EQ(pulses_to_kwh({1000}).milliwatt_hours(), 1'000'000);
    EXPECT_EQ(pulses_to_kwh({1000}).to_string(3), "1.000");
    EXPECT_EQ(pulses_to_kwh({0}).to_string(3), "0.000");
    EXPECT_EQ(pulses_to_kwh({14208}).to_string(3), "14.208");
}

TEST(Energy, PulseConversionIsExactForRandomCounts) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> dist(0, 1'000'000'000'000ULL);
    for (int i = 0; i < 10'000; ++i) {
        const auto p = dist(rng);
        EXPECT_EQ(pulses_to_kwh({p}).milliwatt_hours(), static_cast<std::int64_t>(1000 * p));
    }
}

TEST(Energy, BillingRoundingIsHalfUpToOneDecimal) {
    EXPECT_EQ(round_kwh_billing(EnergyKwh::parse_kwh("14.208")).to_string(1), "14.2");
    EXPECT_EQ(round_kwh_billing(EnergyKwh::parse_kwh("14.664")).to_string(1), "14.7");
    EXPECT_EQ(round_kwh_billing(EnergyKwh::parse_kwh("0.05")), EnergyKwh::parse_kwh("0.1"));
    EXPECT_EQ(round_kwh_billing(EnergyKwh::parse_kwh("0.049999")), EnergyKwh::parse_kwh("0"));
    EXPECT_EQ(round_kwh_billing(EnergyKwh::parse_kwh("0.01")), EnergyKwh::parse_kwh("0"));
}

TEST(Energy, ParseRejectsNegative) {
    EXPECT_THROW(EnergyKwh::parse_kwh("-1"), ParseError);
    EXPECT_THROW(EnergyKwh::parse_kwh("1.0000001"), ParseError);
}
