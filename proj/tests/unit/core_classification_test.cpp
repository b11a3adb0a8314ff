// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "smartmeter/core/classification.hpp"
#include "smartmeter/core/errors.hpp"

using namespace smartmeter;
using namespace smartmeter::core;

namespace {

std::vector<EnergyKwh> series(std::initializer_list<const char*> values) {
    std::vector<EnergyKwh> out;
    for (auto v : values) {
        out.push_back(EnergyKwh::parse_kwh(v));
    }
    return out;
}

} // namespace

TEST(ClassifyWeek, PublishedWeek) {
    const auto week = series({"14.2", "15.6", "15.3", "16.4", "13.9", "14.7", "16.2"});
    const auto c = classify_week(week);
    EXPECT_EQ(c.base_kwh.to_string(1), "13.9");
    EXPECT_EQ(c.max_kwh.to_string(1), "16.4");
    // 106.3 / 7 = 15.1857...
    EXPECT_EQ(c.average_kwh.to_string(2), "15.19");
    EXPECT_EQ(classify_week(week, AverageRounding::truncate).average_kwh.to_string(2), "15.18");
}

TEST(ClassifyWeek, SingletonAndZeroWeek) {
    const auto one = classify_week(series({"5.0"}));
    EXPECT_EQ(one.base_kwh, one.max_kwh);
    EXPECT_EQ(one.average_kwh.to_string(2), "5.00");

    const auto zeros = classify_week(series({"0", "0", "0", "0", "0", "0", "0"}));
    EXPECT_EQ(zeros.base_kwh.milliwatt_hours(), 0);
    EXPECT_EQ(zeros.max_kwh.milliwatt_hours(), 0);
    EXPECT_EQ(zeros.average_kwh.milliwatt_hours(), 0);
}

TEST(ClassifyWeek, Empty) {
    EXPECT_THROW(classify_week(std::vector<EnergyKwh>{}), EmptySeries);
}

TEST(ClassifyWeek, BoundsAndPermutationInvariance) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::int64_t> mwh(0, 40'000'000);
    std::uniform_int_distribution<int> len(1, 14);
    for (int i = 0; i < 500; ++i) {
        std::vector<EnergyKwh> days(static_cast<std::size_t>(len(rng)));
        for (auto& d : days) {
            d = EnergyKwh::from_milliwatt_hours(mwh(rng));
        }
        const auto c = classify_week(days);
        EXPECT_LE(c.base_kwh, c.average_kwh);
        EXPECT_LE(c.average_kwh, c.max_kwh);
        std::shuffle(days.begin(), days.end(), rng);
        EXPECT_EQ(classify_week(days), c);
    }
}

TEST(PrepaidAlert, Threshold) {
    EXPECT_TRUE(prepaid_alert_due(Money::parse("500.00"), Money::parse("400.00")));
    EXPECT_FALSE(prepaid_alert_due(Money::parse("500.00"), Money::parse("399.99")));
    EXPECT_TRUE(prepaid_alert_due(Money::parse("250.00"), Money::parse("217.14")));
    EXPECT_THROW(prepaid_alert_due(Money::parse("0"), Money::parse("1")), NonPositiveBalance);
    EXPECT_THROW(prepaid_alert_due(Money::parse("-1"), Money::parse("1")), NonPositiveBalance);
}

TEST(PrepaidAlert, MonotoneInConsumedCost) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::int64_t> paisa(1, 100'000);
    for (int i = 0; i < 1000; ++i) {
        const auto balance = Money::from_paisa(paisa(rng));
        const auto cost = Money::from_paisa(paisa(rng));
        if (prepaid_alert_due(balance, cost)) {
            EXPECT_TRUE(prepaid_alert_due(balance, cost + Money::from_paisa(paisa(rng))));
        }
    }
}
