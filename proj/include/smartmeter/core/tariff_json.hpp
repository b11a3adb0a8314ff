// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <json.hpp>

#include "smartmeter/core/tariff.hpp"

namespace smartmeter::core {

/// Reads a decimal field that may be written as a JSON string or number.
std::string decimal_text(const nlohmann::json& value);

/// Schedule document:
///   { "tiers": [ {"units": "75", "price_per_unit": "3.50"},
///                {"units": null, "price_per_unit": "5.00"} ],
///     "demand_charge_prepaid": "150.00", "demand_charge_postpaid": "50.00",
///     "vat_rate": "0.05", "meter_rent": "40.00", "rebate_rate": "0.01" }
/// Omitted charges keep their defaults. The result is validated.
TariffSchedule schedule_from_json(const nlohmann::json& doc);
nlohmann::json schedule_to_json(const TariffSchedule& schedule);

TariffSchedule load_schedule_file(const std::filesystem::path& path);

} // namespace smartmeter::core
