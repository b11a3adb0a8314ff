// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/tariff_json.hpp"

#include <fstream>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::core {

using nlohmann::json;

std::string decimal_text(const json& value) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number()) {
        return value.dump();
    }
    throw ParseError("expected a decimal, got " + value.dump());
}

namespace {

template <typename T, typename Parse>
void read_optional(const json& doc, const char* key, T& out, Parse parse) {
    if (auto it = doc.find(key); it != doc.end()) {
        out = parse(decimal_text(*it));
    }
}

} // namespace

TariffSchedule schedule_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("tariff schedule must be a JSON object");
    }
    TariffSchedule schedule;
    const auto tiers = doc.find("tiers");
    if (tiers == doc.end() || !tiers->is_array()) {
        throw ParseError("tariff schedule needs a 'tiers' array");
    }
    for (const auto& entry : *tiers) {
        TariffTier tier;
        if (!entry.contains("price_per_unit")) {
            throw ParseError("tier without price_per_unit: " + entry.dump());
        }
        tier.price_per_unit = Money::parse(decimal_text(entry.at("price_per_unit")));
        if (auto units = entry.find("units"); units != entry.end() && !units->is_null()) {
            tier.units = EnergyKwh::parse_kwh(decimal_text(*units));
        }
        schedule.tiers.push_back(tier);
    }
    read_optional(doc, "demand_charge_prepaid", schedule.demand_charge_prepaid, Money::parse);
    read_optional(doc, "demand_charge_postpaid", schedule.demand_charge_postpaid, Money::parse);
    read_optional(doc, "meter_rent", schedule.meter_rent, Money::parse);
    read_optional(doc, "vat_rate", schedule.vat_rate, Ratio::parse);
    read_optional(doc, "rebate_rate", schedule.rebate_rate, Ratio::parse);
    schedule.validate();
    return schedule;
}

json schedule_to_json(const TariffSchedule& schedule) {
    json tiers = json::array();
    for (const auto& tier : schedule.tiers) {
        tiers.push_back({{"units", tier.units ? json(tier.units->to_string(6)) : json(nullptr)},
                         {"price_per_unit", tier.price_per_unit.to_string()}});
    }
    return {{"tiers", tiers},
            {"demand_charge_prepaid", schedule.demand_charge_prepaid.to_string()},
            {"demand_charge_postpaid", schedule.demand_charge_postpaid.to_string()},
            {"vat_rate", schedule.vat_rate.to_string()},
            {"meter_rent", schedule.meter_rent.to_string()},
            {"rebate_rate", schedule.rebate_rate.to_string()}};
}

TariffSchedule load_schedule_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open tariff schedule " + path.string());
    }
    try {
        return schedule_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace smartmeter::core
