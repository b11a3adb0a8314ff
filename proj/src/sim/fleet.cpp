// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/sim/fleet.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "smartmeter/core/decimal.hpp"
#include "smartmeter/core/errors.hpp"
#include "smartmeter/core/tariff_json.hpp"

namespace smartmeter::sim {

using nlohmann::json;

namespace {

Duration seconds_field(const json& value) {
    const auto ms = core::parse_scaled(core::decimal_text(value), 3);
    if (ms < 0) {
        throw ParseError("durations must be non-negative, got " + value.dump());
    }
    return Duration{ms};
}

std::string required_string(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(std::string("missing string field '") + key + "' in " + obj.dump());
    }
    return it->get<std::string>();
}

LoadProfile parse_profile(const json& doc) {
    std::vector<LoadSegment> segments;
    for (const auto& seg : doc.at("segments")) {
        const auto watts = seg.at("watts").get<std::int64_t>();
        if (watts < 0) {
            throw ParseError("negative load power in " + seg.dump());
        }
        segments.push_back({seconds_field(seg.at("seconds")), watts});
    }
    return LoadProfile(std::move(segments), doc.value("repeat", false));
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace

FleetDefinition parse_fleet(const json& doc) {
    try {
        FleetDefinition fleet;
        fleet.start = parse_timestamp(doc.value("start", std::string("2019-06-01T00:00:00Z")));
        if (auto opts = doc.find("options"); opts != doc.end()) {
            fleet.options.batch_size = opts->value("batch_size", fleet.options.batch_size);
            if (opts->contains("max_latency_s")) {
                fleet.options.max_latency = seconds_field(opts->at("max_latency_s"));
            }
            if (opts->contains("buffer_capacity") && !opts->at("buffer_capacity").is_null()) {
                fleet.options.buffer_capacity = opts->at("buffer_capacity").get<std::size_t>();
            }
        }
        std::set<std::string> chips;
        std::set<std::string> macs;
        for (const auto& d : doc.at("devices")) {
            DeviceSpec spec;
            spec.identity = {required_string(d, "chip_id"), d.value("hostname", std::string{}),
                             required_string(d, "mac"), d.value("ip", std::string{"0.0.0.0"})};
            if (!is_valid_mac(spec.identity.mac) || !is_valid_ipv4(spec.identity.ip)) {
                throw ParseError("bad mac/ip for device " + spec.identity.chip_id);
            }
            if (!chips.insert(spec.identity.chip_id).second) {
                throw ParseError("duplicate chip_id " + spec.identity.chip_id);
            }
            if (!macs.insert(spec.identity.mac).second) {
                throw ParseError("duplicate mac " + spec.identity.mac);
            }
            spec.mode = parse_meter_mode(d.value("meter_mode", std::string{"prepaid"}));
            spec.start_state = parse_firmware_state(d.value("start_state", std::string{"provisioned"}));
            if (spec.start_state != FirmwareState::provisioned &&
                spec.start_state != FirmwareState::unprovisioned) {
                throw ParseError("start_state must be provisioned or unprovisioned");
            }
            if (auto net = d.find("network"); net != d.end() && !net->is_null()) {
                spec.network = WifiNetwork{required_string(*net, "ssid"),
                                           net->value("credential", std::string{})};
            }
            spec.profile = parse_profile(d.at("profile"));
            fleet.devices.push_back(std::move(spec));
        }
        return fleet;
    } catch (const json::exception& e) {
        throw ParseError(std::string("fleet definition: ") + e.what());
    }
}

FleetDefinition load_fleet_file(const std::filesystem::path& path) {
    return parse_fleet(read_json(path));
}

std::vector<FaultEvent> parse_faults(const json& doc, Timestamp start) {
    try {
        std::vector<FaultEvent> faults;
        for (const auto& f : doc.at("faults")) {
            FaultEvent ev;
            if (f.contains("at_s")) {
                ev.at = seconds_field(f.at("at_s"));
            } else {
                ev.at = parse_timestamp(required_string(f, "at")) - start;
                if (ev.at.count() < 0) {
                    throw ParseError("fault scheduled before the fleet start: " + f.dump());
                }
            }
            ev.chip_id = required_string(f, "chip_id");
            ev.fault = parse_fault(required_string(f, "fault"));
            faults.push_back(std::move(ev));
        }
        std::stable_sort(faults.begin(), faults.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        return faults;
    } catch (const json::exception& e) {
        throw ParseError(std::string("fault script: ") + e.what());
    }
}

std::vector<FaultEvent> load_fault_file(const std::filesystem::path& path, Timestamp start) {
    return parse_faults(read_json(path), start);
}

} // namespace smartmeter::sim
