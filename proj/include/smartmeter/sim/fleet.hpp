// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "smartmeter/sim/device.hpp"

namespace smartmeter::sim {

struct DeviceSpec {
    DeviceIdentity identity;
    MeterMode mode = MeterMode::prepaid;
    LoadProfile profile;
    FirmwareState start_state = FirmwareState::provisioned;
    std::optional<WifiNetwork> network;
};

struct FleetDefinition {
    Timestamp start{};
    DeviceOptions options;
    std::vector<DeviceSpec> devices;
};

/// Timestamped fault, relative to the fleet start.
struct FaultEvent {
    Duration at{0};
    std::string chip_id;
    Fault fault = Fault::link_down;
};

/// Fleet document:
///   { "start": "2019-06-01T00:00:00Z",
///     "options": {"batch_size": 10, "max_latency_s": 120, "buffer_capacity": null},
///     "devices": [ { "chip_id": "ESP-001", "hostname": "meter-1",
///                    "mac": "5c:cf:7f:00:00:01", "ip": "192.168.0.17",
///                    "meter_mode": "prepaid", "start_state": "provisioned",
///                    "network": {"ssid": "home", "credential": "pw"},
///                    "profile": {"repeat": false,
///                                "segments": [{"seconds": 3600, "watts": 600}]} } ] }
/// Chip IDs and MACs must be unique across the fleet.
FleetDefinition parse_fleet(const nlohmann::json& doc);
FleetDefinition load_fleet_file(const std::filesystem::path& path);

/// Fault document: { "faults": [ {"at_s": 3600, "chip_id": "ESP-001",
///                                "fault": "power_cycle"} ] }
/// "at" (ISO timestamp) may replace "at_s"; it is taken relative to `start`.
/// The result is sorted by time.
std::vector<FaultEvent> parse_faults(const nlohmann::json& doc, Timestamp start);
std::vector<FaultEvent> load_fault_file(const std::filesystem::path& path, Timestamp start);

} // namespace smartmeter::sim
