// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "smartmeter/core/ratio.hpp"
#include "smartmeter/core/tariff.hpp"
#include "smartmeter/core/time.hpp"

namespace smartmeter::ingest {

struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    std::uint16_t device_port = 7070;
    std::uint16_t http_port = 8080;
    std::filesystem::path ledger_path = "smartmeter.ledger";
    std::filesystem::path snapshot_path = "smartmeter.snapshot.json";  // empty disables snapshots
    std::uint64_t snapshot_every = 1000;  // ledger records between snapshots, 0 = only on shutdown
    bool fsync = false;
    core::TariffSchedule tariff = core::demo_flat_schedule();
    core::Ratio alert_threshold = core::Ratio::percent(80);
    Duration token_ttl = std::chrono::hours{1};
    std::uint32_t pbkdf2_iterations = 100'000;
};

/// Config document (every member optional):
///   { "bind_address": "127.0.0.1", "device_port": 7070, "http_port": 8080,
///     "ledger_path": "...", "snapshot_path": "...", "snapshot_every": 1000,
///     "fsync": false, "tariff": {...} | "tariff_file": "tariff.json",
///     "alert_threshold": "0.80", "token_ttl_s": 3600, "pbkdf2_iterations": 100000 }
/// Relative paths resolve against `base_dir`. Throws ParseError.
ServiceConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ServiceConfig load_service_config(const std::filesystem::path& path);

} // namespace smartmeter::ingest
