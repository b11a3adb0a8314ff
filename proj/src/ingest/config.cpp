// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/config.hpp"

#include <fstream>

#include "smartmeter/core/errors.hpp"
#include "smartmeter/core/tariff_json.hpp"

namespace smartmeter::ingest {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T number(const json& doc, const char* key, T fallback, T min, T max) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        return fallback;
    }
    if (!it->is_number_integer()) {
        throw ParseError(std::string(key) + " must be an integer");
    }
    const auto v = it->get<std::int64_t>();
    if (v < static_cast<std::int64_t>(min) || v > static_cast<std::int64_t>(max)) {
        throw ParseError(std::string(key) + " out of range: " + std::to_string(v));
    }
    return static_cast<T>(v);
}

} // namespace

ServiceConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        throw ParseError("service config must be a JSON object");
    }
    ServiceConfig cfg;
    try {
        cfg.bind_address = doc.value("bind_address", cfg.bind_address);
        cfg.device_port = number<std::uint16_t>(doc, "device_port", cfg.device_port, 0, 65535);
        cfg.http_port = number<std::uint16_t>(doc, "http_port", cfg.http_port, 0, 65535);
        if (doc.contains("ledger_path")) {
            cfg.ledger_path = resolve(base_dir, doc.at("ledger_path").get<std::string>());
        } else {
            cfg.ledger_path = resolve(base_dir, cfg.ledger_path.string());
        }
        if (doc.contains("snapshot_path")) {
            const auto p = doc.at("snapshot_path").get<std::string>();
            cfg.snapshot_path = p.empty() ? std::filesystem::path{} : resolve(base_dir, p);
        } else {
            cfg.snapshot_path = resolve(base_dir, cfg.snapshot_path.string());
        }
        cfg.snapshot_every = number<std::uint64_t>(doc, "snapshot_every", cfg.snapshot_every, 0, 1u << 30);
        cfg.fsync = doc.value("fsync", cfg.fsync);
        if (doc.contains("tariff") && doc.contains("tariff_file")) {
            throw ParseError("give either tariff or tariff_file, not both");
        }
        if (doc.contains("tariff")) {
            cfg.tariff = core::schedule_from_json(doc.at("tariff"));
        } else if (doc.contains("tariff_file")) {
            cfg.tariff = core::load_schedule_file(resolve(base_dir, doc.at("tariff_file").get<std::string>()));
        }
        if (doc.contains("alert_threshold")) {
            cfg.alert_threshold = core::Ratio::parse(core::decimal_text(doc.at("alert_threshold")));
            if (cfg.alert_threshold.ppm() <= 0 || cfg.alert_threshold > core::Ratio::percent(100)) {
                throw ParseError("alert_threshold must be in (0, 1]");
            }
        }
        cfg.token_ttl = std::chrono::seconds{number<std::int64_t>(doc, "token_ttl_s", 3600, 1, 365LL * 86400)};
        cfg.pbkdf2_iterations =
            number<std::uint32_t>(doc, "pbkdf2_iterations", cfg.pbkdf2_iterations, 1, 10'000'000);
    } catch (const json::exception& e) {
        throw ParseError(std::string("service config: ") + e.what());
    }
    return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open service config " + path.string());
    }
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        throw ParseError("service config is not valid JSON: " + path.string());
    }
    return config_from_json(doc, path.parent_path());
}

} // namespace smartmeter::ingest
