// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartmeter/core/energy.hpp"
#include "smartmeter/ingest/ledger.hpp"

namespace smartmeter::ingest {

struct DeviceRecord {
    DeviceIdentity identity;  // latest network details seen
    MeterMode meter_mode = MeterMode::prepaid;
    core::PulseCount cumulative_pulses{};
    std::int64_t last_seq = -1;
    std::optional<std::string> owner_user;
    Timestamp registered_at{};
    std::optional<Timestamp> last_report_at;
    std::vector<PulseReport> reports;  // accepted, seq order

    core::EnergyKwh total_power_kwh() const { return core::pulses_to_kwh(cumulative_pulses); }

    bool operator==(const DeviceRecord&) const = default;
};

enum class AlertState { armed, fired };

std::string_view to_string(AlertState state);

struct Notification {
    std::uint64_t id = 0;  // ledger offset of the alert record
    std::string user_id;
    std::uint64_t cycle = 0;
    Timestamp at{};
    core::Money balance;
    core::Money consumed_cost;
    bool acknowledged = false;

    bool operator==(const Notification&) const = default;
};

struct UserAccount {
    std::string user_id;
    Salt salt{};
    Digest password_digest{};
    std::uint32_t iterations = 0;
    std::vector<std::string> device_ids;
    core::Money prepaid_balance;
    AlertState alert_state = AlertState::armed;
    // Incremented by every recharge; alerts are latched per cycle.
    std::uint64_t cycle = 0;
    // Pulses per owned device at the start of the cycle.
    std::map<std::string, std::uint64_t> baseline_pulses;
    std::vector<Notification> notifications;

    bool operator==(const UserAccount&) const = default;
};

/// Everything the service knows, as a pure fold over ledger entries.
class ServiceState {
public:
    /// Throws LedgerCorrupt when the entry contradicts the state built so far
    /// (offset out of order, unknown device, sequence gap, ...).
    void apply(const LedgerEntry& entry);

    const DeviceRecord* device(const std::string& chip_id) const;
    const UserAccount* user(const std::string& user_id) const;
    const std::map<std::string, DeviceRecord>& devices() const { return devices_; }
    const std::map<std::string, UserAccount>& users() const { return users_; }
    std::uint64_t next_offset() const { return next_offset_; }

    /// Pulses counted against the user's current cycle over prepaid devices.
    core::PulseCount cycle_pulses(const UserAccount& user) const;

    nlohmann::json to_json() const;
    static ServiceState from_json(const nlohmann::json& doc);

    bool operator==(const ServiceState&) const = default;

private:
    std::map<std::string, DeviceRecord> devices_;
    std::map<std::string, UserAccount> users_;
    std::uint64_t next_offset_ = 0;
};

ServiceState replay(std::span<const LedgerEntry> entries);

/// Independent genesis replay of a ledger file.
ServiceState replay_ledger(const std::filesystem::path& path);

} // namespace smartmeter::ingest
