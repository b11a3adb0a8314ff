// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "smartmeter/analytics/daily.hpp"
#include "smartmeter/analytics/weekly.hpp"
#include "smartmeter/core/billing.hpp"
#include "smartmeter/core/protocol.hpp"
#include "smartmeter/ingest/auth.hpp"
#include "smartmeter/ingest/config.hpp"
#include "smartmeter/ingest/errors.hpp"
#include "smartmeter/ingest/state.hpp"

namespace smartmeter::ingest {

using Clock = std::function<Timestamp()>;

/// Wall clock truncated to milliseconds.
Timestamp system_now();

struct RecoveryInfo {
    bool from_snapshot = false;
    std::uint64_t snapshot_offset = 0;   // records covered by the snapshot
    std::uint64_t replayed = 0;          // records applied on top of it
    std::uint64_t truncated_bytes = 0;   // torn tail dropped from the ledger
};

struct PrepaidAccountView {
    std::string user_id;
    core::Money balance;
    std::uint64_t cycle = 0;
    core::PulseCount cycle_pulses;
    core::BillBreakdown cycle_cost;
    AlertState alert_state = AlertState::armed;
};

struct BillingView {
    std::string chip_id;
    MeterMode mode = MeterMode::prepaid;
    core::PulseCount consumed_pulses;
    core::EnergyKwh consumed_units;  // rounded for billing
    std::optional<core::BillBreakdown> prepaid;
    std::optional<core::PostpaidBreakdown> postpaid;
    std::optional<PrepaidAccountView> account;  // prepaid only, when owned
};

struct ConsumptionView {
    DeviceRecord device;  // reports left empty
    std::vector<analytics::DailyConsumption> rows;
    BillingView billing;  // over the same rows
};

/// Device registry, pulse ledger, accounts and alerts behind one commit
/// point. Every method is safe to call from any thread.
class IngestService {
public:
    explicit IngestService(ServiceConfig config, Clock clock = system_now);
    ~IngestService();
    IngestService(const IngestService&) = delete;
    IngestService& operator=(const IngestService&) = delete;

    const ServiceConfig& config() const { return config_; }
    RecoveryInfo recovery() const;

    // Device side.
    DeviceRecord register_device(const DeviceIdentity& identity, MeterMode mode);
    Ack ingest(const PulseReport& report);
    /// Throws NotFound for an unregistered chip.
    core::PulseCount last_count(const std::string& chip_id) const;
    std::optional<ResumePoint> resume_point(const std::string& chip_id) const;

    // Accounts.
    UserAccount register_user(const std::string& user_id, const std::string& password,
                              const std::string& chip_id);
    std::string authenticate(const std::string& user_id, const std::string& password);
    /// User behind a live token; throws Unauthorized.
    std::string session_user(const std::string& token);
    void logout(const std::string& token);

    UserAccount recharge(const std::string& token, const std::string& user_id, core::Money amount);
    /// Fires every due alert; returns the new notifications.
    std::vector<Notification> evaluate_alerts();
    std::vector<Notification> notifications(const std::string& token, const std::string& user_id);
    Notification acknowledge(const std::string& token, const std::string& user_id, std::uint64_t id);

    // Queries. Each checks that the session owns the device.
    std::vector<DeviceRecord> user_devices(const std::string& token, const std::string& user_id);
    ConsumptionView query_consumption(const std::string& token, const std::string& chip_id,
                                      std::optional<analytics::DayRange> range);
    DeviceRecord device_network(const std::string& token, const std::string& chip_id);
    BillingView billing(const std::string& token, const std::string& chip_id,
                        std::optional<MeterMode> mode, std::optional<core::Money> paid,
                        std::optional<analytics::DayRange> range = std::nullopt);
    analytics::WeeklyReport weekly(const std::string& token, const std::string& chip_id,
                                   std::optional<analytics::DayRange> range);

    // Inspection.
    ServiceState state() const;
    std::optional<DeviceRecord> device(const std::string& chip_id) const;
    std::optional<UserAccount> user(const std::string& user_id) const;
    void write_snapshot_now();

private:
    LedgerEntry commit(LedgerEvent event);
    std::vector<Notification> evaluate_locked(const std::vector<std::string>& user_ids);
    const DeviceRecord& owned_device_locked(const std::string& token, const std::string& chip_id);
    void require_user_locked(const std::string& token, const std::string& user_id);
    std::string session_user_locked(const std::string& token);
    BillingView billing_locked(const DeviceRecord& rec, std::span<const PulseReport> reports,
                               std::optional<MeterMode> mode, std::optional<core::Money> paid,
                               std::optional<analytics::DayRange> range) const;
    PrepaidAccountView account_view_locked(const UserAccount& user) const;

    ServiceConfig config_;
    Clock clock_;
    mutable std::mutex mu_;
    std::unique_ptr<Ledger> ledger_;
    ServiceState state_;
    SessionStore sessions_;
    RecoveryInfo recovery_;
    std::uint64_t last_snapshot_offset_ = 0;
};

/// In-process Uplink straight into a service.
class LocalUplink : public Uplink {
public:
    explicit LocalUplink(IngestService& service) : service_(service) {}

    bool register_device(const DeviceIdentity& identity, MeterMode mode) override;
    std::optional<ResumePoint> last_count(const std::string& chip_id) override;
    Ack send(const PulseReport& report) override;

private:
    IngestService& service_;
};

bool is_valid_chip_id(std::string_view chip_id);
bool is_valid_user_id(std::string_view user_id);

} // namespace smartmeter::ingest
