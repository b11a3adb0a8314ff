// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/state.hpp"

#include <algorithm>

#include "smartmeter/ingest/errors.hpp"

namespace smartmeter::ingest {

std::string_view to_string(AlertState state) {
    return state == AlertState::armed ? "armed" : "fired";
}

namespace {

struct ApplyVisitor {
    std::map<std::string, DeviceRecord>& devices;
    std::map<std::string, UserAccount>& users;
    const LedgerEntry& entry;

    DeviceRecord& device(const std::string& chip_id) const {
        auto it = devices.find(chip_id);
        if (it == devices.end()) {
            throw LedgerCorrupt("record " + std::to_string(entry.offset) + " names unknown device " + chip_id);
        }
        return it->second;
    }

    UserAccount& user(const std::string& user_id) const {
        auto it = users.find(user_id);
        if (it == users.end()) {
            throw LedgerCorrupt("record " + std::to_string(entry.offset) + " names unknown user " + user_id);
        }
        return it->second;
    }

    void reset_baseline(UserAccount& u) const {
        for (const auto& chip : u.device_ids) {
            u.baseline_pulses[chip] = device(chip).cumulative_pulses.count;
        }
    }

    void operator()(const DeviceRegistered& e) const {
        DeviceRecord rec;
        rec.identity = e.identity;
        rec.meter_mode = e.mode;
        rec.registered_at = entry.accepted_at;
        if (!devices.emplace(e.identity.chip_id, std::move(rec)).second) {
            throw LedgerCorrupt("device registered twice: " + e.identity.chip_id);
        }
    }

    void operator()(const PulsesAccepted& e) const {
        auto& rec = device(e.report.chip_id);
        if (static_cast<std::int64_t>(e.report.seq) != rec.last_seq + 1) {
            throw LedgerCorrupt("non-contiguous seq " + std::to_string(e.report.seq) + " for " +
                                e.report.chip_id);
        }
        rec.last_seq = static_cast<std::int64_t>(e.report.seq);
        rec.cumulative_pulses.count += e.report.pulse_delta;
        rec.identity.hostname = e.report.hostname;
        rec.identity.mac = e.report.mac;
        rec.identity.ip = e.report.ip;
        rec.last_report_at = e.report.reported_at;
        rec.reports.push_back(e.report);
    }

    void operator()(const UserRegistered& e) const {
        auto& rec = device(e.chip_id);
        if (rec.owner_user) {
            throw LedgerCorrupt("device claimed twice: " + e.chip_id);
        }
        UserAccount u;
        u.user_id = e.user_id;
        u.salt = e.salt;
        u.password_digest = e.digest;
        u.iterations = e.iterations;
        u.device_ids.push_back(e.chip_id);
        auto [it, inserted] = users.emplace(e.user_id, std::move(u));
        if (!inserted) {
            throw LedgerCorrupt("user registered twice: " + e.user_id);
        }
        rec.owner_user = e.user_id;
        reset_baseline(it->second);
    }

    void operator()(const Recharged& e) const {
        auto& u = user(e.user_id);
        u.prepaid_balance += e.amount;
        ++u.cycle;
        u.alert_state = AlertState::armed;
        reset_baseline(u);
    }

    void operator()(const AlertFired& e) const {
        auto& u = user(e.user_id);
        if (e.cycle != u.cycle || u.alert_state != AlertState::armed) {
            throw LedgerCorrupt("alert for " + e.user_id + " outside an armed cycle");
        }
        u.alert_state = AlertState::fired;
        u.notifications.push_back(
            {entry.offset, e.user_id, e.cycle, entry.accepted_at, e.balance, e.consumed_cost, false});
    }

    void operator()(const AlertAcknowledged& e) const {
        auto& u = user(e.user_id);
        auto it = std::find_if(u.notifications.begin(), u.notifications.end(),
                               [&](const Notification& n) { return n.cycle == e.cycle; });
        if (it == u.notifications.end()) {
            throw LedgerCorrupt("acknowledgement for missing alert of " + e.user_id);
        }
        it->acknowledged = true;
    }
};

} // namespace

void ServiceState::apply(const LedgerEntry& entry) {
    if (entry.offset != next_offset_) {
        throw LedgerCorrupt("expected offset " + std::to_string(next_offset_) + ", got " +
                            std::to_string(entry.offset));
    }
    std::visit(ApplyVisitor{devices_, users_, entry}, entry.event);
    ++next_offset_;
}

const DeviceRecord* ServiceState::device(const std::string& chip_id) const {
    auto it = devices_.find(chip_id);
    return it == devices_.end() ? nullptr : &it->second;
}

const UserAccount* ServiceState::user(const std::string& user_id) const {
    auto it = users_.find(user_id);
    return it == users_.end() ? nullptr : &it->second;
}

core::PulseCount ServiceState::cycle_pulses(const UserAccount& user) const {
    std::uint64_t total = 0;
    for (const auto& chip : user.device_ids) {
        const auto* rec = device(chip);
        if (rec == nullptr || rec->meter_mode != MeterMode::prepaid) {
            continue;
        }
        auto base = user.baseline_pulses.find(chip);
        total += rec->cumulative_pulses.count - (base == user.baseline_pulses.end() ? 0 : base->second);
    }
    return core::PulseCount{total};
}

ServiceState replay(std::span<const LedgerEntry> entries) {
    ServiceState state;
    for (const auto& e : entries) {
        state.apply(e);
    }
    return state;
}

ServiceState replay_ledger(const std::filesystem::path& path) {
    const auto scan = scan_ledger(path);
    return replay(scan.entries);
}

} // namespace smartmeter::ingest
