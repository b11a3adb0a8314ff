// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/service.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>

#include "smartmeter/core/classification.hpp"
#include "smartmeter/ingest/snapshot.hpp"

namespace smartmeter::ingest {

namespace {

bool charset_ok(std::string_view text, std::size_t max, std::string_view extra) {
    if (text.empty() || text.size() > max) {
        return false;
    }
    return std::all_of(text.begin(), text.end(), [&](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || extra.find(c) != std::string_view::npos;
    });
}

bool valid_hostname(std::string_view host) {
    return charset_ok(host, kMaxHostname, "-._");
}

void validate_identity(const DeviceIdentity& id) {
    if (!is_valid_chip_id(id.chip_id)) {
        throw ValidationError("invalid chip_id '" + id.chip_id + "'");
    }
    if (!valid_hostname(id.hostname)) {
        throw ValidationError("invalid hostname '" + id.hostname + "'");
    }
    if (!is_valid_mac(id.mac)) {
        throw ValidationError("invalid mac '" + id.mac + "'");
    }
    if (!is_valid_ipv4(id.ip)) {
        throw ValidationError("invalid ip '" + id.ip + "'");
    }
}

bool valid_report(const PulseReport& r) {
    return is_valid_chip_id(r.chip_id) && r.pulse_delta >= 1 && valid_hostname(r.hostname) &&
           is_valid_mac(r.mac) && is_valid_ipv4(r.ip);
}

std::vector<PulseReport> reports_in(const DeviceRecord& rec, std::optional<analytics::DayRange> range) {
    if (!range) {
        return rec.reports;
    }
    std::vector<PulseReport> out;
    for (const auto& r : rec.reports) {
        if (range->contains(day_of(r.reported_at))) {
            out.push_back(r);
        }
    }
    return out;
}

bool owns_prepaid_device(const ServiceState& state, const UserAccount& u) {
    return std::any_of(u.device_ids.begin(), u.device_ids.end(), [&](const std::string& chip) {
        const auto* rec = state.device(chip);
        return rec != nullptr && rec->meter_mode == MeterMode::prepaid;
    });
}

} // namespace

bool is_valid_chip_id(std::string_view chip_id) {
    return charset_ok(chip_id, kMaxChipId, "-_.:");
}

bool is_valid_user_id(std::string_view user_id) {
    return charset_ok(user_id, kMaxUserId, "-_.@");
}

Timestamp system_now() {
    return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

IngestService::IngestService(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), sessions_(config_.token_ttl) {
    config_.tariff.validate();
    ledger_ = std::make_unique<Ledger>(config_.ledger_path, config_.fsync);
    const auto& entries = ledger_->recovered();
    recovery_.truncated_bytes = ledger_->recovered_tail_bytes();

    if (!config_.snapshot_path.empty()) {
        auto snap = read_snapshot(config_.snapshot_path);
        // A snapshot ahead of the ledger describes records that never became durable.
        if (snap && snap->next_offset() <= entries.size()) {
            const auto covered = snap->next_offset();
            try {
                for (auto i = covered; i < entries.size(); ++i) {
                    snap->apply(entries[i]);
                }
                state_ = std::move(*snap);
                recovery_.from_snapshot = true;
                recovery_.snapshot_offset = covered;
                recovery_.replayed = entries.size() - covered;
            } catch (const LedgerCorrupt&) {
                recovery_.from_snapshot = false;
            }
        }
    }
    if (!recovery_.from_snapshot) {
        state_ = replay(entries);
        recovery_.replayed = entries.size();
    }
    last_snapshot_offset_ = state_.next_offset();
}

IngestService::~IngestService() {
    try {
        write_snapshot_now();
    } catch (const std::exception& e) {
        std::cerr << "snapshot on shutdown failed: " << e.what() << '\n';
    }
}

RecoveryInfo IngestService::recovery() const {
    std::lock_guard lk(mu_);
    return recovery_;
}

void IngestService::write_snapshot_now() {
    std::lock_guard lk(mu_);
    if (!config_.snapshot_path.empty()) {
        write_snapshot(config_.snapshot_path, state_);
        last_snapshot_offset_ = state_.next_offset();
    }
}

LedgerEntry IngestService::commit(LedgerEvent event) {
    auto entry = ledger_->append(clock_(), std::move(event));
    state_.apply(entry);
    if (!config_.snapshot_path.empty() && config_.snapshot_every > 0 &&
        state_.next_offset() - last_snapshot_offset_ >= config_.snapshot_every) {
        try {
            write_snapshot(config_.snapshot_path, state_);
            last_snapshot_offset_ = state_.next_offset();
        } catch (const std::exception& e) {
            // The ledger already holds the record; a missed snapshot only slows recovery.
            std::cerr << "snapshot failed: " << e.what() << '\n';
        }
    }
    return entry;
}

DeviceRecord IngestService::register_device(const DeviceIdentity& identity, MeterMode mode) {
    validate_identity(identity);
    std::lock_guard lk(mu_);
    if (state_.device(identity.chip_id) != nullptr) {
        throw DuplicateChipId("chip " + identity.chip_id + " is already registered");
    }
    commit(DeviceRegistered{identity, mode});
    return *state_.device(identity.chip_id);
}

Ack IngestService::ingest(const PulseReport& report) {
    std::lock_guard lk(mu_);
    Ack ack{IngestStatus::reject, RejectReason::none, report.seq, -1, 0};
    const auto* rec = state_.device(report.chip_id);
    if (rec != nullptr) {
        ack.last_seq = rec->last_seq;
        ack.cumulative_pulses = rec->cumulative_pulses.count;
    }
    if (!valid_report(report)) {
        ack.reason = RejectReason::invalid_report;
        return ack;
    }
    if (rec == nullptr) {
        ack.reason = RejectReason::unknown_device;
        return ack;
    }
    const auto seq = static_cast<std::int64_t>(report.seq);
    if (seq <= rec->last_seq) {
        ack.status = IngestStatus::duplicate;
        return ack;
    }
    if (seq > rec->last_seq + 1) {
        ack.reason = RejectReason::sequence_gap;
        return ack;
    }
    commit(PulsesAccepted{report});
    ack.status = IngestStatus::accept;
    ack.last_seq = rec->last_seq;
    ack.cumulative_pulses = rec->cumulative_pulses.count;
    if (rec->owner_user) {
        evaluate_locked({*rec->owner_user});
    }
    return ack;
}

core::PulseCount IngestService::last_count(const std::string& chip_id) const {
    std::lock_guard lk(mu_);
    const auto* rec = state_.device(chip_id);
    if (rec == nullptr) {
        throw NotFound("no record for chip " + chip_id);
    }
    return rec->cumulative_pulses;
}

std::optional<ResumePoint> IngestService::resume_point(const std::string& chip_id) const {
    std::lock_guard lk(mu_);
    const auto* rec = state_.device(chip_id);
    if (rec == nullptr) {
        return std::nullopt;
    }
    return ResumePoint{rec->cumulative_pulses.count, rec->last_seq};
}

UserAccount IngestService::register_user(const std::string& user_id, const std::string& password,
                                         const std::string& chip_id) {
    if (!is_valid_user_id(user_id)) {
        throw ValidationError("invalid user_id '" + user_id + "'");
    }
    if (password.size() < 8 || password.size() > 128) {
        throw ValidationError("password must be 8 to 128 characters");
    }
    if (!is_valid_chip_id(chip_id)) {
        throw ValidationError("invalid chip_id '" + chip_id + "'");
    }
    const auto salt = random_salt();
    const auto digest = derive_password_digest(password, salt, config_.pbkdf2_iterations);

    std::lock_guard lk(mu_);
    if (state_.user(user_id) != nullptr) {
        throw DuplicateUser("user " + user_id + " already exists");
    }
    const auto* rec = state_.device(chip_id);
    if (rec == nullptr) {
        throw UnknownDevice("chip " + chip_id + " is not registered");
    }
    if (rec->owner_user) {
        throw DeviceAlreadyClaimed("chip " + chip_id + " already belongs to an account");
    }
    commit(UserRegistered{user_id, salt, digest, config_.pbkdf2_iterations, chip_id});
    return *state_.user(user_id);
}

std::string IngestService::authenticate(const std::string& user_id, const std::string& password) {
    std::optional<UserAccount> account;
    {
        std::lock_guard lk(mu_);
        if (const auto* u = state_.user(user_id)) {
            account = *u;
        }
    }
    if (!account) {
        // Same work as a real check so timing does not reveal which factor failed.
        (void)derive_password_digest(password, Salt{}, config_.pbkdf2_iterations);
        throw BadCredentials("bad credentials");
    }
    if (!verify_password(password, account->salt, account->password_digest, account->iterations)) {
        throw BadCredentials("bad credentials");
    }
    std::lock_guard lk(mu_);
    return sessions_.issue(user_id, clock_());
}

std::string IngestService::session_user_locked(const std::string& token) {
    if (token.empty()) {
        throw Unauthorized("missing session token");
    }
    auto user = sessions_.user_for(token, clock_());
    if (user.empty()) {
        throw Unauthorized("session expired or unknown");
    }
    return user;
}

std::string IngestService::session_user(const std::string& token) {
    std::lock_guard lk(mu_);
    return session_user_locked(token);
}

void IngestService::logout(const std::string& token) {
    std::lock_guard lk(mu_);
    sessions_.revoke(token);
}

void IngestService::require_user_locked(const std::string& token, const std::string& user_id) {
    const auto who = session_user_locked(token);
    if (state_.user(user_id) == nullptr) {
        throw UnknownUser("no user " + user_id);
    }
    if (who != user_id) {
        throw Unauthorized("session does not belong to " + user_id);
    }
}

const DeviceRecord& IngestService::owned_device_locked(const std::string& token, const std::string& chip_id) {
    const auto who = session_user_locked(token);
    const auto* rec = state_.device(chip_id);
    if (rec == nullptr) {
        throw UnknownDevice("no device " + chip_id);
    }
    if (rec->owner_user != who) {
        throw Unauthorized("device " + chip_id + " belongs to another account");
    }
    return *rec;
}

UserAccount IngestService::recharge(const std::string& token, const std::string& user_id, core::Money amount) {
    std::lock_guard lk(mu_);
    require_user_locked(token, user_id);
    if (amount.paisa() <= 0) {
        throw NonPositiveAmount("recharge amount must be positive, got " + amount.to_string());
    }
    commit(Recharged{user_id, amount});
    evaluate_locked({user_id});
    return *state_.user(user_id);
}

std::vector<Notification> IngestService::evaluate_locked(const std::vector<std::string>& user_ids) {
    std::vector<Notification> fired;
    for (const auto& id : user_ids) {
        const auto* u = state_.user(id);
        if (u == nullptr || u->alert_state != AlertState::armed || u->prepaid_balance.paisa() <= 0 ||
            !owns_prepaid_device(state_, *u)) {
            continue;
        }
        const auto cost = core::prepaid_bill_for_pulses(state_.cycle_pulses(*u), config_.tariff).total;
        if (core::prepaid_alert_due(u->prepaid_balance, cost, config_.alert_threshold)) {
            commit(AlertFired{id, u->cycle, u->prepaid_balance, cost});
            fired.push_back(state_.user(id)->notifications.back());
        }
    }
    return fired;
}

std::vector<Notification> IngestService::evaluate_alerts() {
    std::lock_guard lk(mu_);
    std::vector<std::string> ids;
    for (const auto& [id, u] : state_.users()) {
        ids.push_back(id);
    }
    return evaluate_locked(ids);
}

std::vector<Notification> IngestService::notifications(const std::string& token, const std::string& user_id) {
    std::lock_guard lk(mu_);
    require_user_locked(token, user_id);
    return state_.user(user_id)->notifications;
}

Notification IngestService::acknowledge(const std::string& token, const std::string& user_id, std::uint64_t id) {
    std::lock_guard lk(mu_);
    require_user_locked(token, user_id);
    const auto& notes = state_.user(user_id)->notifications;
    auto it = std::find_if(notes.begin(), notes.end(), [&](const Notification& n) { return n.id == id; });
    if (it == notes.end()) {
        throw NotFound("no notification " + std::to_string(id));
    }
    if (!it->acknowledged) {
        commit(AlertAcknowledged{user_id, it->cycle});
    }
    const auto& after = state_.user(user_id)->notifications;
    return *std::find_if(after.begin(), after.end(), [&](const Notification& n) { return n.id == id; });
}

std::vector<DeviceRecord> IngestService::user_devices(const std::string& token, const std::string& user_id) {
    std::lock_guard lk(mu_);
    require_user_locked(token, user_id);
    std::vector<DeviceRecord> out;
    for (const auto& chip : state_.user(user_id)->device_ids) {
        auto rec = *state_.device(chip);
        rec.reports.clear();
        out.push_back(std::move(rec));
    }
    return out;
}

PrepaidAccountView IngestService::account_view_locked(const UserAccount& u) const {
    const auto pulses = state_.cycle_pulses(u);
    return {u.user_id, u.prepaid_balance, u.cycle, pulses,
            core::prepaid_bill_for_pulses(pulses, config_.tariff), u.alert_state};
}

BillingView IngestService::billing_locked(const DeviceRecord& rec, std::span<const PulseReport> reports,
                                          std::optional<MeterMode> mode, std::optional<core::Money> paid,
                                          std::optional<analytics::DayRange> range) const {
    BillingView view;
    view.chip_id = rec.identity.chip_id;
    view.mode = mode.value_or(rec.meter_mode);
    if (range) {
        for (const auto& r : reports) {
            view.consumed_pulses.count += r.pulse_delta;
        }
    } else {
        view.consumed_pulses = rec.cumulative_pulses;
    }
    view.consumed_units = core::round_kwh_billing(core::pulses_to_kwh(view.consumed_pulses));
    if (view.mode == MeterMode::prepaid) {
        view.prepaid = core::prepaid_total_cost(view.consumed_units, config_.tariff);
        if (rec.owner_user) {
            if (const auto* u = state_.user(*rec.owner_user)) {
                view.account = account_view_locked(*u);
            }
        }
    } else if (paid) {
        view.postpaid = core::postpaid_purchasable(*paid, config_.tariff);
    }
    return view;
}

ConsumptionView IngestService::query_consumption(const std::string& token, const std::string& chip_id,
                                                 std::optional<analytics::DayRange> range) {
    std::lock_guard lk(mu_);
    const auto& rec = owned_device_locked(token, chip_id);
    const auto reports = reports_in(rec, range);
    ConsumptionView view;
    view.rows = analytics::aggregate_daily(rec.reports, config_.tariff, range);
    view.billing = billing_locked(rec, reports, std::nullopt, std::nullopt, range);
    view.device = rec;
    view.device.reports.clear();
    return view;
}

DeviceRecord IngestService::device_network(const std::string& token, const std::string& chip_id) {
    std::lock_guard lk(mu_);
    auto rec = owned_device_locked(token, chip_id);
    rec.reports.clear();
    return rec;
}

BillingView IngestService::billing(const std::string& token, const std::string& chip_id,
                                   std::optional<MeterMode> mode, std::optional<core::Money> paid,
                                   std::optional<analytics::DayRange> range) {
    std::lock_guard lk(mu_);
    const auto& rec = owned_device_locked(token, chip_id);
    if (mode.value_or(rec.meter_mode) == MeterMode::postpaid && !paid) {
        throw ValidationError("postpaid billing needs a paid amount");
    }
    const auto reports = reports_in(rec, range);
    return billing_locked(rec, reports, mode, paid, range);
}

analytics::WeeklyReport IngestService::weekly(const std::string& token, const std::string& chip_id,
                                              std::optional<analytics::DayRange> range) {
    std::lock_guard lk(mu_);
    const auto& rec = owned_device_locked(token, chip_id);
    const auto rows = analytics::aggregate_daily(rec.reports, config_.tariff, range);
    return analytics::weekly_report(rows);
}

ServiceState IngestService::state() const {
    std::lock_guard lk(mu_);
    return state_;
}

std::optional<DeviceRecord> IngestService::device(const std::string& chip_id) const {
    std::lock_guard lk(mu_);
    const auto* rec = state_.device(chip_id);
    return rec ? std::optional<DeviceRecord>(*rec) : std::nullopt;
}

std::optional<UserAccount> IngestService::user(const std::string& user_id) const {
    std::lock_guard lk(mu_);
    const auto* u = state_.user(user_id);
    return u ? std::optional<UserAccount>(*u) : std::nullopt;
}

bool LocalUplink::register_device(const DeviceIdentity& identity, MeterMode mode) {
    try {
        service_.register_device(identity, mode);
        return true;
    } catch (const DuplicateChipId&) {
        return false;
    }
}

std::optional<ResumePoint> LocalUplink::last_count(const std::string& chip_id) {
    return service_.resume_point(chip_id);
}

Ack LocalUplink::send(const PulseReport& report) {
    return service_.ingest(report);
}

} // namespace smartmeter::ingest
