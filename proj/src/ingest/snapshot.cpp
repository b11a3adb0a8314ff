// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/snapshot.hpp"

#include <cstdio>
#include <fstream>

namespace smartmeter::ingest {

using nlohmann::json;

namespace {

constexpr int kFormat = 1;

template <std::size_t N>
std::string hex(const std::array<std::uint8_t, N>& bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (auto b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> unhex(const std::string& text) {
    if (text.size() != 2 * N) {
        throw json::other_error::create(501, "bad hex length", nullptr);
    }
    std::array<std::uint8_t, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = static_cast<std::uint8_t>(std::stoul(text.substr(2 * i, 2), nullptr, 16));
    }
    return out;
}

std::int64_t ms(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp at_ms(std::int64_t v) { return Timestamp{Duration{v}}; }

json report_json(const PulseReport& r) {
    return {{"seq", r.seq}, {"pulse_delta", r.pulse_delta}, {"reported_at", ms(r.reported_at)},
            {"hostname", r.hostname}, {"mac", r.mac}, {"ip", r.ip}};
}

} // namespace

json ServiceState::to_json() const {
    json devices = json::object();
    for (const auto& [chip, d] : devices_) {
        json reports = json::array();
        for (const auto& r : d.reports) {
            reports.push_back(report_json(r));
        }
        devices[chip] = {
            {"hostname", d.identity.hostname},
            {"mac", d.identity.mac},
            {"ip", d.identity.ip},
            {"meter_mode", std::string(smartmeter::to_string(d.meter_mode))},
            {"cumulative_pulses", d.cumulative_pulses.count},
            {"last_seq", d.last_seq},
            {"owner_user", d.owner_user ? json(*d.owner_user) : json(nullptr)},
            {"registered_at", ms(d.registered_at)},
            {"last_report_at", d.last_report_at ? json(ms(*d.last_report_at)) : json(nullptr)},
            {"reports", std::move(reports)},
        };
    }
    json users = json::object();
    for (const auto& [id, u] : users_) {
        json notes = json::array();
        for (const auto& n : u.notifications) {
            notes.push_back({{"id", n.id},
                             {"cycle", n.cycle},
                             {"at", ms(n.at)},
                             {"balance", n.balance.paisa()},
                             {"consumed_cost", n.consumed_cost.paisa()},
                             {"acknowledged", n.acknowledged}});
        }
        users[id] = {
            {"salt", hex(u.salt)},
            {"password_digest", hex(u.password_digest)},
            {"iterations", u.iterations},
            {"device_ids", u.device_ids},
            {"prepaid_balance", u.prepaid_balance.paisa()},
            {"alert_state", std::string(to_string(u.alert_state))},
            {"cycle", u.cycle},
            {"baseline_pulses", u.baseline_pulses},
            {"notifications", std::move(notes)},
        };
    }
    return {{"format", kFormat}, {"next_offset", next_offset_}, {"devices", devices}, {"users", users}};
}

ServiceState ServiceState::from_json(const json& doc) {
    if (doc.at("format").get<int>() != kFormat) {
        throw json::other_error::create(501, "unsupported snapshot format", nullptr);
    }
    ServiceState s;
    s.next_offset_ = doc.at("next_offset").get<std::uint64_t>();
    for (const auto& [chip, d] : doc.at("devices").items()) {
        DeviceRecord rec;
        rec.identity = {chip, d.at("hostname"), d.at("mac"), d.at("ip")};
        rec.meter_mode = parse_meter_mode(d.at("meter_mode").get<std::string>());
        rec.cumulative_pulses.count = d.at("cumulative_pulses").get<std::uint64_t>();
        rec.last_seq = d.at("last_seq").get<std::int64_t>();
        if (!d.at("owner_user").is_null()) {
            rec.owner_user = d.at("owner_user").get<std::string>();
        }
        rec.registered_at = at_ms(d.at("registered_at").get<std::int64_t>());
        if (!d.at("last_report_at").is_null()) {
            rec.last_report_at = at_ms(d.at("last_report_at").get<std::int64_t>());
        }
        for (const auto& r : d.at("reports")) {
            rec.reports.push_back({chip, r.at("seq"), r.at("pulse_delta"),
                                   at_ms(r.at("reported_at").get<std::int64_t>()), r.at("hostname"),
                                   r.at("mac"), r.at("ip")});
        }
        s.devices_.emplace(chip, std::move(rec));
    }
    for (const auto& [id, u] : doc.at("users").items()) {
        UserAccount acc;
        acc.user_id = id;
        acc.salt = unhex<16>(u.at("salt"));
        acc.password_digest = unhex<32>(u.at("password_digest"));
        acc.iterations = u.at("iterations");
        acc.device_ids = u.at("device_ids").get<std::vector<std::string>>();
        acc.prepaid_balance = core::Money::from_paisa(u.at("prepaid_balance").get<std::int64_t>());
        acc.alert_state = u.at("alert_state") == "fired" ? AlertState::fired : AlertState::armed;
        acc.cycle = u.at("cycle");
        acc.baseline_pulses = u.at("baseline_pulses").get<std::map<std::string, std::uint64_t>>();
        for (const auto& n : u.at("notifications")) {
            acc.notifications.push_back({n.at("id"), id, n.at("cycle"), at_ms(n.at("at").get<std::int64_t>()),
                                         core::Money::from_paisa(n.at("balance").get<std::int64_t>()),
                                         core::Money::from_paisa(n.at("consumed_cost").get<std::int64_t>()),
                                         n.at("acknowledged")});
        }
        s.users_.emplace(id, std::move(acc));
    }
    return s;
}

void write_snapshot(const std::filesystem::path& path, const ServiceState& state) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << state.to_json().dump();
        if (!out.flush()) {
            throw std::runtime_error("cannot write snapshot " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ServiceState> read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    try {
        return ServiceState::from_json(json::parse(in));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace smartmeter::ingest
