// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/http_api.hpp"

#include <httplib.h>

#include <iostream>

#include "smartmeter/core/tariff_json.hpp"

namespace smartmeter::ingest {

using nlohmann::json;

json device_json(const DeviceRecord& d) {
    return {{"identity",
             {{"chip_id", d.identity.chip_id},
              {"hostname", d.identity.hostname},
              {"mac", d.identity.mac},
              {"ip", d.identity.ip}}},
            {"meter_mode", std::string(to_string(d.meter_mode))},
            {"cumulative_pulses", d.cumulative_pulses.count},
            {"total_power_kwh", d.total_power_kwh().to_string(3)},
            {"last_seq", d.last_seq},
            {"owner_user", d.owner_user ? json(*d.owner_user) : json(nullptr)},
            {"registered_at", format_timestamp(d.registered_at)},
            {"last_report_at", d.last_report_at ? json(format_timestamp(*d.last_report_at)) : json(nullptr)}};
}

json daily_row_json(const analytics::DailyConsumption& row) {
    return {{"day", format_date(row.day)},
            {"pulse_count", row.pulse_count.count},
            {"kwh", row.kwh.to_string(1)},
            {"vat", row.vat.to_string()},
            {"total", row.total.to_string()}};
}

namespace {

json bill_json(const core::BillBreakdown& b) {
    json tiers = json::array();
    for (const auto& c : b.tier_charges) {
        tiers.push_back(c.to_string());
    }
    return {{"tier_charges", tiers},
            {"energy_charge", b.energy_charge.to_string()},
            {"demand_charge", b.demand_charge.to_string()},
            {"vat", b.vat.to_string()},
            {"total", b.total.to_string()},
            {"billed_units", b.billed_units.to_string(1)}};
}

json postpaid_json(const core::PostpaidBreakdown& p) {
    return {{"paid_amount", p.paid_amount.to_string()},
            {"vat", p.vat.to_string()},
            {"meter_rent", p.meter_rent.to_string()},
            {"demand_charge", p.demand_charge.to_string()},
            {"purchasable", p.purchasable.to_string()},
            {"rebate", p.rebate.to_string()},
            {"purchasable_units", p.purchasable_units.to_string(1)}};
}

// Tenths of a percent, half-up.
std::string percent_text(core::Money part, core::Money whole) {
    if (whole.paisa() <= 0) {
        return "0.0";
    }
    const auto tenths = core::div_round_half_up(part.paisa() * 1000, whole.paisa());
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

} // namespace

json billing_json(const BillingView& v) {
    json out = {{"chip_id", v.chip_id},
                {"mode", std::string(to_string(v.mode))},
                {"consumed_pulses", v.consumed_pulses.count},
                {"consumed_units", v.consumed_units.to_string(1)},
                {"breakdown", nullptr}};
    if (v.prepaid) {
        out["breakdown"] = bill_json(*v.prepaid);
    } else if (v.postpaid) {
        out["breakdown"] = postpaid_json(*v.postpaid);
    }
    if (v.account) {
        const auto& a = *v.account;
        out["account"] = {{"user_id", a.user_id},
                          {"prepaid_balance", a.balance.to_string()},
                          {"cycle", a.cycle},
                          {"cycle_pulses", a.cycle_pulses.count},
                          {"cycle_cost", bill_json(a.cycle_cost)},
                          {"used_percent", percent_text(a.cycle_cost.total, a.balance)},
                          {"alert_state", std::string(to_string(a.alert_state))}};
    }
    return out;
}

json user_json(const UserAccount& u) {
    return {{"user_id", u.user_id},
            {"device_ids", u.device_ids},
            {"prepaid_balance", u.prepaid_balance.to_string()},
            {"alert_state", std::string(to_string(u.alert_state))},
            {"cycle", u.cycle}};
}

json notification_json(const Notification& n) {
    const auto pct = percent_text(n.consumed_cost, n.balance);
    return {{"id", n.id},
            {"user_id", n.user_id},
            {"cycle", n.cycle},
            {"at", format_timestamp(n.at)},
            {"balance", n.balance.to_string()},
            {"consumed_cost", n.consumed_cost.to_string()},
            {"used_percent", pct},
            {"acknowledged", n.acknowledged},
            {"message", "Consumption cost " + n.consumed_cost.to_string() + " has used " + pct +
                            "% of the recharged balance " + n.balance.to_string() + "."}};
}

json weekly_json(const analytics::WeeklyReport& r) {
    json series = json::array();
    for (const auto& p : r.series) {
        series.push_back({{"day", p.day}, {"kwh", p.kwh.to_string(1)}});
    }
    return {{"base_kwh", r.classification.base_kwh.to_string(1)},
            {"average_kwh", r.classification.average_kwh.to_string(2)},
            {"max_kwh", r.classification.max_kwh.to_string(1)},
            {"series", series}};
}

namespace {

struct HttpError {
    int status;
    std::string code;
    std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::string bearer(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.size() > prefix.size() && header.compare(0, prefix.size(), prefix) == 0) {
        return header.substr(prefix.size());
    }
    return {};
}

json body_of(const httplib::Request& req) {
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ParseError("request body must be a JSON object");
    }
    return doc;
}

std::string text_member(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
        throw ValidationError(std::string("missing string field ") + key);
    }
    return it->get<std::string>();
}

std::optional<analytics::DayRange> range_of(const httplib::Request& req) {
    const bool has_from = req.has_param("from");
    const bool has_to = req.has_param("to");
    if (!has_from && !has_to) {
        return std::nullopt;
    }
    if (has_from != has_to) {
        throw ValidationError("give both from and to, or neither");
    }
    return analytics::DayRange{parse_date(req.get_param_value("from")), parse_date(req.get_param_value("to"))};
}

HttpError classify(const std::exception& e) {
    const std::string msg = e.what();
    if (dynamic_cast<const BadCredentials*>(&e)) return {401, "bad_credentials", msg};
    if (dynamic_cast<const Unauthorized*>(&e)) return {401, "unauthorized", msg};
    if (dynamic_cast<const UnknownDevice*>(&e)) return {404, "unknown_device", msg};
    if (dynamic_cast<const UnknownUser*>(&e)) return {404, "unknown_user", msg};
    if (dynamic_cast<const NotFound*>(&e)) return {404, "not_found", msg};
    if (dynamic_cast<const DuplicateUser*>(&e)) return {409, "duplicate_user", msg};
    if (dynamic_cast<const DeviceAlreadyClaimed*>(&e)) return {409, "device_already_claimed", msg};
    if (dynamic_cast<const DuplicateChipId*>(&e)) return {409, "duplicate_chip_id", msg};
    if (dynamic_cast<const NonPositiveAmount*>(&e)) return {422, "non_positive_amount", msg};
    if (dynamic_cast<const InsufficientPayment*>(&e)) return {422, "insufficient_payment", msg};
    if (dynamic_cast<const EmptySeries*>(&e)) return {422, "empty_series", msg};
    if (dynamic_cast<const UnitsExceedSchedule*>(&e)) return {422, "units_exceed_schedule", msg};
    if (dynamic_cast<const ValidationError*>(&e)) return {400, "validation_error", msg};
    if (dynamic_cast<const ParseError*>(&e)) return {400, "parse_error", msg};
    return {500, "internal", msg};
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const std::exception& e) {
            const auto err = classify(e);
            if (err.status == 500) {
                std::cerr << req.method << ' ' << req.path << " failed: " << err.message << '\n';
            }
            send_json(res, err.status, {{"error", err.code}, {"message", err.message}});
        }
    };
}

} // namespace

HttpApi::HttpApi(IngestService& service, const std::string& bind_address, std::uint16_t port)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    routes();
    if (port == 0) {
        const int bound = server_->bind_to_any_port(bind_address);
        if (bound < 0) {
            throw std::runtime_error("cannot bind HTTP API on " + bind_address);
        }
        port_ = static_cast<std::uint16_t>(bound);
    } else {
        if (!server_->bind_to_port(bind_address, port)) {
            throw std::runtime_error("cannot bind HTTP API on " + bind_address + ":" + std::to_string(port));
        }
        port_ = port;
    }
}

HttpApi::~HttpApi() {
    stop();
}

void HttpApi::start() {
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void HttpApi::stop() {
    server_->stop();
    if (thread_.joinable()) {
        thread_.join();
    }
}

void HttpApi::routes() {
    auto& s = *server_;
    auto& svc = service_;

    s.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    }));

    s.Post("/register", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto user = svc.register_user(text_member(body, "user_id"), text_member(body, "password"),
                                            text_member(body, "chip_id"));
        send_json(res, 201, user_json(user));
    }));

    s.Post("/login", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto user_id = text_member(body, "user_id");
        const auto token = svc.authenticate(user_id, text_member(body, "password"));
        json devices = json::array();
        for (const auto& d : svc.user_devices(token, user_id)) {
            devices.push_back(device_json(d));
        }
        const auto ttl = std::chrono::duration_cast<std::chrono::seconds>(svc.config().token_ttl);
        send_json(res, 200,
                  {{"token", token}, {"user_id", user_id}, {"expires_in_s", ttl.count()}, {"devices", devices}});
    }));

    s.Post("/logout", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        svc.logout(bearer(req));
        res.status = 204;
    }));

    s.Get(R"(/users/([^/]+)/devices)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        json devices = json::array();
        for (const auto& d : svc.user_devices(bearer(req), req.matches[1])) {
            devices.push_back(device_json(d));
        }
        send_json(res, 200, {{"devices", devices}});
    }));

    s.Post(R"(/users/([^/]+)/recharge)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        auto it = body.find("amount");
        if (it == body.end()) {
            throw ValidationError("missing field amount");
        }
        const auto amount = core::Money::parse(core::decimal_text(*it));
        send_json(res, 200, user_json(svc.recharge(bearer(req), req.matches[1], amount)));
    }));

    s.Get(R"(/users/([^/]+)/notifications)",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
              json notes = json::array();
              for (const auto& n : svc.notifications(bearer(req), req.matches[1])) {
                  notes.push_back(notification_json(n));
              }
              send_json(res, 200, {{"notifications", notes}});
          }));

    s.Post(R"(/users/([^/]+)/notifications/(\d+)/ack)",
           guarded([&svc](const httplib::Request& req, httplib::Response& res) {
               const auto id = std::stoull(req.matches[2]);
               send_json(res, 200, notification_json(svc.acknowledge(bearer(req), req.matches[1], id)));
           }));

    s.Get(R"(/devices/([^/]+)/consumption)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto view = svc.query_consumption(bearer(req), req.matches[1], range_of(req));
        json rows = json::array();
        for (const auto& r : view.rows) {
            rows.push_back(daily_row_json(r));
        }
        send_json(res, 200,
                  {{"chip_id", view.device.identity.chip_id},
                   {"rows", rows},
                   {"network", device_json(view.device)},
                   {"billing", billing_json(view.billing)}});
    }));

    s.Get(R"(/devices/([^/]+)/network)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, device_json(svc.device_network(bearer(req), req.matches[1])));
    }));

    s.Get(R"(/devices/([^/]+)/billing)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        std::optional<MeterMode> mode;
        if (req.has_param("mode")) {
            mode = parse_meter_mode(req.get_param_value("mode"));
        }
        std::optional<core::Money> paid;
        if (req.has_param("paid")) {
            paid = core::Money::parse(req.get_param_value("paid"));
        }
        send_json(res, 200, billing_json(svc.billing(bearer(req), req.matches[1], mode, paid, range_of(req))));
    }));

    s.Get(R"(/devices/([^/]+)/weekly)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, weekly_json(svc.weekly(bearer(req), req.matches[1], range_of(req))));
    }));
}

} // namespace smartmeter::ingest
