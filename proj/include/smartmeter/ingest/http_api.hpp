// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "smartmeter/ingest/service.hpp"

namespace httplib {
class Server;
}

namespace smartmeter::ingest {

/// JSON query/control API. Money and kWh figures are serialized as decimal
/// strings so clients can display them verbatim.
///
///   POST /register                         {user_id, password, chip_id}
///   POST /login                            {user_id, password} -> {token, ...}
///   POST /logout
///   GET  /users/{id}/devices
///   POST /users/{id}/recharge              {amount}
///   GET  /users/{id}/notifications
///   POST /users/{id}/notifications/{n}/ack
///   GET  /devices/{id}/consumption         ?from=YYYY-MM-DD&to=YYYY-MM-DD
///   GET  /devices/{id}/network
///   GET  /devices/{id}/billing             ?mode=prepaid|postpaid&paid=&from=&to=
///   GET  /devices/{id}/weekly              ?from=&to=
///   GET  /health
///
/// Everything except register, login and health needs "Authorization:
/// Bearer <token>". Errors come back as {error, message}.
class HttpApi {
public:
    /// Binds immediately; port 0 picks an ephemeral port.
    HttpApi(IngestService& service, const std::string& bind_address, std::uint16_t port);
    ~HttpApi();
    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    std::uint16_t port() const { return port_; }
    void start();
    void stop();

private:
    void routes();

    IngestService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::uint16_t port_ = 0;
    std::thread thread_;
};

// Serializers shared with the CLI.
nlohmann::json device_json(const DeviceRecord& record);
nlohmann::json daily_row_json(const analytics::DailyConsumption& row);
nlohmann::json billing_json(const BillingView& view);
nlohmann::json user_json(const UserAccount& user);
nlohmann::json notification_json(const Notification& note);
nlohmann::json weekly_json(const analytics::WeeklyReport& report);

} // namespace smartmeter::ingest
