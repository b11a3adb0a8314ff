// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "ingest_fixtures.hpp"
#include "smartmeter/ingest/device_client.hpp"
#include "smartmeter/ingest/device_server.hpp"
#include "smartmeter/ingest/http_api.hpp"
#include "smartmeter/sim/driver.hpp"

using namespace smartmeter;
using namespace smartmeter::ingest;
using namespace testing_support;
using namespace std::chrono;
using nlohmann::json;

namespace {

class NetworkTest : public ::testing::Test {
protected:
    void SetUp() override {
        service = std::make_unique<IngestService>(test_config(dir));
        devices = std::make_unique<DeviceServer>(*service, "127.0.0.1", 0);
        devices->start();
        http = std::make_unique<HttpApi>(*service, "127.0.0.1", 0);
        http->start();
        client = std::make_unique<httplib::Client>("127.0.0.1", http->port());
    }

    void TearDown() override {
        client.reset();
        http.reset();
        devices.reset();
        service.reset();
    }

    TcpUplink uplink() { return TcpUplink("127.0.0.1", devices->port(), seconds{2}); }

    httplib::Result post(const std::string& path, const json& body, const std::string& token = {}) {
        httplib::Headers headers;
        if (!token.empty()) {
            headers.emplace("Authorization", "Bearer " + token);
        }
        return client->Post(path, headers, body.dump(), "application/json");
    }

    httplib::Result get(const std::string& path, const std::string& token) {
        return client->Get(path, {{"Authorization", "Bearer " + token}});
    }

    std::string login(const std::string& user, const std::string& chip) {
        auto res = post("/register", {{"user_id", user}, {"password", "correct horse"}, {"chip_id", chip}});
        EXPECT_EQ(res->status, 201) << res->body;
        res = post("/login", {{"user_id", user}, {"password", "correct horse"}});
        EXPECT_EQ(res->status, 200) << res->body;
        return json::parse(res->body).at("token");
    }

    TempDir dir;
    std::unique_ptr<IngestService> service;
    std::unique_ptr<DeviceServer> devices;
    std::unique_ptr<HttpApi> http;
    std::unique_ptr<httplib::Client> client;
};

} // namespace

TEST_F(NetworkTest, TcpUplinkSequenceContract) {
    auto up = uplink();
    EXPECT_FALSE(up.last_count("ESP-001").has_value());
    EXPECT_TRUE(up.register_device(kMeter, MeterMode::prepaid));
    EXPECT_FALSE(up.register_device(kMeter, MeterMode::prepaid));
    EXPECT_EQ(up.last_count("ESP-001"), (ResumePoint{0, -1}));
    for (std::uint64_t seq = 0; seq < 1440; ++seq) {
        ASSERT_EQ(up.send(report("ESP-001", seq, 10)).status, IngestStatus::accept);
    }
    EXPECT_EQ(up.send(report("ESP-001", 700, 10)).status, IngestStatus::duplicate);
    const auto gap = up.send(report("ESP-001", 1442, 10));
    EXPECT_EQ(gap.reason, RejectReason::sequence_gap);
    EXPECT_EQ(gap.last_seq, 1439);
    EXPECT_EQ(up.last_count("ESP-001"), (ResumePoint{14400, 1439}));
    EXPECT_EQ(devices->connections_accepted(), 1u);
}

TEST_F(NetworkTest, InvalidRegistrationSurfacesAsValidationError) {
    auto up = uplink();
    auto bad = kMeter;
    bad.ip = "10.0.0";
    EXPECT_THROW(up.register_device(bad, MeterMode::prepaid), ValidationError);
    EXPECT_TRUE(up.connected());
}

TEST_F(NetworkTest, LinkErrorsWhenServerGoesAway) {
    auto up = uplink();
    up.register_device(kMeter, MeterMode::prepaid);
    devices->stop();
    EXPECT_THROW(up.send(report("ESP-001", 0, 10)), LinkError);
    EXPECT_FALSE(up.connected());
    EXPECT_THROW(up.last_count("ESP-001"), LinkError);
}

TEST_F(NetworkTest, ConcurrentDevicesKeepIndependentSequences) {
    constexpr int kDevices = 4;
    std::vector<std::thread> threads;
    for (int i = 0; i < kDevices; ++i) {
        threads.emplace_back([this, i] {
            auto up = uplink();
            const std::string chip = "ESP-10" + std::to_string(i);
            char mac[32];
            std::snprintf(mac, sizeof mac, "5c:cf:7f:00:01:%02x", i);
            up.register_device({chip, "meter-" + std::to_string(i), mac, "10.0.0." + std::to_string(10 + i)},
                               MeterMode::prepaid);
            for (std::uint64_t seq = 0; seq < 200; ++seq) {
                auto r = report(chip, seq, 10);
                r.mac = mac;
                up.send(r);
                up.send(r);  // immediate redelivery
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (int i = 0; i < kDevices; ++i) {
        const auto rec = *service->device("ESP-10" + std::to_string(i));
        EXPECT_EQ(rec.cumulative_pulses.count, 2000u);
        EXPECT_EQ(rec.last_seq, 199);
    }
    EXPECT_EQ(replay_ledger(dir / "ledger.bin"), service->state());
}

TEST_F(NetworkTest, SimulatedHourOverTcpIsConserved) {
    sim::FleetDefinition fleet;
    fleet.start = parse_timestamp("2019-06-01T00:00:00Z");
    fleet.devices.push_back({kMeter, MeterMode::prepaid, sim::LoadProfile::constant(600),
                             sim::FirmwareState::provisioned, sim::WifiNetwork{"home", "pw"}});
    const auto port = devices->port();
    sim::FleetDriver driver(
        fleet, [port](const sim::DeviceSpec&) { return std::make_unique<TcpUplink>("127.0.0.1", port); },
        {seconds{1}, 0.0});
    driver.register_all();
    driver.run_for(hours{1});
    driver.shutdown();
    const auto s = driver.summaries().at(0);
    EXPECT_EQ(s.crossings, 600u);
    EXPECT_TRUE(s.conserved());
    EXPECT_EQ(service->last_count("ESP-001").count, 600u);
    EXPECT_EQ(service->device("ESP-001")->last_seq, 59);
}

TEST_F(NetworkTest, HttpRegisterLoginAndQueries) {
    service->register_device(kMeter, MeterMode::prepaid);
    for (const auto& r : week_reports("ESP-001")) {
        service->ingest(r);
    }
    auto res = post("/register", {{"user_id", "alice"}, {"password", "correct horse"}, {"chip_id", "ESP-404"}});
    EXPECT_EQ(res->status, 404);
    EXPECT_EQ(json::parse(res->body).at("error"), "unknown_device");

    const auto token = login("alice", "ESP-001");
    res = post("/login", {{"user_id", "alice"}, {"password", "nope-nope"}});
    EXPECT_EQ(res->status, 401);
    EXPECT_EQ(json::parse(res->body).at("error"), "bad_credentials");

    res = get("/devices/ESP-001/consumption", token);
    ASSERT_EQ(res->status, 200) << res->body;
    auto body = json::parse(res->body);
    ASSERT_EQ(body.at("rows").size(), 7u);
    EXPECT_EQ(body["rows"][0],
              json({{"day", "2019-06-01"}, {"pulse_count", 14208}, {"kwh", "14.2"}, {"vat", "10.34"},
                    {"total", "217.14"}}));
    EXPECT_EQ(body["rows"][6]["total"], "225.54");
    EXPECT_EQ(body["network"]["identity"]["mac"], kMeter.mac);
    EXPECT_EQ(body["network"]["cumulative_pulses"], 106392);
    EXPECT_EQ(body["network"]["total_power_kwh"], "106.392");

    res = get("/devices/ESP-001/consumption?from=2019-06-02&to=2019-06-03", token);
    body = json::parse(res->body);
    ASSERT_EQ(body.at("rows").size(), 2u);
    EXPECT_EQ(body["rows"][1]["vat"], "10.56");
    res = get("/devices/ESP-001/consumption?from=2019-06-03&to=2019-06-02", token);
    EXPECT_TRUE(json::parse(res->body).at("rows").empty());
    res = get("/devices/ESP-001/consumption?from=2019-06-03", token);
    EXPECT_EQ(res->status, 400);
    res = get("/devices/ESP-001/consumption?from=junk&to=2019-06-02", token);
    EXPECT_EQ(res->status, 400);

    res = get("/devices/ESP-001/billing?mode=postpaid&paid=1000.00", token);
    ASSERT_EQ(res->status, 200) << res->body;
    body = json::parse(res->body);
    EXPECT_EQ(body["breakdown"]["vat"], "48.00");
    EXPECT_EQ(body["breakdown"]["purchasable"], "862.00");
    EXPECT_EQ(body["breakdown"]["meter_rent"], "40.00");
    EXPECT_EQ(body["breakdown"]["rebate"], "10.02");
    res = get("/devices/ESP-001/billing?mode=postpaid&paid=90.00", token);
    EXPECT_EQ(res->status, 422);
    res = get("/devices/ESP-001/billing?mode=postpaid", token);
    EXPECT_EQ(res->status, 400);

    res = get("/devices/ESP-001/billing?from=2019-06-01&to=2019-06-01", token);
    body = json::parse(res->body);
    EXPECT_EQ(body["mode"], "prepaid");
    EXPECT_EQ(body["consumed_pulses"], 14208);
    EXPECT_EQ(body["breakdown"]["total"], "217.14");
    EXPECT_EQ(body["breakdown"]["energy_charge"], "56.80");

    res = get("/devices/ESP-001/weekly", token);
    body = json::parse(res->body);
    EXPECT_EQ(body["base_kwh"], "13.9");
    EXPECT_EQ(body["max_kwh"], "16.4");
    EXPECT_EQ(body["series"].size(), 7u);

    res = get("/devices/ESP-001/network", token);
    EXPECT_EQ(json::parse(res->body)["identity"]["chip_id"], "ESP-001");
    res = get("/users/alice/devices", token);
    EXPECT_EQ(json::parse(res->body)["devices"].size(), 1u);
}

TEST_F(NetworkTest, HttpAccessControl) {
    service->register_device(kMeter, MeterMode::prepaid);
    service->register_device(kOtherMeter, MeterMode::prepaid);
    const auto alice = login("alice", "ESP-001");
    const auto bob = login("bob", "ESP-002");
    EXPECT_EQ(get("/devices/ESP-001/network", bob)->status, 401);
    EXPECT_EQ(get("/devices/ESP-001/network", "")->status, 401);
    EXPECT_EQ(client->Get("/devices/ESP-001/network")->status, 401);
    EXPECT_EQ(get("/users/alice/notifications", bob)->status, 401);
    EXPECT_EQ(get("/devices/ESP-404/network", alice)->status, 404);
    EXPECT_EQ(post("/logout", json::object(), alice)->status, 204);
    EXPECT_EQ(get("/devices/ESP-001/network", alice)->status, 401);
    EXPECT_EQ(client->Get("/health")->status, 200);
}

TEST_F(NetworkTest, HttpRechargeAndAlertFlow) {
    service->register_device(kMeter, MeterMode::prepaid);
    const auto token = login("alice", "ESP-001");
    auto res = post("/users/alice/recharge", {{"amount", "0"}}, token);
    EXPECT_EQ(res->status, 422);
    EXPECT_EQ(json::parse(res->body).at("error"), "non_positive_amount");
    res = post("/users/alice/recharge", {{"amount", "abc"}}, token);
    EXPECT_EQ(res->status, 400);
    res = post("/users/alice/recharge", {{"amount", "250.00"}}, token);
    ASSERT_EQ(res->status, 200) << res->body;
    EXPECT_EQ(json::parse(res->body).at("prepaid_balance"), "250.00");

    std::uint64_t seq = 0;
    for (std::uint64_t left = 14208; left > 0;) {
        const auto delta = std::min<std::uint64_t>(10, left);
        service->ingest(report("ESP-001", seq++, delta));
        left -= delta;
    }
    res = get("/users/alice/notifications", token);
    auto notes = json::parse(res->body).at("notifications");
    ASSERT_EQ(notes.size(), 1u);
    // First batch at or over 200.00 bills 10.2 kWh.
    EXPECT_EQ(notes[0]["consumed_cost"], "200.34");
    EXPECT_EQ(notes[0]["balance"], "250.00");
    EXPECT_EQ(notes[0]["used_percent"], "80.1");
    EXPECT_FALSE(notes[0]["acknowledged"].get<bool>());

    const auto id = notes[0]["id"].get<std::uint64_t>();
    res = post("/users/alice/notifications/" + std::to_string(id) + "/ack", json::object(), token);
    ASSERT_EQ(res->status, 200);
    EXPECT_TRUE(json::parse(res->body).at("acknowledged").get<bool>());

    res = get("/devices/ESP-001/billing", token);
    const auto body = json::parse(res->body);
    EXPECT_EQ(body["account"]["prepaid_balance"], "250.00");
    EXPECT_EQ(body["account"]["alert_state"], "fired");
    EXPECT_EQ(body["account"]["cycle_cost"]["total"], "217.14");
}
