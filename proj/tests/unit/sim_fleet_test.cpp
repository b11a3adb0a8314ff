// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fake_uplink.hpp"
#include "smartmeter/core/errors.hpp"
#include "smartmeter/sim/driver.hpp"

using namespace smartmeter;
using namespace smartmeter::sim;
using namespace std::chrono;
using nlohmann::json;

namespace {

json one_device_fleet(int watts) {
    return json::parse(R"({
      "start": "2019-06-01T00:00:00Z",
      "devices": [{"chip_id": "ESP-001", "hostname": "meter-1", "mac": "5c:cf:7f:00:00:01",
                   "ip": "192.168.0.17", "meter_mode": "prepaid",
                   "network": {"ssid": "home", "credential": "pw"},
                   "profile": {"repeat": true, "segments": [{"seconds": 86400, "watts": )" +
                     std::to_string(watts) + "}]}}]}");
}

} // namespace

TEST(Fleet, ParsesDefinition) {
    const auto fleet = parse_fleet(one_device_fleet(600));
    ASSERT_EQ(fleet.devices.size(), 1u);
    EXPECT_EQ(fleet.start, parse_timestamp("2019-06-01T00:00:00Z"));
    EXPECT_EQ(fleet.devices[0].identity.mac, "5c:cf:7f:00:00:01");
    EXPECT_EQ(fleet.devices[0].profile.watts_at(hours{3}), 600);
    EXPECT_EQ(fleet.options.batch_size, 10u);
    EXPECT_EQ(fleet.options.max_latency, seconds{120});
}

TEST(Fleet, RejectsDuplicatesAndBadAddresses) {
    auto doc = one_device_fleet(600);
    doc["devices"].push_back(doc["devices"][0]);
    EXPECT_THROW(parse_fleet(doc), ParseError);
    doc["devices"][1]["chip_id"] = "ESP-002";
    EXPECT_THROW(parse_fleet(doc), ParseError);  // same MAC
    doc["devices"][1]["mac"] = "5c:cf:7f:00:00:02";
    EXPECT_NO_THROW(parse_fleet(doc));
    doc["devices"][1]["ip"] = "300.1.1.1";
    EXPECT_THROW(parse_fleet(doc), ParseError);
}

TEST(Fleet, FaultScriptIsSortedAndAcceptsTimestamps) {
    const auto start = parse_timestamp("2019-06-01T00:00:00Z");
    const auto faults = parse_faults(json::parse(R"({"faults": [
        {"at_s": 7200, "chip_id": "ESP-001", "fault": "link_up"},
        {"at": "2019-06-01T01:00:00Z", "chip_id": "ESP-001", "fault": "link_down"}]})"),
                                     start);
    ASSERT_EQ(faults.size(), 2u);
    EXPECT_EQ(faults[0].fault, Fault::link_down);
    EXPECT_EQ(faults[0].at, hours{1});
    EXPECT_EQ(faults[1].at, hours{2});
    EXPECT_THROW(parse_faults(json::parse(R"({"faults": [{"at_s": 1, "chip_id": "x",
        "fault": "flood"}]})"), start), ParseError);
}

TEST(FleetDriver, OneDayAtSixHundredWatts) {
    FakeServer server;
    FleetDriver driver(parse_fleet(one_device_fleet(600)),
                       [&](const DeviceSpec&) { return std::make_unique<FakeUplink>(server); },
                       DriverOptions{seconds{1}, 0.0});
    driver.register_all();
    driver.run_for(hours{24});
    driver.shutdown();
    const auto summary = driver.summaries().at(0);
    EXPECT_EQ(summary.crossings, 14400u);
    EXPECT_EQ(summary.acked, 14400u);
    EXPECT_TRUE(summary.conserved());
    EXPECT_EQ(server.accepted.size(), 1440u);
    EXPECT_EQ(server.accepted.back().seq, 1439u);
}

TEST(FleetDriver, ZeroDaysIsNoop) {
    FakeServer server;
    FleetDriver driver(parse_fleet(one_device_fleet(600)),
                       [&](const DeviceSpec&) { return std::make_unique<FakeUplink>(server); },
                       DriverOptions{seconds{1}, 0.0});
    driver.register_all();
    driver.run_for(hours{0});
    driver.shutdown();
    EXPECT_EQ(driver.summaries().at(0).acked, 0u);
}

TEST(FleetDriver, FaultsApplyAtScheduledInstant) {
    FakeServer server;
    const auto fleet = parse_fleet(one_device_fleet(600));
    std::vector<FaultEvent> faults{{milliseconds{90'500}, "ESP-001", Fault::link_down},
                                   {seconds{300}, "ESP-001", Fault::link_up}};
    FleetDriver driver(fleet,
                       [&](const DeviceSpec&) { return std::make_unique<FakeUplink>(server); },
                       DriverOptions{seconds{60}, 0.0}, faults);
    driver.register_all();
    std::vector<std::pair<Timestamp, FirmwareState>> transitions;
    driver.on_event = [&](const Device&, const DeviceEvent& e) {
        if (e.kind == EventKind::state_change) {
            transitions.emplace_back(e.at, e.state);
        }
    };
    driver.run_for(seconds{400});
    ASSERT_FALSE(transitions.empty());
    bool saw_offline = false;
    for (const auto& [at, state] : transitions) {
        if (state == FirmwareState::offline) {
            EXPECT_EQ(at, fleet.start + milliseconds{90'500});
            saw_offline = true;
        }
    }
    EXPECT_TRUE(saw_offline);
    EXPECT_EQ(driver.device("ESP-001").state(), FirmwareState::counting);
    EXPECT_THROW(FleetDriver(fleet, [&](const DeviceSpec&) { return std::make_unique<FakeUplink>(server); },
                             {}, {{seconds{1}, "nope", Fault::link_up}}),
                 std::out_of_range);
}
