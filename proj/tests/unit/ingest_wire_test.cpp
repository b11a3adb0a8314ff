// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "ingest_fixtures.hpp"
#include "smartmeter/core/errors.hpp"
#include "smartmeter/ingest/device_server.hpp"
#include "smartmeter/ingest/wire.hpp"

using namespace smartmeter;
using namespace smartmeter::ingest;
using namespace testing_support;
using nlohmann::json;

TEST(WireFrame, LengthPrefixIsBigEndian) {
    const auto frame = wire::encode_frame(json{{"a", 1}});
    const std::string body = R"({"a":1})";
    ASSERT_EQ(frame.size(), 4 + body.size());
    EXPECT_EQ(frame.substr(0, 4), std::string("\0\0\0\x07", 4));
    EXPECT_EQ(frame.substr(4), body);
}

TEST(WireFrame, DecoderHandlesSplitAndCoalescedFrames) {
    const auto a = wire::encode_frame(json{{"type", "x"}});
    const auto b = wire::encode_frame(json{{"type", "y"}});
    const auto stream = a + b;
    wire::FrameDecoder dec;
    dec.feed(stream.data(), 3);
    EXPECT_FALSE(dec.next().has_value());
    dec.feed(stream.data() + 3, stream.size() - 3);
    EXPECT_EQ(dec.next()->at("type"), "x");
    EXPECT_EQ(dec.next()->at("type"), "y");
    EXPECT_FALSE(dec.next().has_value());
    EXPECT_TRUE(dec.idle());
}

TEST(WireFrame, DecoderRejectsOversizeAndNonObjects) {
    wire::FrameDecoder big;
    const char header[] = {'\x7f', '\0', '\0', '\0'};
    big.feed(header, 4);
    EXPECT_THROW(big.next(), ParseError);

    wire::FrameDecoder arr;
    const auto frame = wire::encode_frame(json::array({1, 2}));
    arr.feed(frame.data(), frame.size());
    EXPECT_THROW(arr.next(), ParseError);
}

TEST(WireCodec, ReportRoundTripUsesDomainFieldNames) {
    const auto r = report("ESP-001", 41, 10, parse_timestamp("2019-06-01T06:00:20Z"));
    const auto msg = wire::report_to_json(r);
    for (const auto* key : {"chip_id", "seq", "pulse_delta", "reported_at", "hostname", "mac", "ip"}) {
        EXPECT_TRUE(msg.contains(key)) << key;
    }
    EXPECT_EQ(msg.at("reported_at"), "2019-06-01T06:00:20.000Z");
    EXPECT_EQ(wire::report_from_json(msg), r);
}

TEST(WireCodec, ReportFieldErrors) {
    auto msg = wire::report_to_json(report("ESP-001", 0, 10));
    msg.erase("pulse_delta");
    EXPECT_THROW(wire::report_from_json(msg), ParseError);
    msg = wire::report_to_json(report("ESP-001", 0, 10));
    msg["seq"] = -1;
    EXPECT_THROW(wire::report_from_json(msg), ParseError);
    msg["seq"] = "7";
    EXPECT_THROW(wire::report_from_json(msg), ParseError);
    msg = wire::report_to_json(report("ESP-001", 0, 10));
    msg["reported_at"] = "yesterday";
    EXPECT_THROW(wire::report_from_json(msg), ParseError);
}

TEST(WireCodec, AckRoundTrip) {
    const Ack ack{IngestStatus::reject, RejectReason::sequence_gap, 9, 4, 50};
    const auto msg = wire::ack_to_json(ack);
    EXPECT_EQ(msg.at("status"), "reject");
    EXPECT_EQ(msg.at("reason"), "sequence_gap");
    EXPECT_EQ(wire::ack_from_json(msg), ack);
}

TEST(DeviceMessages, DispatchByType) {
    TempDir dir;
    IngestService service(test_config(dir));
    auto reply = handle_device_message(service, wire::identity_to_json(kMeter, MeterMode::postpaid));
    EXPECT_EQ(reply.at("type"), "register_result");
    EXPECT_TRUE(reply.at("created").get<bool>());
    reply = handle_device_message(service, wire::identity_to_json(kMeter, MeterMode::postpaid));
    EXPECT_FALSE(reply.at("created").get<bool>());
    EXPECT_EQ(service.device("ESP-001")->meter_mode, MeterMode::postpaid);

    reply = handle_device_message(service, {{"type", "last_count"}, {"chip_id", "ESP-009"}});
    EXPECT_FALSE(reply.at("found").get<bool>());

    reply = handle_device_message(service, wire::report_to_json(report("ESP-001", 0, 10)));
    EXPECT_EQ(wire::ack_from_json(reply).status, IngestStatus::accept);

    reply = handle_device_message(service, {{"type", "last_count"}, {"chip_id", "ESP-001"}});
    EXPECT_TRUE(reply.at("found").get<bool>());
    EXPECT_EQ(reply.at("cumulative_pulses"), 10);
    EXPECT_EQ(reply.at("last_seq"), 0);

    reply = handle_device_message(service, {{"type", "report"}, {"seq", 3}});
    EXPECT_EQ(wire::ack_from_json(reply).reason, RejectReason::invalid_report);
    EXPECT_EQ(reply.at("seq"), 3);

    reply = handle_device_message(service, {{"type", "reboot"}});
    EXPECT_EQ(reply.at("type"), "error");

    auto bad = wire::identity_to_json(kOtherMeter, MeterMode::prepaid);
    bad["mac"] = "zz";
    reply = handle_device_message(service, bad);
    EXPECT_EQ(reply.at("error"), "invalid_request");
}
