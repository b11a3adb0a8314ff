// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "smartmeter/core/protocol.hpp"

// Device protocol: each message is a 4-byte big-endian length followed by a
// JSON object of that many bytes. The "type" member selects the message:
//   register   -> register_result {created}
//   last_count -> last_count_result {found, cumulative_pulses, last_seq}
//   report     -> ack {status, reason, seq, last_seq, cumulative_pulses}
// Any request may instead be answered by error {error, message}.
namespace smartmeter::ingest::wire {

inline constexpr std::size_t kMaxFrame = 64 * 1024;

std::string encode_frame(const nlohmann::json& message);

/// Incremental frame splitter for a byte stream.
class FrameDecoder {
public:
    void feed(const char* data, std::size_t n) { buffer_.append(data, n); }
    /// Next complete message, if any. Throws ParseError on an oversized
    /// length prefix or a body that is not a JSON object.
    std::optional<nlohmann::json> next();
    bool idle() const { return buffer_.empty(); }

private:
    std::string buffer_;
};

/// Blocking helpers over a connected socket. Throw LinkError on I/O failure.
void write_frame(int fd, const nlohmann::json& message);
/// nullopt on orderly close before the first byte of a frame.
std::optional<nlohmann::json> read_frame(int fd);

nlohmann::json report_to_json(const PulseReport& report);
/// Throws ParseError on missing or mistyped fields.
PulseReport report_from_json(const nlohmann::json& msg);

nlohmann::json identity_to_json(const DeviceIdentity& identity, MeterMode mode);
std::pair<DeviceIdentity, MeterMode> identity_from_json(const nlohmann::json& msg);

nlohmann::json ack_to_json(const Ack& ack);
Ack ack_from_json(const nlohmann::json& msg);

nlohmann::json error_message(std::string_view code, std::string_view message);

} // namespace smartmeter::ingest::wire
