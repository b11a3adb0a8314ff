// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "smartmeter/core/model.hpp"

namespace smartmeter {

enum class IngestStatus { accept, duplicate, reject };

enum class RejectReason { none, sequence_gap, unknown_device, invalid_report };

std::string_view to_string(IngestStatus status);
std::string_view to_string(RejectReason reason);
IngestStatus parse_ingest_status(std::string_view text);
RejectReason parse_reject_reason(std::string_view text);

/// Server answer to one PulseReport.
struct Ack {
    IngestStatus status = IngestStatus::reject;
    RejectReason reason = RejectReason::none;
    std::uint64_t seq = 0;             // seq of the report being acknowledged
    std::int64_t last_seq = -1;        // server's last accepted seq after processing
    std::uint64_t cumulative_pulses = 0;

    bool operator==(const Ack&) const = default;
};

/// What the server remembers about a device: where counting resumes.
struct ResumePoint {
    std::uint64_t cumulative_pulses = 0;
    std::int64_t last_seq = -1;

    bool operator==(const ResumePoint&) const = default;
};

/// The server could not be reached or the connection broke mid-exchange.
class LinkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Device-side view of the ingest service. Every call may throw LinkError.
class Uplink {
public:
    virtual ~Uplink() = default;

    /// True when newly registered, false when the chip ID already existed.
    virtual bool register_device(const DeviceIdentity& identity, MeterMode mode) = 0;
    /// nullopt when the server has no record for the chip.
    virtual std::optional<ResumePoint> last_count(const std::string& chip_id) = 0;
    virtual Ack send(const PulseReport& report) = 0;
};

} // namespace smartmeter
