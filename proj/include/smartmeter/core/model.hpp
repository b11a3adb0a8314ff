// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "smartmeter/core/time.hpp"

namespace smartmeter {

enum class MeterMode { prepaid, postpaid };

std::string_view to_string(MeterMode mode);
/// Throws ParseError on anything but "prepaid" / "postpaid".
MeterMode parse_meter_mode(std::string_view text);

/// Network identity of a meter-mounted device.
struct DeviceIdentity {
    std::string chip_id;
    std::string hostname;
    std::string mac;  // "aa:bb:cc:dd:ee:ff"
    std::string ip;   // dotted quad

    bool operator==(const DeviceIdentity&) const = default;
};

/// One batch of pulses as sent by a device.
struct PulseReport {
    std::string chip_id;
    std::uint64_t seq = 0;
    std::uint64_t pulse_delta = 0;
    Timestamp reported_at{};
    std::string hostname;
    std::string mac;
    std::string ip;

    bool operator==(const PulseReport&) const = default;
};

bool is_valid_mac(std::string_view mac);
bool is_valid_ipv4(std::string_view ip);

} // namespace smartmeter
