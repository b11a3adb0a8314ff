// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "smartmeter/core/protocol.hpp"

namespace smartmeter::ingest {

/// Uplink over the framed TCP device protocol. Connects lazily and drops the
/// connection after any failure so the next call reconnects.
class TcpUplink : public Uplink {
public:
    TcpUplink(std::string host, std::uint16_t port, Duration io_timeout = std::chrono::seconds{5});
    ~TcpUplink() override;
    TcpUplink(const TcpUplink&) = delete;
    TcpUplink& operator=(const TcpUplink&) = delete;

    bool register_device(const DeviceIdentity& identity, MeterMode mode) override;
    std::optional<ResumePoint> last_count(const std::string& chip_id) override;
    Ack send(const PulseReport& report) override;

    void disconnect();
    bool connected() const { return fd_ >= 0; }

private:
    nlohmann::json exchange(const nlohmann::json& request);
    void connect();

    std::string host_;
    std::uint16_t port_;
    Duration timeout_;
    int fd_ = -1;
};

} // namespace smartmeter::ingest
