// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "smartmeter/ingest/service.hpp"

namespace smartmeter::ingest {

/// Terminates the framed device protocol (see wire.hpp) with one thread per
/// connection. The service serializes the actual commits.
class DeviceServer {
public:
    /// Binds and listens immediately; port 0 picks an ephemeral port.
    DeviceServer(IngestService& service, const std::string& bind_address, std::uint16_t port);
    ~DeviceServer();
    DeviceServer(const DeviceServer&) = delete;
    DeviceServer& operator=(const DeviceServer&) = delete;

    std::uint16_t port() const { return port_; }

    void start();
    /// Closes the listener and every open connection, then joins all threads.
    void stop();

    std::uint64_t connections_accepted() const { return accepted_.load(); }

private:
    struct Connection {
        int fd = -1;
        std::thread thread;
        std::atomic<bool> done{false};
    };

    void accept_loop();
    void serve(Connection& conn);
    void reap_finished();

    IngestService& service_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<std::uint64_t> accepted_{0};
    std::thread acceptor_;
    std::mutex conns_mu_;
    std::list<std::unique_ptr<Connection>> conns_;
};

/// Answers one decoded request. Exposed for protocol tests.
nlohmann::json handle_device_message(IngestService& service, const nlohmann::json& request);

} // namespace smartmeter::ingest
