// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/device_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <system_error>

#include "smartmeter/ingest/wire.hpp"

namespace smartmeter::ingest {

using nlohmann::json;

json handle_device_message(IngestService& service, const json& request) {
    const auto type = request.value("type", std::string{});
    try {
        if (type == "report") {
            PulseReport report;
            try {
                report = wire::report_from_json(request);
            } catch (const Error&) {
                Ack ack{IngestStatus::reject, RejectReason::invalid_report, 0, -1, 0};
                if (auto it = request.find("seq"); it != request.end() && it->is_number_integer() && it->get<std::int64_t>() >= 0) {
                    ack.seq = it->get<std::uint64_t>();
                }
                return wire::ack_to_json(ack);
            }
            return wire::ack_to_json(service.ingest(report));
        }
        if (type == "last_count") {
            const auto chip = request.at("chip_id").get<std::string>();
            const auto point = service.resume_point(chip);
            return {{"type", "last_count_result"},
                    {"found", point.has_value()},
                    {"cumulative_pulses", point ? point->cumulative_pulses : 0},
                    {"last_seq", point ? point->last_seq : -1}};
        }
        if (type == "register") {
            const auto [identity, mode] = wire::identity_from_json(request);
            try {
                service.register_device(identity, mode);
                return {{"type", "register_result"}, {"created", true}};
            } catch (const DuplicateChipId&) {
                return {{"type", "register_result"}, {"created", false}};
            }
        }
        return wire::error_message("unknown_type", "unknown message type '" + type + "'");
    } catch (const ValidationError& e) {
        return wire::error_message("invalid_request", e.what());
    } catch (const ParseError& e) {
        return wire::error_message("invalid_request", e.what());
    } catch (const json::exception& e) {
        return wire::error_message("invalid_request", e.what());
    }
}

DeviceServer::DeviceServer(IngestService& service, const std::string& bind_address, std::uint16_t port)
    : service_(service) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listen_fd_ < 0) {
        throw std::system_error(errno, std::generic_category(), "device socket");
    }
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw std::invalid_argument("bind address must be an IPv4 literal: " + bind_address);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(listen_fd_, 64) != 0) {
        const std::system_error err(errno, std::generic_category(),
                                    "listen on " + bind_address + ":" + std::to_string(port));
        ::close(listen_fd_);
        throw err;
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

DeviceServer::~DeviceServer() {
    stop();
}

void DeviceServer::start() {
    acceptor_ = std::thread([this] { accept_loop(); });
}

void DeviceServer::stop() {
    if (stopping_.exchange(true)) {
        return;
    }
    if (acceptor_.joinable()) {
        acceptor_.join();
    }
    ::close(listen_fd_);
    std::list<std::unique_ptr<Connection>> conns;
    {
        std::lock_guard lk(conns_mu_);
        for (auto& c : conns_) {
            if (c->fd >= 0) {
                ::shutdown(c->fd, SHUT_RDWR);
            }
        }
        conns.swap(conns_);
    }
    for (auto& c : conns) {
        c->thread.join();
    }
}

void DeviceServer::reap_finished() {
    std::list<std::unique_ptr<Connection>> finished;
    {
        std::lock_guard lk(conns_mu_);
        for (auto it = conns_.begin(); it != conns_.end();) {
            if ((*it)->done.load()) {
                finished.push_back(std::move(*it));
                it = conns_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& c : finished) {
        c->thread.join();
    }
}

void DeviceServer::accept_loop() {
    while (!stopping_.load()) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 100);
        reap_finished();
        if (ready <= 0) {
            continue;
        }
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            continue;
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        ++accepted_;
        std::lock_guard lk(conns_mu_);
        auto& conn = conns_.emplace_back(std::make_unique<Connection>());
        conn->fd = fd;
        conn->thread = std::thread([this, c = conn.get()] { serve(*c); });
    }
}

void DeviceServer::serve(Connection& conn) {
    try {
        while (!stopping_.load()) {
            auto request = wire::read_frame(conn.fd);
            if (!request) {
                break;
            }
            wire::write_frame(conn.fd, handle_device_message(service_, *request));
        }
    } catch (const LinkError&) {
        // Peer vanished or sent a malformed frame; drop the connection.
    } catch (const std::exception& e) {
        std::cerr << "device connection aborted: " << e.what() << '\n';
    }
    std::lock_guard lk(conns_mu_);
    ::close(conn.fd);
    conn.fd = -1;
    conn.done.store(true);
}

} // namespace smartmeter::ingest
