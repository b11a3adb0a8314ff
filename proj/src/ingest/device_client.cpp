// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/device_client.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "smartmeter/ingest/errors.hpp"
#include "smartmeter/ingest/wire.hpp"

namespace smartmeter::ingest {

using nlohmann::json;

namespace {

int connect_with_timeout(const addrinfo& ai, Duration timeout) {
    const int fd = ::socket(ai.ai_family, ai.ai_socktype | SOCK_CLOEXEC, ai.ai_protocol);
    if (fd < 0) {
        return -1;
    }
    const int flags = ::fcntl(fd, F_GETFL);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai.ai_addr, ai.ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
        pollfd pfd{fd, POLLOUT, 0};
        rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
        if (rc == 1) {
            int err = 0;
            socklen_t len = sizeof err;
            ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
            rc = err == 0 ? 0 : -1;
            errno = err;
        } else {
            rc = -1;
            errno = ETIMEDOUT;
        }
    }
    if (rc != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        return -1;
    }
    ::fcntl(fd, F_SETFL, flags);
    return fd;
}

} // namespace

TcpUplink::TcpUplink(std::string host, std::uint16_t port, Duration io_timeout)
    : host_(std::move(host)), port_(port), timeout_(io_timeout) {}

TcpUplink::~TcpUplink() {
    disconnect();
}

void TcpUplink::disconnect() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void TcpUplink::connect() {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port_);
    if (const int rc = ::getaddrinfo(host_.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw LinkError("cannot resolve " + host_ + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    int last_errno = 0;
    for (auto* ai = res; ai != nullptr && fd < 0; ai = ai->ai_next) {
        fd = connect_with_timeout(*ai, timeout_);
        last_errno = errno;
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
        throw LinkError("cannot connect to " + host_ + ":" + service + ": " + std::strerror(last_errno));
    }
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout_.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout_.count() % 1000) * 1000);
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    fd_ = fd;
}

json TcpUplink::exchange(const json& request) {
    if (fd_ < 0) {
        connect();
    }
    try {
        wire::write_frame(fd_, request);
        auto reply = wire::read_frame(fd_);
        if (!reply) {
            throw LinkError("server closed the connection");
        }
        if (reply->value("type", "") == "error") {
            const auto code = reply->value("error", "");
            const auto message = reply->value("message", "");
            if (code == "invalid_request") {
                throw ValidationError(message);
            }
            throw LinkError("server error " + code + ": " + message);
        }
        return *reply;
    } catch (const LinkError&) {
        disconnect();
        throw;
    }
}

bool TcpUplink::register_device(const DeviceIdentity& identity, MeterMode mode) {
    const auto reply = exchange(wire::identity_to_json(identity, mode));
    if (reply.value("type", "") != "register_result") {
        disconnect();
        throw LinkError("unexpected reply to register");
    }
    return reply.value("created", false);
}

std::optional<ResumePoint> TcpUplink::last_count(const std::string& chip_id) {
    const auto reply = exchange({{"type", "last_count"}, {"chip_id", chip_id}});
    if (reply.value("type", "") != "last_count_result") {
        disconnect();
        throw LinkError("unexpected reply to last_count");
    }
    if (!reply.value("found", false)) {
        return std::nullopt;
    }
    return ResumePoint{reply.at("cumulative_pulses").get<std::uint64_t>(),
                       reply.at("last_seq").get<std::int64_t>()};
}

Ack TcpUplink::send(const PulseReport& report) {
    const auto reply = exchange(wire::report_to_json(report));
    try {
        return wire::ack_from_json(reply);
    } catch (const Error& e) {
        disconnect();
        throw LinkError(std::string("malformed ack: ") + e.what());
    }
}

} // namespace smartmeter::ingest
