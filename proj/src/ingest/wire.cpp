// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/wire.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::ingest::wire {

using nlohmann::json;

namespace {

std::uint32_t read_be32(const char* p) {
    const auto* u = reinterpret_cast<const unsigned char*>(p);
    return (std::uint32_t{u[0]} << 24) | (std::uint32_t{u[1]} << 16) | (std::uint32_t{u[2]} << 8) | u[3];
}

json parse_body(const std::string& body) {
    json msg = json::parse(body, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) {
        throw ParseError("frame body is not a JSON object");
    }
    return msg;
}

template <typename T>
T field(const json& msg, const char* name) {
    auto it = msg.find(name);
    if (it == msg.end()) {
        throw ParseError(std::string("missing field ") + name);
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("mistyped field ") + name);
    }
}

std::uint64_t unsigned_field(const json& msg, const char* name) {
    auto it = msg.find(name);
    const bool ok = it != msg.end() && it->is_number_integer() &&
                    (it->is_number_unsigned() || it->get<std::int64_t>() >= 0);
    if (!ok) {
        throw ParseError(std::string("field ") + name + " must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

void write_all(int fd, const char* data, std::size_t n) {
    while (n > 0) {
        const auto w = ::send(fd, data, n, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw LinkError(std::string("send failed: ") + std::strerror(errno));
        }
        data += w;
        n -= static_cast<std::size_t>(w);
    }
}

// False on EOF before any byte was read.
bool read_all(int fd, char* data, std::size_t n, bool eof_ok) {
    std::size_t got = 0;
    while (got < n) {
        const auto r = ::recv(fd, data + got, n - got, 0);
        if (r == 0) {
            if (got == 0 && eof_ok) {
                return false;
            }
            throw LinkError("connection closed mid-frame");
        }
        if (r < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw LinkError(std::string("recv failed: ") + std::strerror(errno));
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

} // namespace

std::string encode_frame(const json& message) {
    const auto body = message.dump();
    if (body.size() > kMaxFrame) {
        throw std::length_error("frame exceeds limit");
    }
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(4 + body.size());
    out += static_cast<char>(n >> 24);
    out += static_cast<char>(n >> 16);
    out += static_cast<char>(n >> 8);
    out += static_cast<char>(n);
    out += body;
    return out;
}

std::optional<json> FrameDecoder::next() {
    if (buffer_.size() < 4) {
        return std::nullopt;
    }
    const auto n = read_be32(buffer_.data());
    if (n > kMaxFrame) {
        throw ParseError("frame length " + std::to_string(n) + " exceeds limit");
    }
    if (buffer_.size() < 4 + n) {
        return std::nullopt;
    }
    auto body = buffer_.substr(4, n);
    buffer_.erase(0, 4 + n);
    return parse_body(body);
}

void write_frame(int fd, const json& message) {
    const auto frame = encode_frame(message);
    write_all(fd, frame.data(), frame.size());
}

std::optional<json> read_frame(int fd) {
    char header[4];
    if (!read_all(fd, header, 4, true)) {
        return std::nullopt;
    }
    const auto n = read_be32(header);
    if (n > kMaxFrame) {
        throw LinkError("frame length " + std::to_string(n) + " exceeds limit");
    }
    std::string body(n, '\0');
    read_all(fd, body.data(), n, false);
    try {
        return parse_body(body);
    } catch (const ParseError& e) {
        throw LinkError(e.what());
    }
}

json report_to_json(const PulseReport& r) {
    return {{"type", "report"},
            {"chip_id", r.chip_id},
            {"seq", r.seq},
            {"pulse_delta", r.pulse_delta},
            {"reported_at", format_timestamp(r.reported_at)},
            {"hostname", r.hostname},
            {"mac", r.mac},
            {"ip", r.ip}};
}

PulseReport report_from_json(const json& msg) {
    PulseReport r;
    r.chip_id = field<std::string>(msg, "chip_id");
    r.seq = unsigned_field(msg, "seq");
    r.pulse_delta = unsigned_field(msg, "pulse_delta");
    r.reported_at = parse_timestamp(field<std::string>(msg, "reported_at"));
    r.hostname = field<std::string>(msg, "hostname");
    r.mac = field<std::string>(msg, "mac");
    r.ip = field<std::string>(msg, "ip");
    return r;
}

json identity_to_json(const DeviceIdentity& id, MeterMode mode) {
    return {{"type", "register"},
            {"chip_id", id.chip_id},
            {"hostname", id.hostname},
            {"mac", id.mac},
            {"ip", id.ip},
            {"meter_mode", std::string(to_string(mode))}};
}

std::pair<DeviceIdentity, MeterMode> identity_from_json(const json& msg) {
    DeviceIdentity id{field<std::string>(msg, "chip_id"), field<std::string>(msg, "hostname"),
                      field<std::string>(msg, "mac"), field<std::string>(msg, "ip")};
    const auto mode = msg.contains("meter_mode") ? parse_meter_mode(field<std::string>(msg, "meter_mode"))
                                                 : MeterMode::prepaid;
    return {std::move(id), mode};
}

json ack_to_json(const Ack& ack) {
    return {{"type", "ack"},
            {"status", std::string(to_string(ack.status))},
            {"reason", std::string(to_string(ack.reason))},
            {"seq", ack.seq},
            {"last_seq", ack.last_seq},
            {"cumulative_pulses", ack.cumulative_pulses}};
}

Ack ack_from_json(const json& msg) {
    if (field<std::string>(msg, "type") != "ack") {
        throw ParseError("expected an ack message");
    }
    Ack ack;
    ack.status = parse_ingest_status(field<std::string>(msg, "status"));
    ack.reason = parse_reject_reason(field<std::string>(msg, "reason"));
    ack.seq = unsigned_field(msg, "seq");
    ack.last_seq = field<std::int64_t>(msg, "last_seq");
    ack.cumulative_pulses = unsigned_field(msg, "cumulative_pulses");
    return ack;
}

json error_message(std::string_view code, std::string_view message) {
    return {{"type", "error"}, {"error", code}, {"message", message}};
}

} // namespace smartmeter::ingest::wire
