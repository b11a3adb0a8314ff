// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "smartmeter/core/protocol.hpp"

// In-memory stand-in for the ingest service with the same sequence contract.
struct FakeServer {
    struct Record {
        std::uint64_t cumulative = 0;
        std::int64_t last_seq = -1;
    };
    std::map<std::string, Record> records;
    std::vector<smartmeter::PulseReport> accepted;
    bool down = false;
    // Store the next report, then fail before the ack gets back.
    bool lose_next_ack = false;
    int sends = 0;
};

class FakeUplink : public smartmeter::Uplink {
public:
    explicit FakeUplink(FakeServer& server) : server_(server) {}

    bool register_device(const smartmeter::DeviceIdentity& identity, smartmeter::MeterMode) override {
        check();
        return server_.records.emplace(identity.chip_id, FakeServer::Record{}).second;
    }

    std::optional<smartmeter::ResumePoint> last_count(const std::string& chip_id) override {
        check();
        auto it = server_.records.find(chip_id);
        if (it == server_.records.end()) {
            return std::nullopt;
        }
        return smartmeter::ResumePoint{it->second.cumulative, it->second.last_seq};
    }

    smartmeter::Ack send(const smartmeter::PulseReport& report) override {
        using namespace smartmeter;
        check();
        ++server_.sends;
        auto it = server_.records.find(report.chip_id);
        if (it == server_.records.end()) {
            return Ack{IngestStatus::reject, RejectReason::unknown_device, report.seq, -1, 0};
        }
        auto& rec = it->second;
        const auto seq = static_cast<std::int64_t>(report.seq);
        Ack ack{IngestStatus::accept, RejectReason::none, report.seq, rec.last_seq, rec.cumulative};
        if (seq <= rec.last_seq) {
            ack.status = IngestStatus::duplicate;
        } else if (seq > rec.last_seq + 1) {
            ack.status = IngestStatus::reject;
            ack.reason = RejectReason::sequence_gap;
        } else {
            rec.last_seq = seq;
            rec.cumulative += report.pulse_delta;
            server_.accepted.push_back(report);
            ack.last_seq = rec.last_seq;
            ack.cumulative_pulses = rec.cumulative;
        }
        if (server_.lose_next_ack) {
            server_.lose_next_ack = false;
            throw LinkError("ack lost");
        }
        return ack;
    }

private:
    void check() const {
        if (server_.down) {
            throw smartmeter::LinkError("server unreachable");
        }
    }

    FakeServer& server_;
};
