// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdlib.h>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "smartmeter/ingest/service.hpp"

namespace testing_support {

using namespace smartmeter;

class TempDir {
public:
    TempDir() {
        auto pattern = (std::filesystem::temp_directory_path() / "smartmeter-XXXXXX").string();
        path_ = ::mkdtemp(pattern.data());
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct ManualClock {
    Timestamp now = parse_timestamp("2019-06-01T00:00:00Z");
    ingest::Clock fn() {
        return [this] { return now; };
    }
};

inline ingest::ServiceConfig test_config(const TempDir& dir) {
    ingest::ServiceConfig cfg;
    cfg.ledger_path = dir / "ledger.bin";
    cfg.snapshot_path = dir / "snapshot.json";
    cfg.snapshot_every = 0;
    cfg.pbkdf2_iterations = 1000;
    return cfg;
}

inline const DeviceIdentity kMeter{"ESP-001", "meter-1", "5c:cf:7f:00:00:01", "192.168.0.17"};
inline const DeviceIdentity kOtherMeter{"ESP-002", "meter-2", "5c:cf:7f:00:00:02", "192.168.0.18"};

inline PulseReport report(const std::string& chip, std::uint64_t seq, std::uint64_t delta,
                          Timestamp at = parse_timestamp("2019-06-01T06:00:00Z")) {
    return {chip, seq, delta, at, "meter-1", "5c:cf:7f:00:00:01", "192.168.0.17"};
}

inline constexpr std::uint64_t kWeekPulses[] = {14208, 15600, 15336, 16440, 13944, 14664, 16200};

/// Batches of 10 (remainder in a final short batch), 20 s apart from 06:00
/// each day, starting at seq `first_seq`.
inline std::vector<PulseReport> week_reports(const std::string& chip, std::uint64_t first_seq = 0) {
    using namespace std::chrono;
    std::vector<PulseReport> out;
    std::uint64_t seq = first_seq;
    const auto start = parse_date("2019-06-01");
    for (int d = 0; d < 7; ++d) {
        auto t = Timestamp{start + days{d}} + hours{6};
        std::uint64_t left = kWeekPulses[d];
        while (left > 0) {
            const auto delta = std::min<std::uint64_t>(10, left);
            out.push_back(report(chip, seq++, delta, t));
            left -= delta;
            t += seconds{20};
        }
    }
    return out;
}

} // namespace testing_support
