// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smartmeter/core/model.hpp"
#include "smartmeter/core/money.hpp"

namespace smartmeter::ingest {

// Field capacities of the fixed record layout (bytes, excluding the NUL pad).
inline constexpr std::size_t kMaxChipId = 31;
inline constexpr std::size_t kMaxHostname = 63;
inline constexpr std::size_t kMaxUserId = 31;

using Salt = std::array<std::uint8_t, 16>;
using Digest = std::array<std::uint8_t, 32>;

struct DeviceRegistered {
    DeviceIdentity identity;
    MeterMode mode = MeterMode::prepaid;
    bool operator==(const DeviceRegistered&) const = default;
};

struct PulsesAccepted {
    PulseReport report;
    bool operator==(const PulsesAccepted&) const = default;
};

struct UserRegistered {
    std::string user_id;
    Salt salt{};
    Digest digest{};
    std::uint32_t iterations = 0;
    std::string chip_id;
    bool operator==(const UserRegistered&) const = default;
};

struct Recharged {
    std::string user_id;
    core::Money amount;
    bool operator==(const Recharged&) const = default;
};

struct AlertFired {
    std::string user_id;
    std::uint64_t cycle = 0;
    core::Money balance;
    core::Money consumed_cost;
    bool operator==(const AlertFired&) const = default;
};

struct AlertAcknowledged {
    std::string user_id;
    std::uint64_t cycle = 0;
    bool operator==(const AlertAcknowledged&) const = default;
};

using LedgerEvent = std::variant<DeviceRegistered, PulsesAccepted, UserRegistered, Recharged, AlertFired,
                                 AlertAcknowledged>;

struct LedgerEntry {
    std::uint64_t offset = 0;
    Timestamp accepted_at{};
    LedgerEvent event;

    bool operator==(const LedgerEntry&) const = default;
};

/// On-disk record size. Layout (little-endian):
///   [0,4) magic "SMLG"  [4,6) version  [6,8) kind  [8,16) offset
///   [16,24) accepted_at ms  [24,248) payload  [248,252) zero  [252,256) crc32
inline constexpr std::size_t kRecordSize = 256;

std::array<std::uint8_t, kRecordSize> encode_record(const LedgerEntry& entry);
/// Throws LedgerCorrupt on a bad magic, version, kind or checksum.
LedgerEntry decode_record(std::span<const std::uint8_t, kRecordSize> bytes);

struct LedgerScan {
    std::vector<LedgerEntry> entries;
    /// Bytes after the last valid record (torn or corrupt tail).
    std::uint64_t trailing_bytes = 0;
};

/// Reads every valid record from the start of the file, stopping at the
/// first truncated, corrupt or out-of-order one. Never modifies the file.
LedgerScan scan_ledger(const std::filesystem::path& path);

/// Append-only, checksummed ledger file. Not thread-safe; the owner
/// serializes appends.
class Ledger {
public:
    /// Opens or creates the file, truncating any torn tail left by a crash.
    explicit Ledger(std::filesystem::path path, bool sync_each_append = false);
    ~Ledger();
    Ledger(const Ledger&) = delete;
    Ledger& operator=(const Ledger&) = delete;

    const std::filesystem::path& path() const { return path_; }

    /// Entries found at open time.
    const std::vector<LedgerEntry>& recovered() const { return recovered_; }
    std::uint64_t recovered_tail_bytes() const { return recovered_tail_; }

    std::uint64_t next_offset() const { return next_offset_; }

    /// Assigns the next offset, writes the record and returns the entry.
    LedgerEntry append(Timestamp accepted_at, LedgerEvent event);

private:
    std::filesystem::path path_;
    bool sync_;
    int fd_ = -1;
    std::uint64_t next_offset_ = 0;
    std::vector<LedgerEntry> recovered_;
    std::uint64_t recovered_tail_ = 0;
};

} // namespace smartmeter::ingest
