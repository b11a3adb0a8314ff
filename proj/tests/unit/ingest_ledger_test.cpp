// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>

#include "ingest_fixtures.hpp"
#include "smartmeter/ingest/errors.hpp"
#include "smartmeter/ingest/ledger.hpp"
#include "smartmeter/ingest/snapshot.hpp"
#include "smartmeter/ingest/state.hpp"

using namespace smartmeter;
using namespace smartmeter::ingest;
using namespace testing_support;
using core::Money;

namespace {

const Timestamp kT0 = parse_timestamp("2019-06-01T00:00:00Z");

std::vector<LedgerEvent> sample_events() {
    Salt salt{};
    salt.fill(7);
    Digest digest{};
    digest.fill(9);
    return {
        DeviceRegistered{kMeter, MeterMode::prepaid},
        PulsesAccepted{report("ESP-001", 0, 10)},
        UserRegistered{"alice", salt, digest, 1000, "ESP-001"},
        Recharged{"alice", Money::parse("250.00")},
        AlertFired{"alice", 1, Money::parse("250.00"), Money::parse("217.14")},
        AlertAcknowledged{"alice", 1},
    };
}

void append_all(Ledger& ledger, const std::vector<LedgerEvent>& events) {
    for (const auto& e : events) {
        ledger.append(kT0, e);
    }
}

} // namespace

TEST(LedgerRecord, RoundTripsEveryKind) {
    std::uint64_t offset = 0;
    for (const auto& event : sample_events()) {
        const LedgerEntry entry{offset++, kT0 + std::chrono::seconds{5}, event};
        const auto bytes = encode_record(entry);
        EXPECT_EQ(decode_record(bytes), entry);
    }
}

TEST(LedgerRecord, ChecksumCatchesAnyFlippedByte) {
    const LedgerEntry entry{3, kT0, PulsesAccepted{report("ESP-001", 4, 10)}};
    const auto clean = encode_record(entry);
    for (std::size_t i = 0; i < kRecordSize; i += 17) {
        auto bytes = clean;
        bytes[i] ^= 0x40;
        EXPECT_THROW(decode_record(bytes), LedgerCorrupt) << "byte " << i;
    }
}

TEST(LedgerRecord, OverlongFieldIsRejectedBeforeWriting) {
    auto r = report(std::string(kMaxChipId + 1, 'x'), 0, 10);
    EXPECT_THROW(encode_record({0, kT0, PulsesAccepted{r}}), ValidationError);
}

TEST(Ledger, ReopenRecoversEntriesInOrder) {
    TempDir dir;
    const auto events = sample_events();
    {
        Ledger ledger(dir / "l.bin");
        append_all(ledger, events);
        EXPECT_EQ(ledger.next_offset(), events.size());
    }
    Ledger reopened(dir / "l.bin");
    ASSERT_EQ(reopened.recovered().size(), events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        EXPECT_EQ(reopened.recovered()[i].offset, i);
        EXPECT_EQ(reopened.recovered()[i].event, events[i]);
    }
    EXPECT_EQ(reopened.recovered_tail_bytes(), 0u);
}

TEST(Ledger, TornTailIsTruncatedAndAppendsContinue) {
    TempDir dir;
    const auto path = dir / "l.bin";
    {
        Ledger ledger(path);
        append_all(ledger, sample_events());
    }
    // Half of a seventh record, as left by a crash mid-write.
    const auto half = encode_record({6, kT0, PulsesAccepted{report("ESP-001", 1, 10)}});
    {
        std::ofstream out(path, std::ios::binary | std::ios::app);
        out.write(reinterpret_cast<const char*>(half.data()), 100);
    }
    EXPECT_EQ(scan_ledger(path).trailing_bytes, 100u);

    Ledger ledger(path);
    EXPECT_EQ(ledger.recovered().size(), 6u);
    EXPECT_EQ(ledger.recovered_tail_bytes(), 100u);
    EXPECT_EQ(std::filesystem::file_size(path), 6 * kRecordSize);
    const auto next = ledger.append(kT0, PulsesAccepted{report("ESP-001", 1, 10)});
    EXPECT_EQ(next.offset, 6u);
    EXPECT_EQ(scan_ledger(path).entries.size(), 7u);
}

TEST(Ledger, ScanStopsAtCorruptRecord) {
    TempDir dir;
    const auto path = dir / "l.bin";
    {
        Ledger ledger(path);
        append_all(ledger, sample_events());
    }
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(2 * kRecordSize + 40);
        f.put('\x7f');
    }
    const auto scan = scan_ledger(path);
    EXPECT_EQ(scan.entries.size(), 2u);
    EXPECT_EQ(scan.trailing_bytes, 4 * kRecordSize);
}

TEST(ServiceState, FoldBuildsDeviceAndAccount) {
    const auto events = sample_events();
    std::vector<LedgerEntry> entries;
    for (std::size_t i = 0; i < events.size(); ++i) {
        entries.push_back({i, kT0, events[i]});
    }
    const auto state = replay(entries);
    const auto* dev = state.device("ESP-001");
    ASSERT_NE(dev, nullptr);
    EXPECT_EQ(dev->cumulative_pulses.count, 10u);
    EXPECT_EQ(dev->last_seq, 0);
    EXPECT_EQ(dev->owner_user, "alice");
    const auto* u = state.user("alice");
    ASSERT_NE(u, nullptr);
    EXPECT_EQ(u->prepaid_balance, Money::parse("250.00"));
    EXPECT_EQ(u->cycle, 1u);
    EXPECT_EQ(u->alert_state, AlertState::fired);
    ASSERT_EQ(u->notifications.size(), 1u);
    EXPECT_TRUE(u->notifications[0].acknowledged);
    EXPECT_EQ(u->baseline_pulses.at("ESP-001"), 10u);
}

TEST(ServiceState, RejectsContradictoryEntries) {
    ServiceState s;
    EXPECT_THROW(s.apply({0, kT0, PulsesAccepted{report("ESP-001", 0, 10)}}), LedgerCorrupt);
    s.apply({0, kT0, DeviceRegistered{kMeter, MeterMode::prepaid}});
    EXPECT_THROW(s.apply({1, kT0, PulsesAccepted{report("ESP-001", 1, 10)}}), LedgerCorrupt);
    EXPECT_THROW(s.apply({5, kT0, PulsesAccepted{report("ESP-001", 0, 10)}}), LedgerCorrupt);
    EXPECT_THROW(s.apply({1, kT0, DeviceRegistered{kMeter, MeterMode::prepaid}}), LedgerCorrupt);
    EXPECT_THROW(s.apply({1, kT0, AlertFired{"nobody", 0, Money{}, Money{}}}), LedgerCorrupt);
}

TEST(Snapshot, RoundTripsFullState) {
    TempDir dir;
    const auto events = sample_events();
    std::vector<LedgerEntry> entries;
    for (std::size_t i = 0; i < events.size(); ++i) {
        entries.push_back({i, kT0 + std::chrono::milliseconds{i}, events[i]});
    }
    const auto state = replay(entries);
    write_snapshot(dir / "s.json", state);
    const auto loaded = read_snapshot(dir / "s.json");
    ASSERT_TRUE(loaded.has_value());
    EXPECT_EQ(*loaded, state);
}

TEST(Snapshot, UnreadableFileIsIgnored) {
    TempDir dir;
    EXPECT_FALSE(read_snapshot(dir / "missing.json").has_value());
    std::ofstream(dir / "bad.json") << "{not json";
    EXPECT_FALSE(read_snapshot(dir / "bad.json").has_value());
}
