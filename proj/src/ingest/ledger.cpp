// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <system_error>

#include "smartmeter/ingest/errors.hpp"

namespace smartmeter::ingest {

namespace {

constexpr std::uint32_t kMagic = 0x474C4D53;  // "SMLG" little-endian
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kPayloadBegin = 24;
constexpr std::size_t kPayloadEnd = 248;
constexpr std::size_t kCrcAt = 252;

enum class Kind : std::uint16_t {
    device_registered = 1,
    pulses_accepted = 2,
    user_registered = 3,
    recharged = 4,
    alert_fired = 5,
    alert_acknowledged = 6,
};

class Writer {
public:
    explicit Writer(std::array<std::uint8_t, kRecordSize>& buf) : buf_(buf) {}

    void u8(std::uint8_t v) { put(&v, 1); }
    void u16(std::uint16_t v) { uint(v, 2); }
    void u32(std::uint32_t v) { uint(v, 4); }
    void u64(std::uint64_t v) { uint(v, 8); }
    void i64(std::int64_t v) { uint(static_cast<std::uint64_t>(v), 8); }

    void text(const std::string& s, std::size_t field) {
        if (s.size() >= field) {
            throw ValidationError("field value too long: " + s);
        }
        std::array<std::uint8_t, 64> pad{};
        std::memcpy(pad.data(), s.data(), s.size());
        put(pad.data(), field);
    }

    template <std::size_t N>
    void bytes(const std::array<std::uint8_t, N>& a) {
        put(a.data(), N);
    }

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

private:
    void uint(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) {
            std::uint8_t b = static_cast<std::uint8_t>(v >> (8 * i));
            put(&b, 1);
        }
    }
    void put(const void* p, std::size_t n) {
        if (pos_ + n > kRecordSize) {
            throw std::logic_error("ledger record overflow");
        }
        std::memcpy(buf_.data() + pos_, p, n);
        pos_ += n;
    }

    std::array<std::uint8_t, kRecordSize>& buf_;
    std::size_t pos_ = 0;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t, kRecordSize> buf) : buf_(buf) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
    std::uint64_t u64() { return uint(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(uint(8)); }

    std::string text(std::size_t field) {
        const auto* p = reinterpret_cast<const char*>(buf_.data() + pos_);
        pos_ += field;
        const auto len = strnlen(p, field);
        if (len == field) {
            throw LedgerCorrupt("unterminated text field");
        }
        return std::string(p, len);
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> bytes() {
        std::array<std::uint8_t, N> a{};
        std::memcpy(a.data(), buf_.data() + pos_, N);
        pos_ += N;
        return a;
    }

    void seek(std::size_t p) { pos_ = p; }

private:
    std::uint64_t uint(int n) {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) {
            v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
        }
        pos_ += n;
        return v;
    }

    std::span<const std::uint8_t, kRecordSize> buf_;
    std::size_t pos_ = 0;
};

// Text field widths include the terminating NUL.
constexpr std::size_t kChipField = kMaxChipId + 1;
constexpr std::size_t kHostField = kMaxHostname + 1;
constexpr std::size_t kUserField = kMaxUserId + 1;
constexpr std::size_t kMacField = 18;
constexpr std::size_t kIpField = 16;

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
    return static_cast<std::uint32_t>(::crc32(0L, data, static_cast<uInt>(n)));
}

struct EncodeVisitor {
    Writer& w;

    Kind operator()(const DeviceRegistered& e) const {
        w.text(e.identity.chip_id, kChipField);
        w.text(e.identity.hostname, kHostField);
        w.text(e.identity.mac, kMacField);
        w.text(e.identity.ip, kIpField);
        w.u8(e.mode == MeterMode::prepaid ? 0 : 1);
        return Kind::device_registered;
    }
    Kind operator()(const PulsesAccepted& e) const {
        const auto& r = e.report;
        w.text(r.chip_id, kChipField);
        w.u64(r.seq);
        w.u64(r.pulse_delta);
        w.i64(r.reported_at.time_since_epoch().count());
        w.text(r.hostname, kHostField);
        w.text(r.mac, kMacField);
        w.text(r.ip, kIpField);
        return Kind::pulses_accepted;
    }
    Kind operator()(const UserRegistered& e) const {
        w.text(e.user_id, kUserField);
        w.bytes(e.salt);
        w.bytes(e.digest);
        w.u32(e.iterations);
        w.text(e.chip_id, kChipField);
        return Kind::user_registered;
    }
    Kind operator()(const Recharged& e) const {
        w.text(e.user_id, kUserField);
        w.i64(e.amount.paisa());
        return Kind::recharged;
    }
    Kind operator()(const AlertFired& e) const {
        w.text(e.user_id, kUserField);
        w.u64(e.cycle);
        w.i64(e.balance.paisa());
        w.i64(e.consumed_cost.paisa());
        return Kind::alert_fired;
    }
    Kind operator()(const AlertAcknowledged& e) const {
        w.text(e.user_id, kUserField);
        w.u64(e.cycle);
        return Kind::alert_acknowledged;
    }
};

LedgerEvent decode_event(Kind kind, Reader& r) {
    switch (kind) {
    case Kind::device_registered: {
        DeviceRegistered e;
        e.identity.chip_id = r.text(kChipField);
        e.identity.hostname = r.text(kHostField);
        e.identity.mac = r.text(kMacField);
        e.identity.ip = r.text(kIpField);
        e.mode = r.u8() == 0 ? MeterMode::prepaid : MeterMode::postpaid;
        return e;
    }
    case Kind::pulses_accepted: {
        PulsesAccepted e;
        auto& rep = e.report;
        rep.chip_id = r.text(kChipField);
        rep.seq = r.u64();
        rep.pulse_delta = r.u64();
        rep.reported_at = Timestamp{Duration{r.i64()}};
        rep.hostname = r.text(kHostField);
        rep.mac = r.text(kMacField);
        rep.ip = r.text(kIpField);
        return e;
    }
    case Kind::user_registered: {
        UserRegistered e;
        e.user_id = r.text(kUserField);
        e.salt = r.bytes<16>();
        e.digest = r.bytes<32>();
        e.iterations = r.u32();
        e.chip_id = r.text(kChipField);
        return e;
    }
    case Kind::recharged: {
        Recharged e;
        e.user_id = r.text(kUserField);
        e.amount = core::Money::from_paisa(r.i64());
        return e;
    }
    case Kind::alert_fired: {
        AlertFired e;
        e.user_id = r.text(kUserField);
        e.cycle = r.u64();
        e.balance = core::Money::from_paisa(r.i64());
        e.consumed_cost = core::Money::from_paisa(r.i64());
        return e;
    }
    case Kind::alert_acknowledged: {
        AlertAcknowledged e;
        e.user_id = r.text(kUserField);
        e.cycle = r.u64();
        return e;
    }
    }
    throw LedgerCorrupt("unknown record kind");
}

std::system_error sys_error(const std::string& what) {
    return std::system_error(errno, std::generic_category(), what);
}

} // namespace

std::array<std::uint8_t, kRecordSize> encode_record(const LedgerEntry& entry) {
    std::array<std::uint8_t, kRecordSize> buf{};
    Writer w(buf);
    w.seek(kPayloadBegin);
    const Kind kind = std::visit(EncodeVisitor{w}, entry.event);
    if (w.pos() > kPayloadEnd) {
        throw std::logic_error("ledger payload overflow");
    }
    w.seek(0);
    w.u32(kMagic);
    w.u16(kVersion);
    w.u16(static_cast<std::uint16_t>(kind));
    w.u64(entry.offset);
    w.i64(entry.accepted_at.time_since_epoch().count());
    w.seek(kCrcAt);
    w.u32(crc_of(buf.data(), kCrcAt));
    return buf;
}

LedgerEntry decode_record(std::span<const std::uint8_t, kRecordSize> bytes) {
    Reader r(bytes);
    r.seek(kCrcAt);
    if (r.u32() != crc_of(bytes.data(), kCrcAt)) {
        throw LedgerCorrupt("checksum mismatch");
    }
    r.seek(0);
    if (r.u32() != kMagic) {
        throw LedgerCorrupt("bad magic");
    }
    if (r.u16() != kVersion) {
        throw LedgerCorrupt("unsupported record version");
    }
    const auto kind = static_cast<Kind>(r.u16());
    LedgerEntry entry;
    entry.offset = r.u64();
    entry.accepted_at = Timestamp{Duration{r.i64()}};
    r.seek(kPayloadBegin);
    entry.event = decode_event(kind, r);
    return entry;
}

LedgerScan scan_ledger(const std::filesystem::path& path) {
    LedgerScan scan;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return scan;
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    std::array<std::uint8_t, kRecordSize> buf{};
    std::uint64_t good = 0;
    while (in.read(reinterpret_cast<char*>(buf.data()), kRecordSize)) {
        try {
            auto entry = decode_record(std::span<const std::uint8_t, kRecordSize>(buf));
            if (entry.offset != scan.entries.size()) {
                break;
            }
            scan.entries.push_back(std::move(entry));
            good += kRecordSize;
        } catch (const LedgerCorrupt&) {
            break;
        }
    }
    scan.trailing_bytes = size - good;
    return scan;
}

Ledger::Ledger(std::filesystem::path path, bool sync_each_append)
    : path_(std::move(path)), sync_(sync_each_append) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    auto scan = scan_ledger(path_);
    recovered_ = std::move(scan.entries);
    recovered_tail_ = scan.trailing_bytes;
    next_offset_ = recovered_.size();

    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw sys_error("open ledger " + path_.string());
    }
    const auto keep = static_cast<off_t>(next_offset_ * kRecordSize);
    if (recovered_tail_ > 0 && ::ftruncate(fd_, keep) != 0) {
        const auto err = sys_error("truncate ledger tail");
        ::close(fd_);
        throw err;
    }
    if (::lseek(fd_, keep, SEEK_SET) < 0) {
        const auto err = sys_error("seek ledger");
        ::close(fd_);
        throw err;
    }
}

Ledger::~Ledger() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

LedgerEntry Ledger::append(Timestamp accepted_at, LedgerEvent event) {
    LedgerEntry entry{next_offset_, accepted_at, std::move(event)};
    const auto buf = encode_record(entry);
    std::size_t done = 0;
    while (done < buf.size()) {
        const auto n = ::write(fd_, buf.data() + done, buf.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            // Drop the partial record so the file stays a whole number of
            // records. Best effort: a torn tail is also cut on the next open.
            const auto err = sys_error("append ledger record");
            const auto end = static_cast<off_t>(next_offset_ * kRecordSize);
            if (::ftruncate(fd_, end) == 0) {
                ::lseek(fd_, end, SEEK_SET);
            }
            throw err;
        }
        done += static_cast<std::size_t>(n);
    }
    if (sync_ && ::fdatasync(fd_) != 0) {
        throw sys_error("sync ledger");
    }
    ++next_offset_;
    return entry;
}

} // namespace smartmeter::ingest
