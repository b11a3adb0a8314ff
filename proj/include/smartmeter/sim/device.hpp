// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smartmeter/core/protocol.hpp"
#include "smartmeter/sim/load_profile.hpp"

namespace smartmeter::sim {

enum class FirmwareState { unprovisioned, provisioned, connecting, syncing, counting, offline };

std::string_view to_string(FirmwareState state);
FirmwareState parse_firmware_state(std::string_view text);

enum class Fault { link_down, link_up, power_cycle };

std::string_view to_string(Fault fault);
Fault parse_fault(std::string_view text);

struct WifiNetwork {
    std::string ssid;
    std::string credential;

    bool operator==(const WifiNetwork&) const = default;
};

class InvalidTransition : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct DeviceOptions {
    std::uint64_t batch_size = 10;
    /// A partial batch ships once its oldest pulse is this old.
    Duration max_latency{120'000};
    /// Offline buffer cap with drop-oldest; nullopt keeps every pulse.
    std::optional<std::size_t> buffer_capacity;
    Duration backoff_initial{1'000};
    Duration backoff_max{60'000};
};

enum class EventKind { pulse, report, state_change, dropped_pulse };

struct DeviceEvent {
    EventKind kind;
    Timestamp at;
    std::optional<PulseReport> report;  // report events
    std::optional<Ack> ack;             // report events
    FirmwareState state = FirmwareState::unprovisioned;  // state_change events
};

/// Simulator-side accounting; survives power cycles.
struct DeviceStats {
    std::uint64_t crossings = 0;     // whole-Wh crossings of the load profile
    std::uint64_t acked_pulses = 0;  // pulses the server confirmed holding
    std::uint64_t dropped_pulses = 0;
    std::uint64_t reports_accepted = 0;
    std::uint64_t reports_duplicate = 0;
    std::uint64_t reports_rejected = 0;
    std::uint64_t link_errors = 0;
};

/// One meter-mounted device: optical pulse pickup, network bring-up, cloud
/// resume and batched upload.
///
/// Pending pulses and the report in flight live in the device's non-volatile
/// outbox and survive power cycles; the running count and next sequence
/// number are volatile and are rebuilt from the server on every sync.
class Device {
public:
    Device(DeviceIdentity identity, LoadProfile profile, Timestamp epoch,
           DeviceOptions options = {}, FirmwareState initial = FirmwareState::provisioned,
           std::optional<WifiNetwork> saved_network = std::nullopt);

    const DeviceIdentity& identity() const { return identity_; }
    FirmwareState state() const { return state_; }
    const std::optional<WifiNetwork>& saved_network() const { return saved_network_; }
    std::uint64_t local_count() const { return local_count_; }
    std::uint64_t next_seq() const { return next_seq_; }
    std::size_t unsent() const { return pending_.size(); }
    bool link_available() const { return link_available_; }
    const std::optional<PulseReport>& in_flight() const { return in_flight_; }
    const DeviceStats& stats() const { return stats_; }
    Timestamp now() const { return epoch_ + elapsed_; }
    Duration elapsed() const { return elapsed_; }

    /// Saves the network. Allowed from unprovisioned or provisioned only.
    void provision(std::string ssid, std::string credential);

    /// Brings a provisioned device with a saved network (or an offline one
    /// whose link is up) through connecting and syncing to counting.
    std::vector<DeviceEvent> boot(Uplink& uplink);

    /// Asks the server where counting resumes. Requires connecting.
    std::vector<DeviceEvent> sync_with_cloud(Uplink& uplink);

    /// Advances the simulated clock by dt, emitting pulses and reports.
    std::vector<DeviceEvent> step(Duration dt, Uplink& uplink);

    std::vector<DeviceEvent> inject_fault(Fault fault, Uplink& uplink);

    /// Ships every pending pulse, partial batches included.
    std::vector<DeviceEvent> flush_all(Uplink& uplink);

private:
    void set_state(FirmwareState next, std::vector<DeviceEvent>& events);
    void on_pulse(Timestamp at, std::vector<DeviceEvent>& events);
    void go_offline(std::vector<DeviceEvent>& events);
    void try_connect(Uplink& uplink, std::vector<DeviceEvent>& events);
    void flush(Uplink& uplink, bool include_partial, std::vector<DeviceEvent>& events);
    void settle(std::uint64_t delta);
    std::optional<Duration> next_pulse_at() const;
    std::optional<Duration> flush_deadline() const;

    DeviceIdentity identity_;
    LoadProfile profile_;
    Timestamp epoch_;
    DeviceOptions options_;

    FirmwareState state_;
    std::optional<WifiNetwork> saved_network_;
    bool link_available_ = true;

    // Volatile.
    std::uint64_t local_count_ = 0;
    std::uint64_t next_seq_ = 0;
    std::optional<Duration> retry_at_;
    Duration backoff_{0};

    // Non-volatile outbox.
    std::deque<Timestamp> pending_;
    std::optional<PulseReport> in_flight_;

    Duration elapsed_{0};
    DeviceStats stats_;
};

} // namespace smartmeter::sim
