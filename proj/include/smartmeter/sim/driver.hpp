// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <vector>

#include "smartmeter/sim/fleet.hpp"

namespace smartmeter::sim {

using UplinkFactory = std::function<std::unique_ptr<Uplink>(const DeviceSpec&)>;

struct DriverOptions {
    Duration tick{1'000};
    /// Simulated seconds per wall second; 0 runs unpaced.
    double acceleration = 1000.0;
};

struct DeviceSummary {
    std::string chip_id;
    std::uint64_t crossings = 0;
    std::uint64_t acked = 0;
    std::uint64_t buffered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t reports_accepted = 0;
    std::uint64_t reports_duplicate = 0;
    std::uint64_t local_count = 0;
    FirmwareState state = FirmwareState::unprovisioned;

    /// crossings = acked + buffered + dropped
    bool conserved() const { return crossings == acked + buffered + dropped; }
};

/// Advances every device of a fleet on one simulated clock, applying faults
/// at their scheduled instants and pacing against the wall clock.
class FleetDriver {
public:
    FleetDriver(FleetDefinition fleet, UplinkFactory factory, DriverOptions options = {},
                std::vector<FaultEvent> faults = {});

    /// Registers every device with the service; existing registrations are fine.
    void register_all();

    /// Runs `span` of simulated time. `on_tick` sees the elapsed time after
    /// each tick.
    void run_for(Duration span, const std::function<void(Duration)>& on_tick = {});

    /// Final flush of partial batches.
    void shutdown();

    Duration elapsed() const { return elapsed_; }
    Timestamp now() const { return fleet_.start + elapsed_; }
    std::vector<Device>& devices() { return devices_; }
    Device& device(const std::string& chip_id);
    Uplink& uplink(const std::string& chip_id);
    std::vector<DeviceSummary> summaries() const;

    /// Observer for every device event.
    std::function<void(const Device&, const DeviceEvent&)> on_event;

private:
    void apply_due_faults();
    void dispatch(const Device& device, const std::vector<DeviceEvent>& events);

    FleetDefinition fleet_;
    DriverOptions options_;
    std::vector<FaultEvent> faults_;
    std::size_t next_fault_ = 0;
    std::vector<Device> devices_;
    std::vector<std::unique_ptr<Uplink>> uplinks_;
    Duration elapsed_{0};
    std::chrono::steady_clock::time_point wall_origin_;
    Duration sim_origin_{0};
    bool paced_started_ = false;
};

} // namespace smartmeter::sim
