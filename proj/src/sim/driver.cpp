// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/sim/driver.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace smartmeter::sim {

FleetDriver::FleetDriver(FleetDefinition fleet, UplinkFactory factory, DriverOptions options,
                         std::vector<FaultEvent> faults)
    : fleet_(std::move(fleet)), options_(options), faults_(std::move(faults)) {
    if (options_.tick.count() <= 0) {
        throw std::invalid_argument("tick must be positive");
    }
    for (const auto& spec : fleet_.devices) {
        auto& device = devices_.emplace_back(spec.identity, spec.profile, fleet_.start,
                                             fleet_.options, spec.start_state, spec.network);
        if (spec.start_state == FirmwareState::unprovisioned && spec.network) {
            device.provision(spec.network->ssid, spec.network->credential);
        }
        uplinks_.push_back(factory(spec));
    }
    for (const auto& f : faults_) {
        (void)device(f.chip_id);
    }
}

Device& FleetDriver::device(const std::string& chip_id) {
    for (auto& d : devices_) {
        if (d.identity().chip_id == chip_id) {
            return d;
        }
    }
    throw std::out_of_range("no device " + chip_id + " in fleet");
}

Uplink& FleetDriver::uplink(const std::string& chip_id) {
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        if (devices_[i].identity().chip_id == chip_id) {
            return *uplinks_[i];
        }
    }
    throw std::out_of_range("no device " + chip_id + " in fleet");
}

void FleetDriver::register_all() {
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        uplinks_[i]->register_device(fleet_.devices[i].identity, fleet_.devices[i].mode);
    }
}

void FleetDriver::dispatch(const Device& device, const std::vector<DeviceEvent>& events) {
    if (on_event) {
        for (const auto& e : events) {
            on_event(device, e);
        }
    }
}

void FleetDriver::apply_due_faults() {
    while (next_fault_ < faults_.size() && faults_[next_fault_].at <= elapsed_) {
        const auto& f = faults_[next_fault_++];
        for (std::size_t i = 0; i < devices_.size(); ++i) {
            if (devices_[i].identity().chip_id == f.chip_id) {
                dispatch(devices_[i], devices_[i].inject_fault(f.fault, *uplinks_[i]));
            }
        }
    }
}

void FleetDriver::run_for(Duration span, const std::function<void(Duration)>& on_tick) {
    const Duration end = elapsed_ + span;
    if (!paced_started_) {
        wall_origin_ = std::chrono::steady_clock::now();
        sim_origin_ = elapsed_;
        paced_started_ = true;
    }
    apply_due_faults();
    while (elapsed_ < end) {
        Duration to = std::min(elapsed_ + options_.tick, end);
        if (next_fault_ < faults_.size()) {
            to = std::min(to, std::max(faults_[next_fault_].at, elapsed_ + Duration{1}));
        }
        const Duration dt = to - elapsed_;
        for (std::size_t i = 0; i < devices_.size(); ++i) {
            dispatch(devices_[i], devices_[i].step(dt, *uplinks_[i]));
        }
        elapsed_ = to;
        apply_due_faults();
        if (on_tick) {
            on_tick(elapsed_);
        }
        if (options_.acceleration > 0) {
            const auto sim_ms = static_cast<double>((elapsed_ - sim_origin_).count());
            const auto wall_due =
                wall_origin_ + std::chrono::microseconds(
                                   static_cast<std::int64_t>(sim_ms * 1000.0 / options_.acceleration));
            std::this_thread::sleep_until(wall_due);
        }
    }
}

void FleetDriver::shutdown() {
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        dispatch(devices_[i], devices_[i].flush_all(*uplinks_[i]));
    }
}

std::vector<DeviceSummary> FleetDriver::summaries() const {
    std::vector<DeviceSummary> out;
    for (const auto& d : devices_) {
        const auto& s = d.stats();
        out.push_back({d.identity().chip_id, s.crossings, s.acked_pulses, d.unsent(),
                       s.dropped_pulses, s.reports_accepted, s.reports_duplicate, d.local_count(),
                       d.state()});
    }
    return out;
}

} // namespace smartmeter::sim
