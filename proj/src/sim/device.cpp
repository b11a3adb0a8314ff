// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/sim/device.hpp"

#include <algorithm>

#include "smartmeter/core/errors.hpp"

namespace smartmeter::sim {

namespace {

constexpr FirmwareState kAllStates[] = {FirmwareState::unprovisioned, FirmwareState::provisioned,
                                        FirmwareState::connecting,    FirmwareState::syncing,
                                        FirmwareState::counting,      FirmwareState::offline};

bool online_side(FirmwareState s) {
    return s == FirmwareState::connecting || s == FirmwareState::syncing ||
           s == FirmwareState::counting || s == FirmwareState::offline;
}

} // namespace

std::string_view to_string(FirmwareState state) {
    switch (state) {
    case FirmwareState::unprovisioned:
        return "unprovisioned";
    case FirmwareState::provisioned:
        return "provisioned";
    case FirmwareState::connecting:
        return "connecting";
    case FirmwareState::syncing:
        return "syncing";
    case FirmwareState::counting:
        return "counting";
    case FirmwareState::offline:
        return "offline";
    }
    return "unprovisioned";
}

FirmwareState parse_firmware_state(std::string_view text) {
    for (auto s : kAllStates) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw ParseError("unknown firmware state '" + std::string(text) + "'");
}

std::string_view to_string(Fault fault) {
    switch (fault) {
    case Fault::link_down:
        return "link_down";
    case Fault::link_up:
        return "link_up";
    case Fault::power_cycle:
        return "power_cycle";
    }
    return "link_down";
}

Fault parse_fault(std::string_view text) {
    for (auto f : {Fault::link_down, Fault::link_up, Fault::power_cycle}) {
        if (to_string(f) == text) {
            return f;
        }
    }
    throw ParseError("unknown fault '" + std::string(text) + "'");
}

Device::Device(DeviceIdentity identity, LoadProfile profile, Timestamp epoch,
               DeviceOptions options, FirmwareState initial,
               std::optional<WifiNetwork> saved_network)
    : identity_(std::move(identity)),
      profile_(std::move(profile)),
      epoch_(epoch),
      options_(options),
      state_(initial),
      saved_network_(std::move(saved_network)),
      backoff_(options.backoff_initial) {
    if (options_.batch_size == 0) {
        throw std::invalid_argument("batch size must be positive");
    }
    if (options_.buffer_capacity && *options_.buffer_capacity < options_.batch_size) {
        throw std::invalid_argument("buffer capacity must hold at least one batch");
    }
    if (state_ != FirmwareState::unprovisioned && state_ != FirmwareState::provisioned) {
        throw InvalidTransition("devices start unprovisioned or provisioned");
    }
    if (state_ == FirmwareState::provisioned && !saved_network_) {
        state_ = FirmwareState::unprovisioned;
    }
}

void Device::set_state(FirmwareState next, std::vector<DeviceEvent>& events) {
    if (next == state_) {
        return;
    }
    state_ = next;
    events.push_back({EventKind::state_change, now(), std::nullopt, std::nullopt, next});
}

void Device::provision(std::string ssid, std::string credential) {
    if (state_ != FirmwareState::unprovisioned && state_ != FirmwareState::provisioned) {
        throw InvalidTransition("provisioning requires an unprovisioned or provisioned device, "
                                "not " + std::string(to_string(state_)));
    }
    saved_network_ = WifiNetwork{std::move(ssid), std::move(credential)};
    state_ = FirmwareState::provisioned;
}

void Device::go_offline(std::vector<DeviceEvent>& events) {
    set_state(FirmwareState::offline, events);
    if (link_available_) {
        retry_at_ = elapsed_ + backoff_;
        backoff_ = std::min(backoff_ * 2, options_.backoff_max);
    } else {
        retry_at_.reset();
    }
}

void Device::try_connect(Uplink& uplink, std::vector<DeviceEvent>& events) {
    retry_at_.reset();
    if (!link_available_) {
        if (online_side(state_)) {
            go_offline(events);
        }
        return;
    }
    set_state(FirmwareState::connecting, events);
    auto more = sync_with_cloud(uplink);
    events.insert(events.end(), more.begin(), more.end());
}

std::vector<DeviceEvent> Device::boot(Uplink& uplink) {
    std::vector<DeviceEvent> events;
    if ((state_ == FirmwareState::provisioned && saved_network_) ||
        state_ == FirmwareState::offline) {
        try_connect(uplink, events);
    }
    return events;
}

std::vector<DeviceEvent> Device::sync_with_cloud(Uplink& uplink) {
    if (state_ != FirmwareState::connecting) {
        throw InvalidTransition("sync requires connecting, not " + std::string(to_string(state_)));
    }
    std::vector<DeviceEvent> events;
    if (!link_available_) {
        go_offline(events);
        return events;
    }
    set_state(FirmwareState::syncing, events);

    std::optional<ResumePoint> resume;
    try {
        resume = uplink.last_count(identity_.chip_id);
    } catch (const LinkError&) {
        ++stats_.link_errors;
        go_offline(events);
        return events;
    }
    const std::uint64_t server_count = resume ? resume->cumulative_pulses : 0;
    const std::int64_t last_seq = resume ? resume->last_seq : -1;

    if (in_flight_) {
        const auto seq = static_cast<std::int64_t>(in_flight_->seq);
        if (seq <= last_seq) {
            // Stored before the ack got back to us.
            settle(in_flight_->pulse_delta);
            in_flight_.reset();
        } else if (seq != last_seq + 1) {
            in_flight_.reset();
        }
    }
    next_seq_ = static_cast<std::uint64_t>(last_seq + 1);
    local_count_ = server_count + pending_.size();
    backoff_ = options_.backoff_initial;
    set_state(FirmwareState::counting, events);
    flush(uplink, false, events);
    return events;
}

void Device::settle(std::uint64_t delta) {
    const auto n = std::min<std::uint64_t>(delta, pending_.size());
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
    stats_.acked_pulses += n;
}

void Device::flush(Uplink& uplink, bool include_partial, std::vector<DeviceEvent>& events) {
    while (state_ == FirmwareState::counting) {
        if (!in_flight_) {
            const auto n = static_cast<std::uint64_t>(pending_.size());
            if (n == 0 || (n < options_.batch_size && !include_partial)) {
                return;
            }
            in_flight_ = PulseReport{identity_.chip_id,  next_seq_,     std::min(n, options_.batch_size),
                                     now(),              identity_.hostname, identity_.mac,
                                     identity_.ip};
        }
        Ack ack;
        try {
            ack = uplink.send(*in_flight_);
        } catch (const LinkError&) {
            ++stats_.link_errors;
            go_offline(events);
            return;
        }
        events.push_back({EventKind::report, now(), in_flight_, ack, state_});
        switch (ack.status) {
        case IngestStatus::accept:
        case IngestStatus::duplicate:
            (ack.status == IngestStatus::accept ? stats_.reports_accepted
                                                : stats_.reports_duplicate)++;
            settle(in_flight_->pulse_delta);
            next_seq_ = in_flight_->seq + 1;
            in_flight_.reset();
            break;
        case IngestStatus::reject:
            ++stats_.reports_rejected;
            in_flight_.reset();
            if (ack.reason == RejectReason::sequence_gap) {
                next_seq_ = static_cast<std::uint64_t>(ack.last_seq + 1);
                break;
            }
            go_offline(events);
            return;
        }
    }
}

void Device::on_pulse(Timestamp at, std::vector<DeviceEvent>& events) {
    ++stats_.crossings;
    ++local_count_;
    pending_.push_back(at);
    events.push_back({EventKind::pulse, at, std::nullopt, std::nullopt, state_});
    if (options_.buffer_capacity && pending_.size() > *options_.buffer_capacity) {
        // Never drop pulses that are already part of the report in flight.
        const std::size_t skip = in_flight_ ? in_flight_->pulse_delta : 0;
        pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(skip));
        --local_count_;
        ++stats_.dropped_pulses;
        events.push_back({EventKind::dropped_pulse, at, std::nullopt, std::nullopt, state_});
    }
}

std::optional<Duration> Device::next_pulse_at() const {
    const auto target = static_cast<WattMillis>(stats_.crossings + 1) * kWattMillisPerPulse;
    return profile_.time_reaching(target);
}

std::optional<Duration> Device::flush_deadline() const {
    if (state_ != FirmwareState::counting || pending_.empty()) {
        return std::nullopt;
    }
    return std::max(elapsed_, (pending_.front() - epoch_) + options_.max_latency);
}

std::vector<DeviceEvent> Device::step(Duration dt, Uplink& uplink) {
    if (dt.count() <= 0) {
        throw std::invalid_argument("step needs a positive dt");
    }
    std::vector<DeviceEvent> events;
    const Duration target = elapsed_ + dt;

    if (state_ == FirmwareState::provisioned && saved_network_ && link_available_) {
        try_connect(uplink, events);
    }
    while (true) {
        enum class Next { none, pulse, deadline, retry } kind = Next::none;
        Duration when = target;
        if (auto p = next_pulse_at(); p && *p <= when) {
            kind = Next::pulse;
            when = *p;
        }
        if (auto d = flush_deadline(); d && *d <= target && (kind == Next::none || *d < when)) {
            kind = Next::deadline;
            when = *d;
        }
        if (retry_at_ && link_available_ &&
            (state_ == FirmwareState::offline || state_ == FirmwareState::provisioned)) {
            const auto r = std::max(*retry_at_, elapsed_);
            if (r <= target && (kind == Next::none || r < when)) {
                kind = Next::retry;
                when = r;
            }
        }
        if (kind == Next::none) {
            break;
        }
        elapsed_ = when;
        switch (kind) {
        case Next::pulse:
            on_pulse(now(), events);
            if (state_ == FirmwareState::counting && pending_.size() >= options_.batch_size) {
                flush(uplink, false, events);
            }
            break;
        case Next::deadline:
            flush(uplink, true, events);
            break;
        case Next::retry:
            try_connect(uplink, events);
            break;
        case Next::none:
            break;
        }
    }
    elapsed_ = target;
    return events;
}

std::vector<DeviceEvent> Device::inject_fault(Fault fault, Uplink& uplink) {
    std::vector<DeviceEvent> events;
    switch (fault) {
    case Fault::link_down:
        link_available_ = false;
        retry_at_.reset();
        if (online_side(state_)) {
            set_state(FirmwareState::offline, events);
        }
        break;
    case Fault::link_up:
        link_available_ = true;
        backoff_ = options_.backoff_initial;
        if (state_ == FirmwareState::offline ||
            (state_ == FirmwareState::provisioned && saved_network_)) {
            try_connect(uplink, events);
        }
        break;
    case Fault::power_cycle:
        local_count_ = 0;
        next_seq_ = 0;
        retry_at_.reset();
        backoff_ = options_.backoff_initial;
        set_state(saved_network_ ? FirmwareState::provisioned : FirmwareState::unprovisioned,
                  events);
        if (state_ == FirmwareState::provisioned && link_available_) {
            try_connect(uplink, events);
        }
        break;
    }
    return events;
}

std::vector<DeviceEvent> Device::flush_all(Uplink& uplink) {
    std::vector<DeviceEvent> events;
    if (state_ != FirmwareState::counting) {
        if (state_ == FirmwareState::offline ||
            (state_ == FirmwareState::provisioned && saved_network_)) {
            try_connect(uplink, events);
        }
    }
    flush(uplink, true, events);
    return events;
}

} // namespace smartmeter::sim
