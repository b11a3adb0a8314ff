// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/sim/load_profile.hpp"

#include <stdexcept>

namespace smartmeter::sim {

LoadProfile::LoadProfile(std::vector<LoadSegment> segments, bool repeat)
    : segments_(std::move(segments)), repeat_(repeat) {
    for (const auto& s : segments_) {
        if (s.duration.count() < 0 || s.watts < 0) {
            throw std::invalid_argument("load segments need non-negative duration and power");
        }
        period_ += s.duration;
        period_energy_ += s.watts * s.duration.count();
    }
    if (repeat_ && period_.count() == 0) {
        repeat_ = false;
    }
}

LoadProfile LoadProfile::constant(std::int64_t watts) {
    return LoadProfile({{Duration{86'400'000}, watts}}, true);
}

std::int64_t LoadProfile::watts_at(Duration t) const {
    if (t.count() < 0) {
        return 0;
    }
    if (repeat_) {
        t = t % period_;
    }
    for (const auto& s : segments_) {
        if (t < s.duration) {
            return s.watts;
        }
        t -= s.duration;
    }
    return 0;
}

WattMillis LoadProfile::energy_within_period(Duration t) const {
    WattMillis e = 0;
    for (const auto& s : segments_) {
        if (t <= Duration{0}) {
            break;
        }
        const auto span = std::min(t, s.duration);
        e += s.watts * span.count();
        t -= span;
    }
    return e;
}

WattMillis LoadProfile::energy_until(Duration t) const {
    if (t.count() <= 0) {
        return 0;
    }
    if (!repeat_) {
        return energy_within_period(t);
    }
    const auto cycles = t / period_;
    return cycles * period_energy_ + energy_within_period(t % period_);
}

std::optional<Duration> LoadProfile::time_reaching(WattMillis target) const {
    if (target <= 0) {
        return Duration{0};
    }
    Duration base{0};
    if (repeat_) {
        if (period_energy_ == 0) {
            return std::nullopt;
        }
        // Whole periods strictly before the one containing the target.
        const auto cycles = (target - 1) / period_energy_;
        base = period_ * cycles;
        target -= cycles * period_energy_;
    }
    WattMillis acc = 0;
    for (const auto& s : segments_) {
        const WattMillis seg_energy = s.watts * s.duration.count();
        if (s.watts > 0 && acc + seg_energy >= target) {
            const auto need = target - acc;
            return base + Duration{(need + s.watts - 1) / s.watts};
        }
        acc += seg_energy;
        base += s.duration;
    }
    return std::nullopt;
}

} // namespace smartmeter::sim
