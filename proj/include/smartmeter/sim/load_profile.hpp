// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smartmeter/core/time.hpp"

namespace smartmeter::sim {

/// Energy in watt-milliseconds. One pulse (1 Wh) is 3 600 000 W·ms.
using WattMillis = std::int64_t;
inline constexpr WattMillis kWattMillisPerPulse = 3'600'000;

struct LoadSegment {
    Duration duration;
    std::int64_t watts = 0;

    bool operator==(const LoadSegment&) const = default;
};

/// Piecewise-constant household load. Past the last segment the load is zero,
/// or the segments start over when `repeat` is set.
class LoadProfile {
public:
    LoadProfile() = default;
    LoadProfile(std::vector<LoadSegment> segments, bool repeat = false);

    static LoadProfile constant(std::int64_t watts);

    const std::vector<LoadSegment>& segments() const { return segments_; }
    bool repeats() const { return repeat_; }
    Duration period() const { return period_; }

    std::int64_t watts_at(Duration t) const;

    /// Exact energy drawn in [0, t).
    WattMillis energy_until(Duration t) const;

    /// Earliest t with energy_until(t) >= target, or nullopt if the profile
    /// never gets there.
    std::optional<Duration> time_reaching(WattMillis target) const;

private:
    WattMillis energy_within_period(Duration t) const;

    std::vector<LoadSegment> segments_;
    bool repeat_ = false;
    Duration period_{0};
    WattMillis period_energy_ = 0;
};

} // namespace smartmeter::sim
