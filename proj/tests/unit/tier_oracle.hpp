// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force reference for tiered billing. Walks consumption in 0.1 kWh
// steps and credits each step to the tier it falls in. Test-only; shares no
// code with the billing implementation.

#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

struct Tier {
    std::optional<std::int64_t> tenths;  // span in 0.1 kWh steps
    std::int64_t price_paisa;            // per kWh
};

/// Per-tier charge in paisa, rounded half-up from the exact sum at the end.
/// `consumed_tenths` is the consumption in 0.1 kWh steps.
inline std::vector<std::int64_t> tier_charges(const std::vector<Tier>& tiers,
                                              std::int64_t consumed_tenths) {
    // Each step costs price/10 paisa; keep tenths of a paisa exactly.
    std::vector<std::int64_t> deci_paisa(tiers.size(), 0);
    std::size_t tier = 0;
    std::int64_t used_in_tier = 0;
    for (std::int64_t step = 0; step < consumed_tenths; ++step) {
        while (tiers[tier].tenths && used_in_tier >= *tiers[tier].tenths) {
            ++tier;
            used_in_tier = 0;
        }
        deci_paisa[tier] += tiers[tier].price_paisa;
        ++used_in_tier;
    }
    std::vector<std::int64_t> out;
    for (auto v : deci_paisa) {
        out.push_back((v + 5) / 10);
    }
    return out;
}

} // namespace oracle
