#pragma once

#include <algorithm>
#include <optional>

#include "types.hpp"

namespace agrisim {

/// Multiplicative pesticide-rate adjustment toward the yield target. A
/// catastrophic zero-yield year skips the multiplicative step (the relative
/// gap is undefined); an active policy cap binds in either case. Returns
/// the new rate.
inline double update_pesticide(FarmerState& farmer, const ModelParams& p,
                               std::optional<double> policy_cap) {
    double rate = farmer.pesticide;
    if (farmer.realized_yield > 0.0) {
        rate *= 1.0 + p.gamma *
                          (farmer.yield_target - farmer.realized_yield) /
                          farmer.realized_yield;
        rate = std::max(0.0, rate);
    }
    if (policy_cap) rate = std::min(rate, *policy_cap);
    farmer.pesticide = rate;
    return rate;
}

/// Price-following yield-target adjustment, kept inside (0, y_max]: the
/// production function cannot exceed y_max in expectation, so targets above
/// it would chase unattainable yields with unbounded pesticide.
inline double update_yield_target(FarmerState& farmer,
                                  const MarketState& market,
                                  const ModelParams& p) {
    double target = farmer.yield_target *
                    (1.0 + p.lambda * (market.price - market.prev_price) /
                               market.price);
    target = std::min(target, p.y_max);
    target = std::max(target, 1e-9 * p.y_max);
    farmer.yield_target = target;
    return target;
}

} // namespace agrisim
