#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace agrisim {

/// Land a below-threshold farmer releases this year. Smooth in the return
/// gap: zero at roi == r_ref, approaching beta * land as roi falls.
/// Caller guarantees roi < r_ref.
inline double compute_release(const FarmerState& farmer, const ModelParams& p) {
    return p.beta / (1.0 + p.r_ref / (p.r_ref - farmer.roi)) * farmer.land;
}

/// Prospective land an above-threshold farmer wants to rent, symmetric to
/// compute_release. Caller guarantees roi > r_ref.
inline double compute_demand(const FarmerState& farmer, const ModelParams& p) {
    return p.beta / (1.0 + p.r_ref / (farmer.roi - p.r_ref)) * farmer.land;
}

struct SettlementResult {
    double released = 0.0;
    double demanded = 0.0;
    double acquired = 0.0;
    double rationing = 0.0; // fraction of prospective demand served
    std::vector<std::uint32_t> exited;
};

/// Yearly centralized land rental settlement. All releases are applied
/// first, then the pooled availability (previous leftover + releases) is
/// distributed to acquirers, rationed proportionally so grants never exceed
/// the pool. Holdings that fall below 0.1 ha are dissolved into the leftover
/// pool and the farmer leaves the sector for good.
///
/// literal_rationing_rule flips the rationing ratio to demand/availability
/// for comparison runs; under that rule the pool can be overdrawn (negative
/// leftover), though total land is still conserved.
inline SettlementResult settle_market(std::vector<FarmerState>& farmers,
                                      MarketState& market,
                                      const ModelParams& p,
                                      bool literal_rationing_rule = false) {
    SettlementResult res;
    std::vector<std::size_t> acquirers; // positions, not ids
    std::vector<double> wanted;
    for (std::size_t i = 0; i < farmers.size(); ++i) {
        auto& f = farmers[i];
        if (!f.active) continue;
        if (f.roi < p.r_ref) {
            double give = compute_release(f, p);
            f.land -= give;
            res.released += give;
        } else if (f.roi > p.r_ref) {
            double want = compute_demand(f, p);
            acquirers.push_back(i);
            wanted.push_back(want);
            res.demanded += want;
        }
    }

    double available = market.leftover_land + res.released;
    double phi = 0.0;
    if (res.demanded > 0.0) {
        if (literal_rationing_rule) {
            phi = available > 0.0 ? std::min(1.0, res.demanded / available)
                                  : 1.0;
        } else {
            phi = std::min(1.0, available / res.demanded);
        }
    }
    res.rationing = phi;
    for (std::size_t i = 0; i < acquirers.size(); ++i) {
        double got = phi * wanted[i];
        farmers[acquirers[i]].land += got;
        res.acquired += got;
    }

    double leftover = market.leftover_land + res.released - res.acquired;
    if (!literal_rationing_rule) {
        if (leftover < -1e-6 * std::max(1.0, p.l0_total))
            throw std::logic_error(
                "settle_market: leftover pool went negative");
        leftover = std::max(0.0, leftover);
    }

    for (auto& f : farmers) {
        if (!f.active) continue;
        if (f.land < 0.1) {
            leftover += f.land;
            f.land = 0.0;
            f.active = false;
            res.exited.push_back(f.id);
        }
    }
    market.leftover_land = leftover;
    return res;
}

} // namespace agrisim
