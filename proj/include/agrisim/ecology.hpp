#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "types.hpp"

namespace agrisim {

/// Land-weighted pesticide aggregate over active farmers,
/// sum(L * P * e^k) / sum(L). k = 0 gives the plain land-weighted mean;
/// k > 0 folds in the efficiency contribution of the technology variant.
/// Summation runs in farmer-id order for bit-reproducibility.
inline double weighted_pesticide_mean(std::span<const FarmerState> farmers,
                                      double k) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& f : farmers) {
        if (!f.active || f.land <= 0.0) continue;
        double w = k == 0.0 ? 1.0 : std::pow(f.efficiency, k);
        num += f.land * f.pesticide * w;
        den += f.land;
    }
    if (den <= 0.0)
        throw std::runtime_error(
            "weighted_pesticide_mean: no active land (sector collapsed)");
    return num / den;
}

/// Next-year carrying capacity from the mean-farm-size and pesticide
/// aggregates, each anchored to its frozen baseline.
inline double update_carrying(const EcologyState& eco, double lbar_new,
                              double pagg_new, const ModelParams& p) {
    if (!(lbar_new > 0.0) || !(pagg_new > 0.0))
        throw std::invalid_argument("update_carrying: aggregates must be > 0");
    return p.mu * (eco.lbar0 / lbar_new) +
           (1.0 - p.mu) * (eco.pagg0_k / pagg_new);
}

/// Logistic biodiversity step toward the carrying capacity, floored at
/// eps_floor. Stores and returns the new index.
inline double update_biodiversity(EcologyState& eco, double k_next,
                                  const ModelParams& p) {
    eco.carrying = k_next;
    double eps = eco.eps + p.r_eps * (1.0 - eco.eps / k_next) * eco.eps;
    eco.eps = std::max(eps, p.eps_floor);
    return eco.eps;
}

/// Pest exposure rising as biodiversity falls below its baseline. Clamped to
/// (0, 0.999]: the production function needs exposure < 1 for a positive
/// unprotected yield.
inline double update_pest(EcologyState& eco, const ModelParams& p) {
    double pest = p.pi0 * std::pow(eco.eps0 / eco.eps, p.a);
    eco.pest = std::min(pest, 0.999);
    return eco.pest;
}

} // namespace agrisim
