#pragma once

#include <algorithm>
#include <cmath>

#include "random.hpp"
#include "types.hpp"

namespace agrisim {

/// Itemized yearly profit of one farmer.
/// profit = revenue - (op + pesticide + nonop) + subsidy, exactly.
struct ProfitBreakdown {
    double revenue = 0.0;
    double op_costs = 0.0;
    double pesticide_costs = 0.0;
    double nonop_costs = 0.0;
    double subsidy = 0.0;
    double profit = 0.0;
};

/// Resolved yearly subsidy scheme: a pool distributed per hectare of active
/// land plus a flat payment per active farmer.
struct SubsidyTerms {
    double per_hectare_pool = 0.0; // [EUR/yr], split over total active land
    double flat_per_farmer = 0.0;  // [EUR/yr] per active farmer
};

struct ProductionResult {
    double yield_per_ha = 0.0; // [t/ha/yr]
    double total_output = 0.0; // [t/yr]
};

/// Saturating yield response to protected pest pressure.
inline double expected_yield(double efficiency, double pesticide,
                             double pest_exposure, const ModelParams& p) {
    return p.y_max * (1.0 - pest_exposure *
                                std::exp(-efficiency * pesticide /
                                         p.p_ref_pesticide));
}

/// One farmer-year of production. Draws the multiplicative noise from the
/// production stream keyed by (farmer, year); updates realized_yield.
inline ProductionResult produce(FarmerState& farmer, double pest_exposure,
                                const ModelParams& p, const RandomStream& rng,
                                int year_index) {
    double xi = p.xi_std > 0.0
                    ? rng.gaussian(Stream::production_noise, farmer.id,
                                   static_cast<std::uint64_t>(year_index), 0.0,
                                   p.xi_std)
                    : 0.0;
    double y = expected_yield(farmer.efficiency, farmer.pesticide,
                              pest_exposure, p) *
               (1.0 + xi);
    y = std::max(0.0, y);
    farmer.realized_yield = y;
    return {y, farmer.land * y};
}

/// Yearly price adjustment from the demand/supply imbalance. A non-positive
/// result is clamped to 1e-6 of the initial price and counted, so extreme
/// policy sweeps degrade instead of aborting.
inline void clear_market(double total_production, MarketState& market,
                         const ModelParams& p) {
    double next = market.price *
                  (1.0 + p.alpha * (market.demand - total_production) /
                             market.demand);
    if (next <= 0.0) {
        next = 1e-6 * market.price0;
        ++market.price_floor_events;
    }
    market.prev_price = market.price;
    market.price = next;
    market.total_production = total_production;
}

/// Total yearly production cost of a holding: per-hectare operating and
/// pesticide expenses plus sub-linear non-operating expenses.
inline double production_cost(double land, double pesticide,
                              const ModelParams& p) {
    return land * (p.p_pesticide * pesticide + p.c_op) +
           std::pow(land, p.b) * p.c_nonop;
}

/// Computes this year's profit breakdown and updates the farmer's profit and
/// return on investment (net of the technology share).
inline ProfitBreakdown account_profit(FarmerState& farmer, double price,
                                      double total_land, const ModelParams& p,
                                      const SubsidyTerms& terms) {
    ProfitBreakdown out;
    out.revenue = price * farmer.land * farmer.realized_yield;
    out.op_costs = farmer.land * p.c_op;
    out.pesticide_costs = farmer.land * p.p_pesticide * farmer.pesticide;
    out.nonop_costs = std::pow(farmer.land, p.b) * p.c_nonop;
    out.subsidy = (farmer.land / total_land) * terms.per_hectare_pool +
                  terms.flat_per_farmer;
    double costs = out.op_costs + out.pesticide_costs + out.nonop_costs;
    out.profit = out.revenue - costs + out.subsidy;
    farmer.profit = out.profit;
    farmer.roi = (1.0 - p.eta) * out.profit / costs;
    return out;
}

/// Probability that this year's technology investment pays off. Zero for
/// non-positive profit: there is nothing to invest.
inline double adoption_probability(double profit, const ModelParams& p) {
    if (profit <= 0.0) return 0.0;
    return 1.0 - std::exp(-p.eta * profit / p.profit_ref);
}

/// Bernoulli technology adoption; on success the efficiency is raised by a
/// uniform gain in [0, upsilon_max]. Returns whether adoption happened.
inline bool adopt_technology(FarmerState& farmer, const ModelParams& p,
                             const RandomStream& rng, int year_index) {
    double prob = adoption_probability(farmer.profit, p);
    if (prob <= 0.0) return false;
    auto step = static_cast<std::uint64_t>(year_index);
    if (rng.uniform(Stream::adoption, farmer.id, step) >= prob) return false;
    farmer.efficiency +=
        rng.uniform(Stream::efficiency_gain, farmer.id, step) * p.upsilon_max;
    return true;
}

} // namespace agrisim
