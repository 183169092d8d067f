#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "economy.hpp"
#include "ecology.hpp"
#include "random.hpp"
#include "types.hpp"

namespace agrisim {

/// Efficiency implied by a (pesticide rate, deterministic yield) pair under
/// the production function. The argument of the log must be positive, i.e.
/// the yield has to lie below y_max; yields at or below the unprotected
/// level y_max * (1 - pi0) invert to efficiencies <= 0.
inline double invert_efficiency(double pesticide, double yield_t,
                                const ModelParams& p) {
    double ratio = (1.0 - yield_t / p.y_max) / p.pi0;
    if (!(ratio > 0.0))
        throw std::invalid_argument(
            "invert_efficiency: yield must be below y_max");
    return -(p.p_ref_pesticide / pesticide) * std::log(ratio);
}

struct InitialState {
    std::vector<FarmerState> farmers;
    MarketState market;
    EcologyState eco;
};

namespace detail {

/// Largest-remainder apportionment of n farmers across histogram classes,
/// proportional to class counts.
inline std::vector<std::int64_t> apportion(const std::vector<SizeClass>& hist,
                                           std::int64_t n) {
    double total = 0.0;
    for (const auto& c : hist) total += c.count;
    std::vector<std::int64_t> alloc(hist.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        double exact = static_cast<double>(n) * hist[i].count / total;
        alloc[i] = static_cast<std::int64_t>(exact);
        assigned += alloc[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::int64_t j = 0; j < n - assigned; ++j)
        ++alloc[remainders[static_cast<std::size_t>(j) % remainders.size()].second];
    return alloc;
}

} // namespace detail

/// Builds a consistent start-of-simulation population:
///  - lands drawn uniformly within census size classes (classes apportioned
///    proportionally to the histogram), then rescaled so they sum exactly to
///    the configured total;
///  - per-farmer pesticide rates and yields drawn as Gaussian factors around
///    the sector means, redrawn while non-positive or while the yield is not
///    below y_max (which would make the efficiency inversion undefined);
///  - efficiency from inverting the noise-free production function;
///  - the initial price solved in closed form so the farmer-mean return on
///    investment equals r0 (profit is linear in price, so the solution is
///    unique);
///  - demand pinned to total initial production (market starts at its
///    equilibrium);
///  - ecological baselines frozen from the constructed population.
inline InitialState initialize_population(const ModelParams& p,
                                          const std::vector<SizeClass>& hist,
                                          const RandomStream& rng) {
    p.validate();
    if (hist.empty())
        throw std::invalid_argument("initialize_population: empty histogram");
    double hist_count = 0.0;
    for (const auto& c : hist) {
        if (c.count < 0.0 || c.low_ha < 0.0 || c.high_ha <= c.low_ha)
            throw std::invalid_argument(
                "initialize_population: malformed size class");
        hist_count += c.count;
    }
    if (hist_count <= 0.0)
        throw std::invalid_argument(
            "initialize_population: histogram counts sum to zero");

    InitialState out;
    auto n = static_cast<std::size_t>(p.n0);
    out.farmers.resize(n);
    auto alloc = detail::apportion(hist, p.n0);

    // lands: uniform position within the assigned class
    double land_sum = 0.0;
    std::size_t next_id = 0;
    for (std::size_t c = 0; c < hist.size(); ++c) {
        for (std::int64_t j = 0; j < alloc[c]; ++j, ++next_id) {
            auto& f = out.farmers[next_id];
            f.id = static_cast<std::uint32_t>(next_id);
            double u = rng.uniform(Stream::init_land, f.id, 0);
            f.land = hist[c].low_ha + u * (hist[c].high_ha - hist[c].low_ha);
            land_sum += f.land;
        }
    }
    double scale = p.l0_total / land_sum;
    for (auto& f : out.farmers) f.land *= scale;

    // pesticide rates, yields, efficiencies
    for (auto& f : out.farmers) {
        double rate = 0.0;
        for (std::uint64_t step = 0;; ++step) {
            double zeta = rng.gaussian(Stream::init_pesticide, f.id, step, 0.0, 0.1);
            rate = p.p_bar0 * (1.0 + zeta);
            if (rate > 0.0) break;
        }
        f.pesticide = rate;

        double yield0 = 0.0;
        for (std::uint64_t step = 0;; ++step) {
            double psi = rng.gaussian(Stream::init_yield, f.id, step, 0.0, 0.1);
            yield0 = p.y_bar0 * (1.0 + psi);
            if (yield0 > 0.0 && yield0 < p.y_max) break;
        }
        f.yield_target = yield0;
        f.realized_yield = yield0;
        f.efficiency = invert_efficiency(f.pesticide, yield0, p);
        f.active = true;
    }

    // closed-form price: mean_i[(1-eta) * (price*Y_i + s_i - C_i) / C_i] = r0
    double sum_y_over_c = 0.0;
    double sum_net_over_c = 0.0;
    double total_production = 0.0;
    for (const auto& f : out.farmers) {
        double output = f.land * f.realized_yield;
        double cost = production_cost(f.land, f.pesticide, p);
        double subsidy = (f.land / p.l0_total) * p.s_total;
        sum_y_over_c += output / cost;
        sum_net_over_c += (subsidy - cost) / cost;
        total_production += output;
    }
    double n_d = static_cast<double>(p.n0);
    double price = (n_d * p.r0 / (1.0 - p.eta) - sum_net_over_c) / sum_y_over_c;
    if (!(price > 0.0))
        throw std::invalid_argument(
            "initialize_population: no positive price satisfies the initial "
            "return-on-investment condition");

    out.market.price = price;
    out.market.prev_price = price;
    out.market.price0 = price;
    out.market.demand = total_production;
    out.market.total_production = total_production;
    out.market.leftover_land = 0.0;

    SubsidyTerms base_terms{p.s_total, 0.0};
    for (auto& f : out.farmers)
        account_profit(f, price, p.l0_total, p, base_terms);

    out.eco.eps = 1.0;
    out.eco.eps0 = 1.0;
    out.eco.pest = p.pi0;
    out.eco.carrying = 1.0;
    out.eco.lbar0 = p.l0_total / n_d;
    out.eco.pbar0_weighted = weighted_pesticide_mean(out.farmers, 0.0);
    out.eco.pagg0_k = p.k == 0.0 ? out.eco.pbar0_weighted
                                 : weighted_pesticide_mean(out.farmers, p.k);
    return out;
}

} // namespace agrisim
