#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "behavior.hpp"
#include "economy.hpp"
#include "ecology.hpp"
#include "init.hpp"
#include "land_market.hpp"
#include "policy.hpp"
#include "random.hpp"
#include "types.hpp"

namespace agrisim {

/// Full mutable state of one simulation replica.
struct SimState {
    std::vector<FarmerState> farmers;
    MarketState market;
    EcologyState eco;
    int year = 0;
    bool collapsed = false;

    // per-farmer pesticide rates frozen the year before a reduction ramp
    std::vector<double> frozen_pre_ramp;
    bool ramp_frozen = false;
};

inline SimState make_initial_state(const ModelParams& p,
                                   const std::vector<SizeClass>& hist,
                                   const RandomStream& rng) {
    SimState st;
    auto init = initialize_population(p, hist, rng);
    st.farmers = std::move(init.farmers);
    st.market = init.market;
    st.eco = init.eco;
    st.year = p.start_year;
    return st;
}

/// Advances the state through one crop year, in the fixed phase order:
/// production, goods-market clearing and profit accounting, technology
/// adoption, land-market settlement with exits, pesticide and yield-target
/// updates (policy cap applied), then the ecology chain (aggregates ->
/// carrying capacity -> biodiversity -> pest exposure). Emits the year's
/// aggregate frame.
///
/// Stock-like frame fields report the values in effect during production;
/// census-like fields report the post-settlement population.
inline YearFrame step_year(SimState& st, const ModelParams& p,
                           const ScenarioConfig& sc, const RandomStream& rng) {
    if (st.collapsed)
        throw std::logic_error("step_year: sector already collapsed");
    const int year = st.year;
    const int t = year - p.start_year;

    YearFrame frame;
    frame.year = year;
    frame.eps = st.eco.eps;
    frame.pest = st.eco.pest;
    frame.carrying = st.eco.carrying;
    frame.demand = st.market.demand;
    frame.leftover_land = st.market.leftover_land;

    // (1) production
    double total_production = 0.0;
    double land_in_use = 0.0;
    double pesticide_weighted = 0.0;
    double eff_sum = 0.0;
    long n_active = 0;
    for (auto& f : st.farmers) {
        if (!f.active) continue;
        auto prod = produce(f, st.eco.pest, p, rng, t);
        total_production += prod.total_output;
        land_in_use += f.land;
        pesticide_weighted += f.land * f.pesticide;
        eff_sum += f.efficiency;
        ++n_active;
    }
    frame.total_production = total_production;
    frame.mean_yield = land_in_use > 0.0 ? total_production / land_in_use : 0.0;
    frame.weighted_pesticide_mean =
        land_in_use > 0.0 ? pesticide_weighted / land_in_use : 0.0;
    frame.mean_efficiency =
        n_active > 0 ? eff_sum / static_cast<double>(n_active) : 0.0;

    // (2) market clearing and profit accounting
    clear_market(total_production, st.market, p);
    frame.price = st.market.price;
    SubsidyTerms terms = subsidy_terms(sc, p, n_active, year);
    frame.subsidy_per_farmer = terms.flat_per_farmer;
    frame.subsidy_per_hectare =
        land_in_use > 0.0 ? terms.per_hectare_pool / land_in_use : 0.0;

    double roi_sum = 0.0;
    double roi_sum_cls[3] = {0.0, 0.0, 0.0};
    long roi_n_cls[3] = {0, 0, 0};
    for (auto& f : st.farmers) {
        if (!f.active) continue;
        account_profit(f, st.market.price, land_in_use, p, terms);
        roi_sum += f.roi;
        auto cls = static_cast<int>(size_class_of(f.land));
        roi_sum_cls[cls] += f.roi;
        ++roi_n_cls[cls];
    }
    frame.mean_roi = n_active > 0 ? roi_sum / static_cast<double>(n_active) : 0.0;
    frame.mean_roi_small =
        roi_n_cls[0] > 0 ? roi_sum_cls[0] / static_cast<double>(roi_n_cls[0]) : 0.0;
    frame.mean_roi_medium =
        roi_n_cls[1] > 0 ? roi_sum_cls[1] / static_cast<double>(roi_n_cls[1]) : 0.0;
    frame.mean_roi_large =
        roi_n_cls[2] > 0 ? roi_sum_cls[2] / static_cast<double>(roi_n_cls[2]) : 0.0;

    // (3) technology adoption
    for (auto& f : st.farmers)
        if (f.active) adopt_technology(f, p, rng, t);

    // (4) land market
    settle_market(st.farmers, st.market, p, sc.literal_rationing_rule);

    // (5) behavioral updates with the scenario's cap for next year's rate
    if (sc.has_pesticide_cap() && !st.ramp_frozen &&
        year >= sc.ramp_start_year - 1) {
        st.frozen_pre_ramp.resize(st.farmers.size(), 0.0);
        for (const auto& f : st.farmers) st.frozen_pre_ramp[f.id] = f.pesticide;
        st.ramp_frozen = true;
    }
    for (auto& f : st.farmers) {
        if (!f.active) continue;
        std::optional<double> cap;
        if (st.ramp_frozen)
            cap = pesticide_cap(sc, st.frozen_pre_ramp[f.id], year + 1);
        update_pesticide(f, p, cap);
        update_yield_target(f, st.market, p);
    }

    // census after settlement
    double land_post = 0.0;
    double land_cls[3] = {0.0, 0.0, 0.0};
    long n_post = 0;
    for (const auto& f : st.farmers) {
        if (!f.active) continue;
        land_post += f.land;
        land_cls[static_cast<int>(size_class_of(f.land))] += f.land;
        ++n_post;
    }
    frame.n_active = static_cast<double>(n_post);
    frame.mean_farm_size =
        n_post > 0 ? land_post / static_cast<double>(n_post) : 0.0;
    frame.land_small = land_cls[0];
    frame.land_medium = land_cls[1];
    frame.land_large = land_cls[2];
    frame.leftover_land = st.market.leftover_land;

    // (6) ecology with post-update aggregates
    if (n_post == 0) {
        st.collapsed = true;
    } else {
        double pbar_plain = weighted_pesticide_mean(st.farmers, 0.0);
        double pagg = p.k == 0.0 ? pbar_plain
                                 : weighted_pesticide_mean(st.farmers, p.k);
        double lbar = land_post / static_cast<double>(n_post);
        double k_next = update_carrying(st.eco, lbar, pagg, p);
        update_biodiversity(st.eco, k_next, p);
        update_pest(st.eco, p);
    }

    ++st.year;
    return frame;
}

/// One replica's frame series. `collapsed` marks a run that lost every
/// farmer before the final year; its frames are truncated at that point.
struct RunResult {
    std::uint64_t seed = 0;
    std::vector<YearFrame> frames;
    bool collapsed = false;
};

inline RunResult run_single(const ModelParams& p, const ScenarioConfig& sc,
                            const std::vector<SizeClass>& hist,
                            std::uint64_t seed) {
    RandomStream rng(seed);
    SimState st = make_initial_state(p, hist, rng);
    RunResult res;
    res.seed = seed;
    res.frames.reserve(static_cast<std::size_t>(p.end_year - p.start_year + 1));
    for (int year = p.start_year; year <= p.end_year; ++year) {
        res.frames.push_back(step_year(st, p, sc, rng));
        if (st.collapsed) {
            res.collapsed = true;
            break;
        }
    }
    return res;
}

/// Monte Carlo batch over explicit seeds plus per-field mean and standard
/// error series. Replicas are independent jobs; results assemble in seed
/// order regardless of the thread count.
struct ScenarioRun {
    std::vector<RunResult> replicas;
    std::vector<YearFrame> mean;
    std::vector<YearFrame> stderror;
};

inline std::vector<YearFrame> mean_frames(const std::vector<RunResult>& runs,
                                          std::vector<YearFrame>* stderr_out) {
    std::vector<YearFrame> mean;
    std::size_t max_len = 0;
    for (const auto& r : runs) max_len = std::max(max_len, r.frames.size());
    if (stderr_out) stderr_out->clear();
    for (std::size_t i = 0; i < max_len; ++i) {
        YearFrame m;
        YearFrame s;
        long n = 0;
        for (const auto& r : runs) {
            if (i >= r.frames.size()) continue;
            const auto& f = r.frames[i];
            m.year = f.year;
            s.year = f.year;
            for (const auto& field : frame_fields())
                m.*(field.member) += f.*(field.member);
            ++n;
        }
        for (const auto& field : frame_fields())
            m.*(field.member) /= static_cast<double>(n);
        if (stderr_out) {
            for (const auto& r : runs) {
                if (i >= r.frames.size()) continue;
                const auto& f = r.frames[i];
                for (const auto& field : frame_fields()) {
                    double d = f.*(field.member) - m.*(field.member);
                    s.*(field.member) += d * d;
                }
            }
            for (const auto& field : frame_fields())
                s.*(field.member) =
                    n > 1 ? std::sqrt(s.*(field.member) /
                                      (static_cast<double>(n) *
                                       static_cast<double>(n - 1)))
                          : 0.0;
            stderr_out->push_back(s);
        }
        mean.push_back(m);
    }
    return mean;
}

inline ScenarioRun run_scenario(const ModelParams& p, const ScenarioConfig& sc,
                                const std::vector<SizeClass>& hist,
                                const std::vector<std::uint64_t>& seeds,
                                unsigned n_threads = 0) {
    if (seeds.empty())
        throw std::invalid_argument("run_scenario: need at least one seed");
    sc.validate();
    ModelParams eff = p;
    sc.apply_overrides(eff);
    eff.validate();

    ScenarioRun out;
    out.replicas.resize(seeds.size());
    if (n_threads == 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads,
                                   static_cast<unsigned>(seeds.size()));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i)
            out.replicas[i] = run_single(eff, sc, hist, seeds[i]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < seeds.size(); i += n_threads)
                    out.replicas[i] = run_single(eff, sc, hist, seeds[i]);
            });
        }
        for (auto& th : pool) th.join();
    }
    out.mean = mean_frames(out.replicas, &out.stderror);
    return out;
}

inline std::vector<std::uint64_t> derive_seeds(std::uint64_t base,
                                               int replicas) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r)
        seeds.push_back(RandomStream::derive_replica_seed(base,
                                                          static_cast<std::uint64_t>(r)));
    return seeds;
}

/// End-of-horizon outcomes of the combined policy at one reallocation level
/// (the six reported panels).
struct SweepRow {
    double theta = 0.0;
    double subsidy_per_farmer = 0.0;
    double subsidy_per_hectare = 0.0;
    double eps = 0.0;
    double price = 0.0;
    double mean_farm_size = 0.0;
    double n_active = 0.0;
};

/// Runs the combined scenario once per theta grid value and reports the
/// final-year outcomes of the Monte Carlo mean series.
inline std::vector<SweepRow> run_theta_sweep(
    const ModelParams& p, const ScenarioConfig& base,
    const std::vector<double>& theta_grid,
    const std::vector<SizeClass>& hist,
    const std::vector<std::uint64_t>& seeds, unsigned n_threads = 0) {
    std::vector<SweepRow> rows;
    rows.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        if (theta < 0.0 || theta >= 1.0)
            throw std::invalid_argument("run_theta_sweep: theta outside [0,1)");
        ScenarioConfig sc = base;
        sc.kind = ScenarioKind::combined;
        sc.theta = theta;
        auto run = run_scenario(p, sc, hist, seeds, n_threads);
        const auto& last = run.mean.back();
        rows.push_back({theta, last.subsidy_per_farmer, last.subsidy_per_hectare,
                        last.eps, last.price, last.mean_farm_size,
                        last.n_active});
    }
    return rows;
}

} // namespace agrisim
