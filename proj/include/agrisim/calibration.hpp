#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "engine.hpp"
#include "sobol.hpp"
#include "types.hpp"

namespace agrisim {

/// The seven free parameters, in the fixed order used by sampling, reports
/// and result tables.
inline const std::vector<std::string>& calibrated_parameter_names() {
    static const std::vector<std::string> names = {
        "alpha", "lambda", "gamma", "beta", "eta", "profit_ref", "upsilon_max"};
    return names;
}

inline void apply_calibration_point(ModelParams& p,
                                    const std::vector<double>& point) {
    if (point.size() != 7)
        throw std::invalid_argument("apply_calibration_point: need 7 values");
    p.alpha = point[0];
    p.lambda = point[1];
    p.gamma = point[2];
    p.beta = point[3];
    p.eta = point[4];
    p.profit_ref = point[5];
    p.upsilon_max = point[6];
}

enum class Normalization { mean_scale, z_score, raw };

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "mean_scale") return Normalization::mean_scale;
    if (s == "z_score") return Normalization::z_score;
    if (s == "raw") return Normalization::raw;
    throw std::invalid_argument("unknown normalization: " + s);
}

inline const char* to_string(Normalization n) {
    switch (n) {
        case Normalization::mean_scale: return "mean_scale";
        case Normalization::z_score: return "z_score";
        case Normalization::raw: return "raw";
    }
    return "mean_scale";
}

/// Sampling plan for the parameter search and the fit window.
struct CalibrationSpec {
    std::vector<std::pair<double, double>> ranges = {
        {0.01, 0.1},   // alpha
        {0.1, 0.5},    // lambda
        {1.0, 3.5},    // gamma
        {0.4, 0.5},    // beta
        {0.05, 0.5},   // eta
        {150.0, 1500.0}, // profit_ref
        {0.05, 0.5},   // upsilon_max
    };
    int sobol_points = 4096;
    int replicas_per_point = 10;
    int period_start = 1990;
    int period_end = 2021;
    Normalization normalization = Normalization::mean_scale;

    void validate() const {
        if (ranges.size() != 7)
            throw std::invalid_argument("CalibrationSpec: need 7 ranges");
        for (const auto& r : ranges)
            if (!(r.first < r.second))
                throw std::invalid_argument(
                    "CalibrationSpec: each range needs low < high");
        if (sobol_points <= 0 || replicas_per_point <= 0)
            throw std::invalid_argument("CalibrationSpec: counts must be > 0");
        if (period_start >= period_end)
            throw std::invalid_argument(
                "CalibrationSpec: period_start must be < period_end");
    }
};

/// Observed yearly series over the fit window, dense after interpolation.
/// farmer_count and the land classes are in source units; the objective
/// rescales them to the configured population size.
struct ReferenceSeries {
    int year_start = 0;
    std::vector<double> biodiversity;
    std::vector<double> pesticide;
    std::vector<double> price_index;
    std::vector<double> yield_t;
    std::vector<double> farmer_count;
    std::vector<double> land_small;
    std::vector<double> land_medium;
    std::vector<double> land_large;
    std::vector<double> mean_farm_size;

    std::size_t size() const { return biodiversity.size(); }
    int year_end() const {
        return year_start + static_cast<int>(size()) - 1;
    }

    void validate() const {
        std::size_t n = size();
        if (n < 2)
            throw std::invalid_argument("ReferenceSeries: too few years");
        for (const auto* v :
             {&pesticide, &price_index, &yield_t, &farmer_count, &land_small,
              &land_medium, &land_large, &mean_farm_size})
            if (v->size() != n)
                throw std::invalid_argument(
                    "ReferenceSeries: series lengths differ");
    }
};

/// Dense yearly interpolation of sparse observations (census-style data).
/// No extrapolation: output covers exactly [first year, last year].
inline std::vector<std::pair<int, double>> interpolate_structural(
    const std::vector<std::pair<int, double>>& obs) {
    if (obs.size() < 2)
        throw std::invalid_argument(
            "interpolate_structural: need at least two observations");
    for (std::size_t i = 1; i < obs.size(); ++i)
        if (obs[i].first <= obs[i - 1].first)
            throw std::invalid_argument(
                "interpolate_structural: years must be strictly increasing");
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
        int y0 = obs[i].first;
        int y1 = obs[i + 1].first;
        for (int y = y0; y < y1; ++y) {
            double w = static_cast<double>(y - y0) / static_cast<double>(y1 - y0);
            out.emplace_back(y, obs[i].second +
                                    w * (obs[i + 1].second - obs[i].second));
        }
    }
    out.push_back(obs.back());
    return out;
}

namespace detail {

inline double series_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double series_sd(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace detail

/// Appends one observed/modeled series pair to a concatenated normalized
/// vector pair (observed first). Normalization makes unit-incommensurable
/// series comparable inside one sum of squares.
inline void append_normalized(const std::vector<double>& observed,
                              const std::vector<double>& modeled,
                              Normalization norm,
                              std::vector<double>& obs_out,
                              std::vector<double>& mod_out) {
    if (observed.size() != modeled.size())
        throw std::invalid_argument("append_normalized: length mismatch");
    double shift = 0.0;
    double scale = 1.0;
    switch (norm) {
        case Normalization::mean_scale:
            scale = detail::series_mean(observed);
            break;
        case Normalization::z_score: {
            shift = detail::series_mean(observed);
            scale = detail::series_sd(observed, shift);
            break;
        }
        case Normalization::raw:
            break;
    }
    if (scale == 0.0) scale = 1.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        obs_out.push_back((observed[i] - shift) / scale);
        mod_out.push_back((modeled[i] - shift) / scale);
    }
}

struct FitStats {
    double sse = std::numeric_limits<double>::infinity();
    double r2 = -std::numeric_limits<double>::infinity();
    double adj_r2 = -std::numeric_limits<double>::infinity();
    double mean_efficiency_gain = 0.0;
    long n_points = 0;
};

/// SSE / R-squared over already-concatenated normalized vectors.
inline FitStats fit_stats(const std::vector<double>& obs,
                          const std::vector<double>& mod, int n_regressors) {
    FitStats st;
    st.n_points = static_cast<long>(obs.size());
    double ss_res = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double d = mod[i] - obs[i];
        ss_res += d * d;
    }
    double grand = detail::series_mean(obs);
    double ss_tot = 0.0;
    for (double o : obs) ss_tot += (o - grand) * (o - grand);
    st.sse = ss_res;
    st.r2 = 1.0 - ss_res / ss_tot;
    double n = static_cast<double>(obs.size());
    st.adj_r2 = 1.0 - (1.0 - st.r2) * (n - 1.0) /
                          (n - 1.0 - static_cast<double>(n_regressors));
    return st;
}

namespace detail {

/// Pulls the nine reference-matched series out of a mean frame sequence for
/// [period_start, period_end]; returns false if the run did not cover the
/// window (collapse).
struct ModelSeries {
    std::vector<double> biodiversity, pesticide, price_index, yield_t,
        farmer_count, land_small, land_medium, land_large, mean_farm_size;
};

inline bool extract_model_series(const std::vector<YearFrame>& frames,
                                 int period_start, int period_end,
                                 ModelSeries& out) {
    if (frames.empty()) return false;
    int first = frames.front().year;
    auto at = [&](int year) -> const YearFrame* {
        auto idx = static_cast<std::size_t>(year - first);
        if (year < first || idx >= frames.size()) return nullptr;
        return &frames[idx];
    };
    const YearFrame* base = at(period_start);
    if (!base || !at(period_end)) return false;
    double price0 = base->price;
    for (int y = period_start; y <= period_end; ++y) {
        const YearFrame* f = at(y);
        out.biodiversity.push_back(f->eps);
        out.pesticide.push_back(f->weighted_pesticide_mean);
        out.price_index.push_back(100.0 * f->price / price0);
        out.yield_t.push_back(f->mean_yield);
        out.farmer_count.push_back(f->n_active);
        out.land_small.push_back(f->land_small);
        out.land_medium.push_back(f->land_medium);
        out.land_large.push_back(f->land_large);
        out.mean_farm_size.push_back(f->mean_farm_size);
    }
    return true;
}

} // namespace detail

/// Sum of squared normalized residuals of a Monte Carlo mean run against the
/// reference window. Count- and land-denominated reference series are scaled
/// to the configured population, so reduced-scale runs compare against
/// proportionally reduced observations. Returns +inf when the sector
/// collapses inside the window (the point is rejected).
inline double objective(const ModelParams& params_point,
                        const CalibrationSpec& spec,
                        const ReferenceSeries& ref,
                        const std::vector<SizeClass>& hist,
                        const std::vector<std::uint64_t>& seeds,
                        unsigned n_threads = 1, FitStats* stats_out = nullptr) {
    spec.validate();
    ref.validate();
    if (ref.year_start > spec.period_start ||
        ref.year_end() < spec.period_end)
        throw std::invalid_argument(
            "objective: reference series do not cover the fit window");

    ModelParams p = params_point;
    p.start_year = spec.period_start;
    p.end_year = spec.period_end;
    ScenarioConfig baseline; // calibration window is pre-policy
    ScenarioRun run;
    try {
        run = run_scenario(p, baseline, hist, seeds, n_threads);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
    detail::ModelSeries mod;
    if (!detail::extract_model_series(run.mean, spec.period_start,
                                      spec.period_end, mod))
        return std::numeric_limits<double>::infinity();
    for (const auto& r : run.replicas)
        if (r.collapsed) return std::numeric_limits<double>::infinity();

    // align reference window and rescale count/land series to model scale
    auto offset = static_cast<std::size_t>(spec.period_start - ref.year_start);
    auto len = static_cast<std::size_t>(spec.period_end - spec.period_start + 1);
    auto window = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(offset),
                                   v.begin() + static_cast<std::ptrdiff_t>(offset + len));
    };
    double count_scale = static_cast<double>(p.n0) / ref.farmer_count[offset];
    double ref_land0 =
        ref.land_small[offset] + ref.land_medium[offset] + ref.land_large[offset];
    double land_scale = p.l0_total / ref_land0;
    auto scaled = [&](const std::vector<double>& v, double s) {
        std::vector<double> out = window(v);
        for (double& x : out) x *= s;
        return out;
    };

    std::vector<double> obs_cat;
    std::vector<double> mod_cat;
    Normalization nm = spec.normalization;
    append_normalized(window(ref.biodiversity), mod.biodiversity, nm, obs_cat, mod_cat);
    append_normalized(window(ref.pesticide), mod.pesticide, nm, obs_cat, mod_cat);
    append_normalized(window(ref.price_index), mod.price_index, nm, obs_cat, mod_cat);
    append_normalized(window(ref.yield_t), mod.yield_t, nm, obs_cat, mod_cat);
    append_normalized(scaled(ref.farmer_count, count_scale), mod.farmer_count,
                      nm, obs_cat, mod_cat);
    append_normalized(scaled(ref.land_small, land_scale), mod.land_small, nm,
                      obs_cat, mod_cat);
    append_normalized(scaled(ref.land_medium, land_scale), mod.land_medium, nm,
                      obs_cat, mod_cat);
    append_normalized(scaled(ref.land_large, land_scale), mod.land_large, nm,
                      obs_cat, mod_cat);
    append_normalized(scaled(ref.mean_farm_size, land_scale / count_scale),
                      mod.mean_farm_size, nm, obs_cat, mod_cat);

    FitStats st = fit_stats(obs_cat, mod_cat, 7);
    // efficiency-gain diagnostic: mean yearly increment over the window
    auto years = static_cast<double>(spec.period_end - spec.period_start);
    const auto& frames = run.mean;
    st.mean_efficiency_gain =
        (frames.back().mean_efficiency - frames.front().mean_efficiency) / years;
    if (stats_out) *stats_out = st;
    return st.sse;
}

struct CalibrationResult {
    std::vector<double> best_point;
    std::size_t best_index = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    FitStats best_stats;
    std::vector<std::pair<std::vector<double>, double>> evaluations;
};

/// Quasi-random search: Sobol points in the 7-dim unit cube mapped to the
/// configured ranges, each scored by the SSE objective; the argmin is
/// re-evaluated for the fit report. Points run as independent jobs; the
/// result table is assembled in point order.
inline CalibrationResult calibrate(const ModelParams& base,
                                   const CalibrationSpec& spec,
                                   const ReferenceSeries& ref,
                                   const std::vector<SizeClass>& hist,
                                   std::uint64_t base_seed,
                                   unsigned n_threads = 0) {
    spec.validate();
    SobolSequence sobol(7);
    std::vector<std::vector<double>> points;
    points.reserve(static_cast<std::size_t>(spec.sobol_points));
    for (int i = 0; i < spec.sobol_points; ++i)
        points.push_back(map_to_ranges(sobol.next(), spec.ranges));

    auto seeds = derive_seeds(base_seed, spec.replicas_per_point);
    std::vector<double> scores(points.size(), 0.0);
    auto eval = [&](std::size_t i) {
        ModelParams p = base;
        apply_calibration_point(p, points[i]);
        scores[i] = objective(p, spec, ref, hist, seeds, 1);
    };
    if (n_threads == 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(points.size()));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) eval(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < points.size(); i += n_threads)
                    eval(i);
            });
        for (auto& th : pool) th.join();
    }

    CalibrationResult res;
    bool any = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        res.evaluations.emplace_back(points[i], scores[i]);
        if (std::isfinite(scores[i]) &&
            (!any || scores[i] < res.best_sse)) {
            any = true;
            res.best_sse = scores[i];
            res.best_index = i;
        }
    }
    if (!any)
        throw std::runtime_error("calibrate: every sample point was rejected");
    res.best_point = points[res.best_index];
    ModelParams p = base;
    apply_calibration_point(p, res.best_point);
    objective(p, spec, ref, hist, seeds, n_threads, &res.best_stats);
    return res;
}

struct SensitivityRow {
    std::string param;
    // relative change of the evaluation-year value vs the unperturbed run
    double eps_low = 0.0, eps_high = 0.0;
    double pesticide_low = 0.0, pesticide_high = 0.0;
    double farm_size_low = 0.0, farm_size_high = 0.0;

    double spread(int variable) const {
        switch (variable) {
            case 0: return std::abs(eps_high - eps_low);
            case 1: return std::abs(pesticide_high - pesticide_low);
            default: return std::abs(farm_size_high - farm_size_low);
        }
    }
};

/// One-at-a-time perturbation of each calibrated parameter by -50% / +50%,
/// reporting Monte-Carlo-averaged relative variations of the biodiversity
/// index, the pesticide aggregate and the mean farm size at eval_year.
inline std::vector<SensitivityRow> sensitivity(
    const ModelParams& optimal, const ScenarioConfig& sc,
    const std::vector<SizeClass>& hist,
    const std::vector<std::uint64_t>& seeds, int eval_year = 2020,
    unsigned n_threads = 0) {
    if (eval_year <= optimal.start_year || eval_year > optimal.end_year)
        throw std::invalid_argument("sensitivity: eval_year outside horizon");
    ModelParams base = optimal;
    base.end_year = eval_year;

    struct Triple { double eps, pbar, lbar; };
    auto run_point = [&](const ModelParams& p) -> Triple {
        auto run = run_scenario(p, sc, hist, seeds, n_threads);
        auto idx = static_cast<std::size_t>(eval_year - p.start_year);
        if (idx >= run.mean.size())
            throw std::runtime_error("sensitivity: run collapsed before eval year");
        const auto& f = run.mean[idx];
        return {f.eps, f.weighted_pesticide_mean, f.mean_farm_size};
    };

    Triple base_v = run_point(base);
    std::vector<SensitivityRow> rows;
    const auto& names = calibrated_parameter_names();
    std::vector<double> point = {base.alpha, base.lambda, base.gamma,
                                 base.beta, base.eta, base.profit_ref,
                                 base.upsilon_max};
    for (std::size_t i = 0; i < names.size(); ++i) {
        SensitivityRow row;
        row.param = names[i];
        for (double factor : {0.5, 1.5}) {
            auto perturbed = point;
            perturbed[i] *= factor;
            ModelParams p = base;
            apply_calibration_point(p, perturbed);
            Triple v = run_point(p);
            double d_eps = (v.eps - base_v.eps) / base_v.eps;
            double d_p = (v.pbar - base_v.pbar) / base_v.pbar;
            double d_l = (v.lbar - base_v.lbar) / base_v.lbar;
            if (factor < 1.0) {
                row.eps_low = d_eps;
                row.pesticide_low = d_p;
                row.farm_size_low = d_l;
            } else {
                row.eps_high = d_eps;
                row.pesticide_high = d_p;
                row.farm_size_high = d_l;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace agrisim
