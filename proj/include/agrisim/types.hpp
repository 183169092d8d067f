#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace agrisim {

/// All structural constants of the model. Defaults are the shipped
/// production values; validate() rejects configurations the update rules
/// cannot handle (non-positive scales, weights outside their ranges).
struct ModelParams {
    // initialization
    std::int64_t n0 = 300000;     // farms at start
    double l0_total = 1.0e7;      // total agricultural land [ha]
    double p_bar0 = 5.0;          // mean pesticide application [kg/ha/yr]
    double y_bar0 = 7.0;          // mean yield [t/ha/yr]
    double pi0 = 0.3;             // pesticide-free yield-loss fraction at start
    double r0 = 0.05;             // mean return on investment at start [1/yr]
    double demand = 7.0e7;        // reference demand [t/yr]; the engine re-derives
                                  // actual demand from initial production

    // ecology
    double r_eps = 0.1;           // intrinsic growth rate of the bird index [1/yr]
    double mu = 0.9;              // carrying-capacity weight on farm size
    double a = 0.5;               // pest-exposure nonlinearity exponent
    double k = 0.0;               // efficiency exponent in the pesticide aggregate

    // production
    double y_max = 8.5;           // maximum attainable yield [t/ha/yr]
    double p_ref_pesticide = 10.0; // pesticide normalization [kg/ha/yr]
    double xi_std = 0.05;         // production noise std

    // economics
    double alpha = 0.08;          // price adjustment friction
    double p_pesticide = 10.0;    // pesticide price [EUR/kg]
    double c_op = 500.0;          // operating costs [EUR/ha/yr]
    double c_nonop = 600.0;       // non-operating cost scale [EUR/ha^b/yr]
    double b = 0.9;               // economies-of-scale exponent
    double s_total = 5.0e9;       // subsidy budget [EUR/yr]

    // technology adoption
    double eta = 0.15;            // profit share invested in technology
    double profit_ref = 1000.0;   // reference profit for adoption probability [EUR/yr]
    double upsilon_max = 0.1;     // maximum efficiency gain per success [1/yr]

    // behavior
    double beta = 0.45;           // land adjustment speed [1/yr]
    double r_ref = 0.05;          // opportunity cost of capital [1/yr]
    double gamma = 2.0;           // pesticide adjustment speed
    double lambda = 0.2;          // yield-target adjustment speed

    // guards and calendar
    double eps_floor = 1e-6;      // smallest admissible biodiversity index
    int start_year = 1990;
    int end_year = 2075;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("ModelParams: ") + name +
                                            " must be > 0");
        };
        if (n0 <= 0) throw std::invalid_argument("ModelParams: n0 must be > 0");
        positive(l0_total, "l0_total");
        positive(p_bar0, "p_bar0");
        positive(y_bar0, "y_bar0");
        positive(pi0, "pi0");
        if (pi0 >= 1.0) throw std::invalid_argument("ModelParams: pi0 must be < 1");
        positive(r0, "r0");
        positive(demand, "demand");
        positive(r_eps, "r_eps");
        if (mu < 0.0 || mu > 1.0)
            throw std::invalid_argument("ModelParams: mu must be in [0,1]");
        if (a < 0.0) throw std::invalid_argument("ModelParams: a must be >= 0");
        if (k < 0.0 || k > 1.0)
            throw std::invalid_argument("ModelParams: k must be in [0,1]");
        positive(y_max, "y_max");
        if (y_bar0 >= y_max)
            throw std::invalid_argument("ModelParams: y_bar0 must be < y_max");
        positive(p_ref_pesticide, "p_ref_pesticide");
        if (xi_std < 0.0)
            throw std::invalid_argument("ModelParams: xi_std must be >= 0");
        if (alpha <= 0.0 || alpha >= 1.0)
            throw std::invalid_argument("ModelParams: alpha must be in (0,1)");
        positive(p_pesticide, "p_pesticide");
        positive(c_op, "c_op");
        positive(c_nonop, "c_nonop");
        if (b <= 0.0 || b > 1.0)
            throw std::invalid_argument("ModelParams: b must be in (0,1]");
        positive(s_total, "s_total");
        if (eta < 0.0 || eta > 1.0)
            throw std::invalid_argument("ModelParams: eta must be in [0,1]");
        positive(profit_ref, "profit_ref");
        positive(upsilon_max, "upsilon_max");
        positive(beta, "beta");
        if (beta >= 1.0)
            throw std::invalid_argument("ModelParams: beta must be < 1");
        positive(r_ref, "r_ref");
        positive(gamma, "gamma");
        positive(lambda, "lambda");
        positive(eps_floor, "eps_floor");
        if (start_year >= end_year)
            throw std::invalid_argument("ModelParams: start_year must be < end_year");
    }
};

/// Per-agent economic state. Farmers never re-enter once inactive; an
/// inactive farmer holds no land and is skipped by every yearly phase.
struct FarmerState {
    std::uint32_t id = 0;
    double land = 0.0;           // [ha], >= 0
    double pesticide = 0.0;      // application rate [kg/ha/yr], >= 0
    double efficiency = 1.0;     // pesticide-use efficiency (dimensionless)
    double yield_target = 0.0;   // [t/ha/yr]
    double realized_yield = 0.0; // [t/ha/yr], last production result
    double profit = 0.0;         // [EUR/yr], may be negative
    double roi = 0.0;            // [1/yr], may be negative
    bool active = true;
};

/// Goods-market state. price0 is kept for the floor clamp;
/// price_floor_events counts how often the clamp fired (diagnostic).
struct MarketState {
    double price = 0.0;      // [EUR/t]
    double prev_price = 0.0; // [EUR/t]
    double price0 = 0.0;     // initial price [EUR/t]
    double demand = 0.0;     // [t/yr], fixed after initialization
    double total_production = 0.0; // [t/yr]
    double leftover_land = 0.0;    // unrented pool [ha]
    long price_floor_events = 0;
};

/// Aggregate ecological state plus the frozen start-of-simulation baselines
/// the carrying-capacity ratios are anchored to.
struct EcologyState {
    double eps = 1.0;       // rescaled bird index
    double pest = 0.3;      // pesticide-free yield-loss fraction
    double carrying = 1.0;  // carrying capacity of the logistic update
    double eps0 = 1.0;      // frozen baseline index
    double lbar0 = 0.0;     // frozen baseline mean farm size [ha]
    double pbar0_weighted = 0.0; // frozen land-weighted pesticide mean [kg/ha/yr]
    double pagg0_k = 0.0;   // frozen efficiency-weighted aggregate (k-variant)
};

/// One row of simulation output: everything the yearly loop reports.
/// Stock-like fields (eps, pest, carrying, mean_efficiency, the pesticide
/// aggregate, mean_yield) are the values in effect during the production of
/// `year`; census-like fields (n_active, farm sizes, land by class, leftover)
/// are end-of-year, after the land market settled.
struct YearFrame {
    int year = 0;
    double eps = 0.0;
    double pest = 0.0;
    double carrying = 0.0;
    double price = 0.0;
    double total_production = 0.0;
    double demand = 0.0;
    double n_active = 0.0;
    double mean_farm_size = 0.0;
    double weighted_pesticide_mean = 0.0;
    double mean_yield = 0.0;
    double mean_efficiency = 0.0;
    double mean_roi = 0.0;
    double mean_roi_small = 0.0;  // farms < 20 ha
    double mean_roi_medium = 0.0; // 20-100 ha
    double mean_roi_large = 0.0;  // > 100 ha
    double leftover_land = 0.0;
    double land_small = 0.0;
    double land_medium = 0.0;
    double land_large = 0.0;
    double subsidy_per_farmer = 0.0;  // flat payment per active farmer [EUR/yr]
    double subsidy_per_hectare = 0.0; // per-hectare pool rate [EUR/ha/yr]
};

struct FrameField {
    const char* name;
    double YearFrame::* member;
};

/// Field table used by CSV writers and replica averaging. Keep in sync with
/// YearFrame; `year` is handled separately as the row key.
inline const std::vector<FrameField>& frame_fields() {
    static const std::vector<FrameField> fields = {
        {"eps", &YearFrame::eps},
        {"pest", &YearFrame::pest},
        {"carrying", &YearFrame::carrying},
        {"price", &YearFrame::price},
        {"total_production", &YearFrame::total_production},
        {"demand", &YearFrame::demand},
        {"n_active", &YearFrame::n_active},
        {"mean_farm_size", &YearFrame::mean_farm_size},
        {"weighted_pesticide_mean", &YearFrame::weighted_pesticide_mean},
        {"mean_yield", &YearFrame::mean_yield},
        {"mean_efficiency", &YearFrame::mean_efficiency},
        {"mean_roi", &YearFrame::mean_roi},
        {"mean_roi_small", &YearFrame::mean_roi_small},
        {"mean_roi_medium", &YearFrame::mean_roi_medium},
        {"mean_roi_large", &YearFrame::mean_roi_large},
        {"leftover_land", &YearFrame::leftover_land},
        {"land_small", &YearFrame::land_small},
        {"land_medium", &YearFrame::land_medium},
        {"land_large", &YearFrame::land_large},
        {"subsidy_per_farmer", &YearFrame::subsidy_per_farmer},
        {"subsidy_per_hectare", &YearFrame::subsidy_per_hectare},
    };
    return fields;
}

/// Size-class boundaries used in reporting: small < 20 ha,
/// medium 20-100 ha, large > 100 ha.
enum class SizeClassKind { small, medium, large };

inline SizeClassKind size_class_of(double land_ha) {
    if (land_ha < 20.0) return SizeClassKind::small;
    if (land_ha > 100.0) return SizeClassKind::large;
    return SizeClassKind::medium;
}

/// One row of a structural census: a farm-size interval with its farm count
/// and total land. The 1990 rows double as the sampling histogram for
/// population initialization.
struct SizeClass {
    double low_ha = 0.0;
    double high_ha = 0.0;
    double count = 0.0;
    double total_land_ha = 0.0;
};

} // namespace agrisim
