#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "economy.hpp"
#include "types.hpp"

namespace agrisim {

enum class ScenarioKind { baseline, pesticide_reduction, flat_subsidy, combined };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::baseline: return "baseline";
        case ScenarioKind::pesticide_reduction: return "pesticide_reduction";
        case ScenarioKind::flat_subsidy: return "flat_subsidy";
        case ScenarioKind::combined: return "combined";
    }
    return "baseline";
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "baseline") return ScenarioKind::baseline;
    if (s == "pesticide_reduction") return ScenarioKind::pesticide_reduction;
    if (s == "flat_subsidy") return ScenarioKind::flat_subsidy;
    if (s == "combined") return ScenarioKind::combined;
    throw std::invalid_argument("unknown scenario kind: " + s);
}

/// A policy experiment: which intervention runs, its schedule, and optional
/// parameter overrides for the model variants (pest-feedback exponent a,
/// technology exponent k with re-estimated mu, re-estimated eta).
///
/// All interventions start at ramp_start_year; the pesticide cap descends
/// linearly until ramp_end_year and stays at the reduced level afterwards.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::baseline;
    int ramp_start_year = 2022;
    int ramp_end_year = 2030;
    double reduction_fraction = 0.5; // fraction of the pre-ramp rate cut away
    double flat_amount = 200.0;      // per-farmer coupon [EUR/yr]
    double theta = 0.003;            // reallocated fraction of the subsidy pool

    std::optional<double> a_override;
    std::optional<double> k_override;
    std::optional<double> mu_override;
    std::optional<double> eta_override;

    // comparison switches for alternative literal forms of the ramp and the
    // rationing ratio; production runs leave both off
    bool literal_ramp_rule = false;
    bool literal_rationing_rule = false;

    int policy_start_year() const { return ramp_start_year; }

    bool has_pesticide_cap() const {
        return kind == ScenarioKind::pesticide_reduction ||
               kind == ScenarioKind::combined;
    }

    void validate() const {
        if (ramp_start_year >= ramp_end_year)
            throw std::invalid_argument(
                "ScenarioConfig: ramp_start_year must be < ramp_end_year");
        if (reduction_fraction <= 0.0 || reduction_fraction > 1.0)
            throw std::invalid_argument(
                "ScenarioConfig: reduction_fraction must be in (0,1]");
        if (theta < 0.0 || theta >= 1.0)
            throw std::invalid_argument(
                "ScenarioConfig: theta must be in [0,1)");
        if (flat_amount < 0.0)
            throw std::invalid_argument(
                "ScenarioConfig: flat_amount must be >= 0");
    }

    void apply_overrides(ModelParams& p) const {
        if (a_override) p.a = *a_override;
        if (k_override) p.k = *k_override;
        if (mu_override) p.mu = *mu_override;
        if (eta_override) p.eta = *eta_override;
    }
};

/// Pesticide cap in effect for `year`, anchored to the farmer's rate frozen
/// the year before the ramp starts. Descends linearly from that rate to
/// (1 - reduction_fraction) of it at ramp end, constant afterwards. Absent
/// before the ramp and for scenarios without a pesticide mandate.
///
/// The literal-rule flag swaps in the alternative ascending schedule, which
/// scales the frozen rate by the elapsed ramp fraction itself.
inline std::optional<double> pesticide_cap(const ScenarioConfig& sc,
                                           double frozen_rate, int year) {
    if (!sc.has_pesticide_cap() || year < sc.ramp_start_year)
        return std::nullopt;
    if (sc.literal_ramp_rule) {
        double frac = static_cast<double>(year - (sc.ramp_start_year - 1)) /
                      static_cast<double>(sc.ramp_end_year -
                                          (sc.ramp_start_year - 1));
        return frozen_rate * std::clamp(frac, 0.0, 1.0);
    }
    double frac = static_cast<double>(year - sc.ramp_start_year) /
                  static_cast<double>(sc.ramp_end_year - sc.ramp_start_year);
    return frozen_rate *
           (1.0 - sc.reduction_fraction * std::clamp(frac, 0.0, 1.0));
}

/// Subsidy scheme in effect for `year`. The per-hectare pool plus the flat
/// pot always sum to the budget under reallocation: the coupon scheme adds
/// new money, the combined scheme only shifts existing money.
inline SubsidyTerms subsidy_terms(const ScenarioConfig& sc,
                                  const ModelParams& p, long n_active,
                                  int year) {
    if (year < sc.policy_start_year()) return {p.s_total, 0.0};
    switch (sc.kind) {
        case ScenarioKind::baseline:
        case ScenarioKind::pesticide_reduction:
            return {p.s_total, 0.0};
        case ScenarioKind::flat_subsidy:
            return {p.s_total, sc.flat_amount};
        case ScenarioKind::combined:
            if (n_active <= 0)
                throw std::invalid_argument(
                    "subsidy_terms: combined scheme needs active farmers");
            return {(1.0 - sc.theta) * p.s_total,
                    sc.theta * p.s_total / static_cast<double>(n_active)};
    }
    return {p.s_total, 0.0};
}

} // namespace agrisim
