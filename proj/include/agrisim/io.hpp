#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "calibration.hpp"
#include "engine.hpp"
#include "policy.hpp"
#include "types.hpp"

namespace agrisim {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kConfigEnvVar = "AGRISIM_CONFIG";

struct EngineConfig {
    std::uint64_t seed = 42;
    int replicas = 10;

    void validate() const {
        if (replicas <= 0)
            throw std::invalid_argument("EngineConfig: replicas must be > 0");
    }
};

struct PathsConfig {
    std::string reference_dir = "data/reference";
    std::string output_dir = "out";
};

/// Complete run configuration: model constants, the scenario, engine and
/// calibration settings, and data locations. Parsing is strict: unknown
/// keys anywhere are rejected.
struct RunConfig {
    ModelParams model;
    ScenarioConfig scenario;
    EngineConfig engine;
    CalibrationSpec calibration;
    PathsConfig paths;

    void validate() const {
        model.validate();
        scenario.validate();
        engine.validate();
        calibration.validate();
    }
};

/// Scales the population and every budget tied to it by 1/10 for quick
/// desk-scale runs; intensive parameters are untouched. Also trims the
/// sampling plan to the desk default.
inline void apply_desk_scale(RunConfig& cfg) {
    cfg.model.n0 /= 10;
    cfg.model.l0_total /= 10.0;
    cfg.model.s_total /= 10.0;
    cfg.model.demand /= 10.0;
    cfg.calibration.sobol_points = std::min(cfg.calibration.sobol_points, 256);
}

namespace detail {

inline void expect_keys(const json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("config: unknown key \"" + it.key() +
                                        "\" in " + where);
    }
}

template <typename T>
void get_if_present(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

} // namespace detail

inline json to_json(const ModelParams& m) {
    return json{{"n0", m.n0},
                {"l0_total", m.l0_total},
                {"p_bar0", m.p_bar0},
                {"y_bar0", m.y_bar0},
                {"pi0", m.pi0},
                {"r0", m.r0},
                {"demand", m.demand},
                {"r_eps", m.r_eps},
                {"mu", m.mu},
                {"a", m.a},
                {"k", m.k},
                {"y_max", m.y_max},
                {"p_ref_pesticide", m.p_ref_pesticide},
                {"xi_std", m.xi_std},
                {"alpha", m.alpha},
                {"p_pesticide", m.p_pesticide},
                {"c_op", m.c_op},
                {"c_nonop", m.c_nonop},
                {"b", m.b},
                {"s_total", m.s_total},
                {"eta", m.eta},
                {"profit_ref", m.profit_ref},
                {"upsilon_max", m.upsilon_max},
                {"beta", m.beta},
                {"r_ref", m.r_ref},
                {"gamma", m.gamma},
                {"lambda", m.lambda},
                {"eps_floor", m.eps_floor},
                {"start_year", m.start_year},
                {"end_year", m.end_year}};
}

inline ModelParams model_params_from_json(const json& j) {
    detail::expect_keys(
        j, "model",
        {"n0", "l0_total", "p_bar0", "y_bar0", "pi0", "r0", "demand", "r_eps",
         "mu", "a", "k", "y_max", "p_ref_pesticide", "xi_std", "alpha",
         "p_pesticide", "c_op", "c_nonop", "b", "s_total", "eta", "profit_ref",
         "upsilon_max", "beta", "r_ref", "gamma", "lambda", "eps_floor",
         "start_year", "end_year"});
    ModelParams m;
    detail::get_if_present(j, "n0", m.n0);
    detail::get_if_present(j, "l0_total", m.l0_total);
    detail::get_if_present(j, "p_bar0", m.p_bar0);
    detail::get_if_present(j, "y_bar0", m.y_bar0);
    detail::get_if_present(j, "pi0", m.pi0);
    detail::get_if_present(j, "r0", m.r0);
    detail::get_if_present(j, "demand", m.demand);
    detail::get_if_present(j, "r_eps", m.r_eps);
    detail::get_if_present(j, "mu", m.mu);
    detail::get_if_present(j, "a", m.a);
    detail::get_if_present(j, "k", m.k);
    detail::get_if_present(j, "y_max", m.y_max);
    detail::get_if_present(j, "p_ref_pesticide", m.p_ref_pesticide);
    detail::get_if_present(j, "xi_std", m.xi_std);
    detail::get_if_present(j, "alpha", m.alpha);
    detail::get_if_present(j, "p_pesticide", m.p_pesticide);
    detail::get_if_present(j, "c_op", m.c_op);
    detail::get_if_present(j, "c_nonop", m.c_nonop);
    detail::get_if_present(j, "b", m.b);
    detail::get_if_present(j, "s_total", m.s_total);
    detail::get_if_present(j, "eta", m.eta);
    detail::get_if_present(j, "profit_ref", m.profit_ref);
    detail::get_if_present(j, "upsilon_max", m.upsilon_max);
    detail::get_if_present(j, "beta", m.beta);
    detail::get_if_present(j, "r_ref", m.r_ref);
    detail::get_if_present(j, "gamma", m.gamma);
    detail::get_if_present(j, "lambda", m.lambda);
    detail::get_if_present(j, "eps_floor", m.eps_floor);
    detail::get_if_present(j, "start_year", m.start_year);
    detail::get_if_present(j, "end_year", m.end_year);
    return m;
}

inline json to_json(const ScenarioConfig& s) {
    json overrides = json::object();
    if (s.a_override) overrides["a"] = *s.a_override;
    if (s.k_override) overrides["k"] = *s.k_override;
    if (s.mu_override) overrides["mu"] = *s.mu_override;
    if (s.eta_override) overrides["eta"] = *s.eta_override;
    return json{{"kind", to_string(s.kind)},
                {"ramp_start_year", s.ramp_start_year},
                {"ramp_end_year", s.ramp_end_year},
                {"reduction_fraction", s.reduction_fraction},
                {"flat_amount", s.flat_amount},
                {"theta", s.theta},
                {"overrides", overrides},
                {"literal_ramp_rule", s.literal_ramp_rule},
                {"literal_rationing_rule", s.literal_rationing_rule}};
}

inline ScenarioConfig scenario_from_json(const json& j) {
    detail::expect_keys(j, "scenario",
                        {"kind", "ramp_start_year", "ramp_end_year",
                         "reduction_fraction", "flat_amount", "theta",
                         "overrides", "literal_ramp_rule",
                         "literal_rationing_rule"});
    ScenarioConfig s;
    if (j.contains("kind"))
        s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    detail::get_if_present(j, "ramp_start_year", s.ramp_start_year);
    detail::get_if_present(j, "ramp_end_year", s.ramp_end_year);
    detail::get_if_present(j, "reduction_fraction", s.reduction_fraction);
    detail::get_if_present(j, "flat_amount", s.flat_amount);
    detail::get_if_present(j, "theta", s.theta);
    detail::get_if_present(j, "literal_ramp_rule", s.literal_ramp_rule);
    detail::get_if_present(j, "literal_rationing_rule",
                           s.literal_rationing_rule);
    if (j.contains("overrides")) {
        const json& o = j.at("overrides");
        detail::expect_keys(o, "scenario.overrides", {"a", "k", "mu", "eta"});
        if (o.contains("a")) s.a_override = o.at("a").get<double>();
        if (o.contains("k")) s.k_override = o.at("k").get<double>();
        if (o.contains("mu")) s.mu_override = o.at("mu").get<double>();
        if (o.contains("eta")) s.eta_override = o.at("eta").get<double>();
    }
    return s;
}

inline json to_json(const CalibrationSpec& c) {
    json ranges = json::object();
    const auto& names = calibrated_parameter_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        ranges[names[i]] = json::array({c.ranges[i].first, c.ranges[i].second});
    return json{{"sobol_points", c.sobol_points},
                {"replicas_per_point", c.replicas_per_point},
                {"period", json::array({c.period_start, c.period_end})},
                {"normalization", to_string(c.normalization)},
                {"ranges", ranges}};
}

inline CalibrationSpec calibration_from_json(const json& j) {
    detail::expect_keys(j, "calibration",
                        {"sobol_points", "replicas_per_point", "period",
                         "normalization", "ranges"});
    CalibrationSpec c;
    detail::get_if_present(j, "sobol_points", c.sobol_points);
    detail::get_if_present(j, "replicas_per_point", c.replicas_per_point);
    if (j.contains("period")) {
        const json& p = j.at("period");
        if (!p.is_array() || p.size() != 2)
            throw std::invalid_argument("config: calibration.period must be [start, end]");
        c.period_start = p[0].get<int>();
        c.period_end = p[1].get<int>();
    }
    if (j.contains("normalization"))
        c.normalization =
            normalization_from_string(j.at("normalization").get<std::string>());
    if (j.contains("ranges")) {
        const json& r = j.at("ranges");
        const auto& names = calibrated_parameter_names();
        for (auto it = r.begin(); it != r.end(); ++it) {
            bool known = false;
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (it.key() == names[i]) {
                    const json& pr = it.value();
                    if (!pr.is_array() || pr.size() != 2)
                        throw std::invalid_argument(
                            "config: range for " + it.key() +
                            " must be [low, high]");
                    c.ranges[i] = {pr[0].get<double>(), pr[1].get<double>()};
                    known = true;
                    break;
                }
            }
            if (!known)
                throw std::invalid_argument(
                    "config: unknown key \"" + it.key() + "\" in calibration.ranges");
        }
    }
    return c;
}

inline json to_json(const RunConfig& cfg) {
    return json{{"model", to_json(cfg.model)},
                {"scenario", to_json(cfg.scenario)},
                {"engine", json{{"seed", cfg.engine.seed},
                                {"replicas", cfg.engine.replicas}}},
                {"calibration", to_json(cfg.calibration)},
                {"paths", json{{"reference_dir", cfg.paths.reference_dir},
                               {"output_dir", cfg.paths.output_dir}}}};
}

inline RunConfig config_from_json(const json& j) {
    detail::expect_keys(j, "config root",
                        {"model", "scenario", "engine", "calibration", "paths"});
    RunConfig cfg;
    if (j.contains("model")) cfg.model = model_params_from_json(j.at("model"));
    if (j.contains("scenario"))
        cfg.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("engine")) {
        const json& e = j.at("engine");
        detail::expect_keys(e, "engine", {"seed", "replicas"});
        detail::get_if_present(e, "seed", cfg.engine.seed);
        detail::get_if_present(e, "replicas", cfg.engine.replicas);
    }
    if (j.contains("calibration"))
        cfg.calibration = calibration_from_json(j.at("calibration"));
    if (j.contains("paths")) {
        const json& p = j.at("paths");
        detail::expect_keys(p, "paths", {"reference_dir", "output_dir"});
        detail::get_if_present(p, "reference_dir", cfg.paths.reference_dir);
        detail::get_if_present(p, "output_dir", cfg.paths.output_dir);
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " +
                                    e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// reference data

struct ReferenceData {
    ReferenceSeries series;
    std::vector<SizeClass> histogram; // first census year's classes
};

namespace detail {

struct CsvRow {
    std::vector<std::string> cells;
    int line = 0;
};

inline std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                                    std::size_t expected_cols) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("missing reference file: " + path.string());
    std::vector<CsvRow> rows;
    std::string line;
    int lineno = 0;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped) {
            header_skipped = true; // first non-comment line is the header
            continue;
        }
        CsvRow row;
        row.line = lineno;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.cells.push_back(cell);
        if (row.cells.size() != expected_cols)
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(lineno) +
                                        ": expected " +
                                        std::to_string(expected_cols) +
                                        " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::invalid_argument(path.string() + ": no data rows");
    return rows;
}

inline double parse_number(const std::string& cell,
                           const std::filesystem::path& path, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line) +
                                    ": malformed number \"" + cell + "\"");
    }
}

inline std::vector<std::pair<int, double>> read_year_series(
    const std::filesystem::path& path, bool require_positive) {
    auto rows = read_csv(path, 2);
    std::vector<std::pair<int, double>> out;
    int prev_year = std::numeric_limits<int>::min();
    for (const auto& r : rows) {
        int year = static_cast<int>(parse_number(r.cells[0], path, r.line));
        double value = parse_number(r.cells[1], path, r.line);
        if (year <= prev_year)
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(r.line) +
                                        ": years must be strictly increasing");
        if (require_positive && value <= 0.0)
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(r.line) +
                                        ": value must be positive");
        prev_year = year;
        out.emplace_back(year, value);
    }
    return out;
}

inline std::vector<double> dense_window(
    const std::vector<std::pair<int, double>>& obs, int year_start,
    int year_end, const std::string& name) {
    auto dense = obs.size() == 1 ? obs : interpolate_structural(obs);
    std::map<int, double> lookup(dense.begin(), dense.end());
    std::vector<double> out;
    for (int y = year_start; y <= year_end; ++y) {
        auto it = lookup.find(y);
        if (it == lookup.end())
            throw std::invalid_argument("reference series " + name +
                                        " does not cover year " +
                                        std::to_string(y));
        out.push_back(it->second);
    }
    return out;
}

} // namespace detail

/// Loads the documented fixture files from a directory:
///   bird_index.csv        year,value
///   pesticide.csv         year,kg_per_ha
///   price_index.csv       year,index
///   yield.csv             year,t_per_ha
///   structural_census.csv year,size_class_low_ha,size_class_high_ha,
///                         farm_count,total_land_ha
/// Census years are linearly interpolated to yearly series; the first census
/// year's rows become the initialization histogram.
inline ReferenceData load_reference_data(const std::string& directory) {
    namespace fs = std::filesystem;
    fs::path dir(directory);
    auto bird = detail::read_year_series(dir / "bird_index.csv", true);
    auto pesticide = detail::read_year_series(dir / "pesticide.csv", true);
    auto price = detail::read_year_series(dir / "price_index.csv", true);
    auto yield_obs = detail::read_year_series(dir / "yield.csv", true);

    fs::path census_path = dir / "structural_census.csv";
    auto rows = detail::read_csv(census_path, 5);
    std::map<int, std::vector<SizeClass>> census;
    int prev_year = std::numeric_limits<int>::min();
    for (const auto& r : rows) {
        int year = static_cast<int>(detail::parse_number(r.cells[0], census_path, r.line));
        SizeClass c;
        c.low_ha = detail::parse_number(r.cells[1], census_path, r.line);
        c.high_ha = detail::parse_number(r.cells[2], census_path, r.line);
        c.count = detail::parse_number(r.cells[3], census_path, r.line);
        c.total_land_ha = detail::parse_number(r.cells[4], census_path, r.line);
        if (year < prev_year)
            throw std::invalid_argument(census_path.string() + ":" +
                                        std::to_string(r.line) +
                                        ": census years must be grouped and "
                                        "non-decreasing");
        if (c.low_ha < 0.0 || c.high_ha <= c.low_ha)
            throw std::invalid_argument(census_path.string() + ":" +
                                        std::to_string(r.line) +
                                        ": malformed size-class interval");
        if (c.count < 0.0 || c.total_land_ha < 0.0)
            throw std::invalid_argument(census_path.string() + ":" +
                                        std::to_string(r.line) +
                                        ": counts and land must be non-negative");
        prev_year = year;
        census[year].push_back(c);
    }
    if (census.size() < 2)
        throw std::invalid_argument(census_path.string() +
                                    ": need at least two census years");

    std::vector<std::pair<int, double>> count_obs, small_obs, medium_obs,
        large_obs, size_obs;
    for (const auto& [year, classes] : census) {
        double count = 0.0, land = 0.0, small = 0.0, medium = 0.0, large = 0.0;
        for (const auto& c : classes) {
            count += c.count;
            land += c.total_land_ha;
            double mid = 0.5 * (c.low_ha + c.high_ha);
            switch (size_class_of(mid)) {
                case SizeClassKind::small: small += c.total_land_ha; break;
                case SizeClassKind::medium: medium += c.total_land_ha; break;
                case SizeClassKind::large: large += c.total_land_ha; break;
            }
        }
        count_obs.emplace_back(year, count);
        small_obs.emplace_back(year, small);
        medium_obs.emplace_back(year, medium);
        large_obs.emplace_back(year, large);
        size_obs.emplace_back(year, land / count);
    }

    int year_start = bird.front().first;
    int year_end = bird.back().first;
    ReferenceData out;
    out.series.year_start = year_start;
    out.series.biodiversity = detail::dense_window(bird, year_start, year_end, "bird_index");
    out.series.pesticide = detail::dense_window(pesticide, year_start, year_end, "pesticide");
    out.series.price_index = detail::dense_window(price, year_start, year_end, "price_index");
    out.series.yield_t = detail::dense_window(yield_obs, year_start, year_end, "yield");
    out.series.farmer_count = detail::dense_window(count_obs, year_start, year_end, "farmer_count");
    out.series.land_small = detail::dense_window(small_obs, year_start, year_end, "land_small");
    out.series.land_medium = detail::dense_window(medium_obs, year_start, year_end, "land_medium");
    out.series.land_large = detail::dense_window(large_obs, year_start, year_end, "land_large");
    out.series.mean_farm_size = detail::dense_window(size_obs, year_start, year_end, "mean_farm_size");
    out.series.validate();
    out.histogram = census.begin()->second;
    return out;
}

// ---------------------------------------------------------------------------
// results

namespace detail {

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_frames_csv(const std::filesystem::path& path,
                             const std::vector<YearFrame>& frames) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "year";
    for (const auto& f : frame_fields()) out << ',' << f.name;
    out << '\n';
    for (const auto& fr : frames) {
        out << fr.year;
        for (const auto& f : frame_fields())
            out << ',' << format_value(fr.*(f.member));
        out << '\n';
    }
}

} // namespace detail

/// Writes one scenario's outputs under `out_dir`: per-replica frame tables,
/// the Monte Carlo mean and standard error tables, and a manifest echoing
/// the configuration and seeds. Output bytes depend only on the inputs.
inline void write_results(const ScenarioRun& run, const std::string& scenario_name,
                          const RunConfig& cfg,
                          const std::vector<std::uint64_t>& seeds,
                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    if (run.mean.empty())
        throw std::invalid_argument("write_results: no frames to write");
    fs::path dir(out_dir);
    fs::create_directories(dir);
    for (std::size_t i = 0; i < run.replicas.size(); ++i)
        detail::write_frames_csv(
            dir / (scenario_name + "_replica" + std::to_string(i) + ".csv"),
            run.replicas[i].frames);
    detail::write_frames_csv(dir / (scenario_name + "_mean.csv"), run.mean);
    detail::write_frames_csv(dir / (scenario_name + "_se.csv"), run.stderror);

    json manifest;
    manifest["version"] = kVersion;
    manifest["scenario"] = scenario_name;
    manifest["seeds"] = seeds;
    manifest["collapsed_replicas"] = json::array();
    for (std::size_t i = 0; i < run.replicas.size(); ++i)
        if (run.replicas[i].collapsed)
            manifest["collapsed_replicas"].push_back(i);
    manifest["config"] = to_json(cfg);
    std::ofstream mout(dir / (scenario_name + "_manifest.json"));
    if (!mout)
        throw std::runtime_error("cannot write manifest in " + out_dir);
    mout << manifest.dump(2) << '\n';
}

/// Reads a frame table previously written by write_results.
inline std::vector<YearFrame> read_frames_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument(path + ": empty file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.empty() || header[0] != "year")
        throw std::invalid_argument(path + ": unexpected header");
    std::vector<YearFrame> frames;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ','))
            values.push_back(detail::parse_number(cell, path, lineno));
        if (values.size() != header.size())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": column count mismatch");
        YearFrame fr;
        fr.year = static_cast<int>(values[0]);
        for (std::size_t c = 1; c < header.size(); ++c) {
            for (const auto& f : frame_fields()) {
                if (header[c] == f.name) {
                    fr.*(f.member) = values[c];
                    break;
                }
            }
        }
        frames.push_back(fr);
    }
    return frames;
}

} // namespace agrisim
