// agrisim command-line front end: scenario runs, policy comparisons, the
// reallocation sweep, calibration, sensitivity analysis and chart rendering.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agrisim/calibration.hpp"
#include "agrisim/charts.hpp"
#include "agrisim/engine.hpp"
#include "agrisim/io.hpp"

namespace {

using namespace agrisim;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
    std::optional<std::string> out_dir;
    bool desk_scale = false;
    unsigned threads = 0;
};

RunConfig load_effective_config(const GlobalOptions& g) {
    std::string path = g.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar)) path = env;
        else path = "data/config/default.json";
    }
    RunConfig cfg = load_config(path);
    if (g.seed) cfg.engine.seed = *g.seed;
    if (g.replicas) cfg.engine.replicas = *g.replicas;
    if (g.out_dir) cfg.paths.output_dir = *g.out_dir;
    if (g.desk_scale) apply_desk_scale(cfg);
    cfg.validate();
    return cfg;
}

ScenarioRun run_one(const RunConfig& cfg, const ScenarioConfig& sc,
                    const ReferenceData& ref,
                    const std::vector<std::uint64_t>& seeds, unsigned threads) {
    return run_scenario(cfg.model, sc, ref.histogram, seeds, threads);
}

int cmd_run(const GlobalOptions& g, const std::string& scenario_name) {
    RunConfig cfg = load_effective_config(g);
    ScenarioConfig sc = cfg.scenario;
    if (!scenario_name.empty()) sc.kind = scenario_kind_from_string(scenario_name);
    auto ref = load_reference_data(cfg.paths.reference_dir);
    auto seeds = derive_seeds(cfg.engine.seed, cfg.engine.replicas);
    auto run = run_one(cfg, sc, ref, seeds, g.threads);
    RunConfig echo = cfg;
    echo.scenario = sc;
    write_results(run, to_string(sc.kind), echo, seeds, cfg.paths.output_dir);
    std::cout << "wrote " << to_string(sc.kind) << " results ("
              << run.replicas.size() << " replicas, years "
              << run.mean.front().year << "-" << run.mean.back().year
              << ") to " << cfg.paths.output_dir << "\n";
    return 0;
}

int cmd_compare(const GlobalOptions& g) {
    RunConfig cfg = load_effective_config(g);
    auto ref = load_reference_data(cfg.paths.reference_dir);
    auto seeds = derive_seeds(cfg.engine.seed, cfg.engine.replicas);
    std::vector<NamedSeries> series;
    for (ScenarioKind kind :
         {ScenarioKind::baseline, ScenarioKind::pesticide_reduction,
          ScenarioKind::flat_subsidy, ScenarioKind::combined}) {
        ScenarioConfig sc = cfg.scenario;
        sc.kind = kind;
        auto run = run_one(cfg, sc, ref, seeds, g.threads);
        RunConfig echo = cfg;
        echo.scenario = sc;
        write_results(run, to_string(kind), echo, seeds, cfg.paths.output_dir);
        series.push_back({to_string(kind), run.mean});
        std::cout << to_string(kind) << ": eps(" << run.mean.back().year
                  << ") = " << run.mean.back().eps << "\n";
    }
    std::filesystem::create_directories(cfg.paths.output_dir);
    std::string chart = cfg.paths.output_dir + "/scenarios.svg";
    render_scenario_chart(series, chart);
    std::cout << "wrote " << chart << "\n";
    return 0;
}

int cmd_sweep(const GlobalOptions& g, std::vector<double> thetas) {
    RunConfig cfg = load_effective_config(g);
    if (thetas.empty()) thetas = {0.0, 0.0005, 0.001, 0.002, 0.003, 0.005, 0.01};
    auto ref = load_reference_data(cfg.paths.reference_dir);
    auto seeds = derive_seeds(cfg.engine.seed, cfg.engine.replicas);
    auto rows = run_theta_sweep(cfg.model, cfg.scenario, thetas, ref.histogram,
                                seeds, g.threads);
    std::filesystem::create_directories(cfg.paths.output_dir);
    std::string table = cfg.paths.output_dir + "/theta_sweep.csv";
    std::ofstream out(table);
    out << "theta,subsidy_per_farmer,subsidy_per_hectare,eps,price,"
           "mean_farm_size,n_active\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      r.theta, r.subsidy_per_farmer, r.subsidy_per_hectare,
                      r.eps, r.price, r.mean_farm_size, r.n_active);
        out << buf;
    }
    out.close();
    render_sweep_chart(rows, cfg.paths.output_dir + "/theta_sweep.svg");
    std::cout << "wrote " << rows.size() << " sweep rows to " << table << "\n";
    return 0;
}

int cmd_calibrate(const GlobalOptions& g) {
    RunConfig cfg = load_effective_config(g);
    auto ref = load_reference_data(cfg.paths.reference_dir);
    auto result = calibrate(cfg.model, cfg.calibration, ref.series,
                            ref.histogram, cfg.engine.seed, g.threads);
    std::filesystem::create_directories(cfg.paths.output_dir);

    std::ofstream table(cfg.paths.output_dir + "/calibration_table.csv");
    table << "index";
    for (const auto& n : calibrated_parameter_names()) table << ',' << n;
    table << ",sse\n";
    for (std::size_t i = 0; i < result.evaluations.size(); ++i) {
        table << i;
        for (double v : result.evaluations[i].first) table << ',' << v;
        table << ',' << result.evaluations[i].second << '\n';
    }

    std::ofstream report(cfg.paths.output_dir + "/calibration_report.txt");
    auto write_report = [&](std::ostream& os) {
        os << "calibration over " << cfg.calibration.sobol_points
           << " sample points, " << cfg.calibration.replicas_per_point
           << " replicas each, window " << cfg.calibration.period_start << "-"
           << cfg.calibration.period_end << "\n";
        os << "best point (index " << result.best_index << "):\n";
        const auto& names = calibrated_parameter_names();
        for (std::size_t i = 0; i < names.size(); ++i)
            os << "  " << names[i] << " = " << result.best_point[i] << "\n";
        os << "sse = " << result.best_sse << "\n";
        os << "r_squared = " << result.best_stats.r2 << "\n";
        os << "adjusted_r_squared = " << result.best_stats.adj_r2 << "\n";
        os << "mean_efficiency_gain = " << result.best_stats.mean_efficiency_gain
           << "\n";
    };
    write_report(report);
    write_report(std::cout);
    return 0;
}

int cmd_sensitivity(const GlobalOptions& g) {
    RunConfig cfg = load_effective_config(g);
    auto ref = load_reference_data(cfg.paths.reference_dir);
    auto seeds = derive_seeds(cfg.engine.seed, cfg.engine.replicas);
    auto rows = sensitivity(cfg.model, cfg.scenario, ref.histogram, seeds, 2020,
                            g.threads);
    std::filesystem::create_directories(cfg.paths.output_dir);
    std::string path = cfg.paths.output_dir + "/sensitivity.csv";
    std::ofstream out(path);
    out << "param,eps_low,eps_high,pesticide_low,pesticide_high,"
           "farm_size_low,farm_size_high\n";
    for (const auto& r : rows)
        out << r.param << ',' << r.eps_low << ',' << r.eps_high << ','
            << r.pesticide_low << ',' << r.pesticide_high << ','
            << r.farm_size_low << ',' << r.farm_size_high << '\n';
    std::cout << "wrote " << path << "\n";
    for (const auto& r : rows)
        std::cout << r.param << ": spread(eps) = " << r.spread(0)
                  << ", spread(pesticide) = " << r.spread(1)
                  << ", spread(farm size) = " << r.spread(2) << "\n";
    return 0;
}

int cmd_plot(const GlobalOptions& g, const std::string& in_dir) {
    RunConfig cfg = load_effective_config(g);
    std::string dir = in_dir.empty() ? cfg.paths.output_dir : in_dir;
    std::vector<NamedSeries> series;
    for (const char* name :
         {"baseline", "pesticide_reduction", "flat_subsidy", "combined"}) {
        std::string path = dir + "/" + name + "_mean.csv";
        if (std::filesystem::exists(path))
            series.push_back({name, read_frames_csv(path)});
    }
    if (series.empty())
        throw std::invalid_argument("plot: no *_mean.csv files found in " + dir);
    std::string chart = dir + "/scenarios.svg";
    render_scenario_chart(series, chart);
    std::cout << "wrote " << chart << "\n";
    return 0;
}

int cmd_validate(const GlobalOptions& g) {
    RunConfig cfg = load_effective_config(g);
    (void)cfg;
    std::cout << "config OK\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"agrisim: farmland economy and biodiversity simulator"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_path,
                   "run-configuration file (default: $" +
                       std::string(agrisim::kConfigEnvVar) +
                       " or data/config/default.json)");
    std::uint64_t seed_opt = 0;
    auto* seed_flag = app.add_option("--seed", seed_opt, "base random seed");
    int replicas_opt = 0;
    auto* rep_flag =
        app.add_option("--replicas", replicas_opt, "Monte Carlo replicas");
    std::string out_opt;
    auto* out_flag = app.add_option("--out", out_opt, "output directory");
    app.add_flag("--desk-scale", g.desk_scale,
                 "run at 1/10 population and budget scale");
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");

    std::string scenario_name;
    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    run_cmd->fallthrough();
    run_cmd->add_option("--scenario", scenario_name,
                        "baseline|pesticide_reduction|flat_subsidy|combined");
    auto* compare_cmd =
        app.add_subcommand("compare", "run all four scenarios with shared seeds");
    compare_cmd->fallthrough();
    std::vector<double> thetas;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "combined-policy reallocation sweep");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--thetas", thetas, "reallocation fractions");
    auto* calibrate_cmd =
        app.add_subcommand("calibrate", "quasi-random parameter search");
    calibrate_cmd->fallthrough();
    auto* sensitivity_cmd =
        app.add_subcommand("sensitivity", "plus/minus 50% parameter perturbations");
    sensitivity_cmd->fallthrough();
    std::string plot_in;
    auto* plot_cmd = app.add_subcommand("plot", "render charts from stored results");
    plot_cmd->fallthrough();
    plot_cmd->add_option("--in", plot_in, "directory with *_mean.csv files");
    auto* validate_cmd =
        app.add_subcommand("validate-config", "parse and validate the config");
    validate_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*seed_flag) g.seed = seed_opt;
    if (*rep_flag) g.replicas = replicas_opt;
    if (*out_flag) g.out_dir = out_opt;

    try {
        if (*run_cmd) return cmd_run(g, scenario_name);
        if (*compare_cmd) return cmd_compare(g);
        if (*sweep_cmd) return cmd_sweep(g, thetas);
        if (*calibrate_cmd) return cmd_calibrate(g);
        if (*sensitivity_cmd) return cmd_sensitivity(g);
        if (*plot_cmd) return cmd_plot(g, plot_in);
        if (*validate_cmd) return cmd_validate(g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
