#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "engine.hpp"
#include "types.hpp"

namespace agrisim {

/// Minimal self-contained SVG line-chart writer for the simulator's two
/// report layouts. No external renderer; output is plain SVG 1.1.
namespace svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::vector<Series> series;
    double shade_x0 = 0.0, shade_x1 = 0.0; // shaded x-band (off when equal)
};

inline const std::vector<std::string>& palette() {
    // legend order: baseline, pesticide reduction, flat subsidy, combined
    static const std::vector<std::string> colors = {
        "#1f4e9c", "#e07b27", "#2e8b57", "#7b4a2d",
        "#9467bd", "#8c564b", "#17becf"};
    return colors;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Rounds a raw interval to a tick-friendly step (1/2/5 ladder).
inline double nice_step(double span, int target_ticks) {
    double raw = span / std::max(1, target_ticks);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

inline void render_grid(std::ofstream& out, const std::vector<Panel>& panels,
                        int columns, int panel_w, int panel_h,
                        const std::vector<std::string>& legend) {
    int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
    const int margin_left = 52, margin_bottom = 34, margin_top = 26,
              margin_right = 12;
    const int legend_h = legend.empty() ? 8 : 26;
    int width = columns * panel_w;
    int height = rows * panel_h + legend_h;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
        << " " << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& panel = panels[pi];
        int col = static_cast<int>(pi) % columns;
        int row = static_cast<int>(pi) / columns;
        double ox = col * panel_w + margin_left;
        double oy = row * panel_h + margin_top;
        double plot_w = panel_w - margin_left - margin_right;
        double plot_h = panel_h - margin_top - margin_bottom;

        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& s : panel.series) {
            for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
            for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
        }
        if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
        if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }
        double ypad = 0.06 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;
        auto sx = [&](double v) { return ox + (v - xmin) / (xmax - xmin) * plot_w; };
        auto sy = [&](double v) { return oy + plot_h - (v - ymin) / (ymax - ymin) * plot_h; };

        if (panel.shade_x1 > panel.shade_x0) {
            double a = std::max(xmin, panel.shade_x0);
            double b = std::min(xmax, panel.shade_x1);
            if (b > a)
                out << "<rect x=\"" << fmt(sx(a)) << "\" y=\"" << fmt(oy)
                    << "\" width=\"" << fmt(sx(b) - sx(a)) << "\" height=\""
                    << fmt(plot_h) << "\" fill=\"#d8d8d8\" opacity=\"0.5\"/>\n";
        }

        out << "<rect x=\"" << fmt(ox) << "\" y=\"" << fmt(oy) << "\" width=\""
            << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
            << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt(ox + plot_w / 2) << "\" y=\"" << fmt(oy - 8)
            << "\" font-family=\"sans-serif\" font-size=\"12\" "
               "text-anchor=\"middle\">"
            << panel.title << "</text>\n";

        double xstep = nice_step(xmax - xmin, 5);
        for (double tx = std::ceil(xmin / xstep) * xstep; tx <= xmax + 1e-9;
             tx += xstep) {
            out << "<line x1=\"" << fmt(sx(tx)) << "\" y1=\"" << fmt(oy + plot_h)
                << "\" x2=\"" << fmt(sx(tx)) << "\" y2=\""
                << fmt(oy + plot_h + 4) << "\" stroke=\"#444\"/>\n"
                << "<text x=\"" << fmt(sx(tx)) << "\" y=\""
                << fmt(oy + plot_h + 16)
                << "\" font-family=\"sans-serif\" font-size=\"9\" "
                   "text-anchor=\"middle\">"
                << fmt(tx) << "</text>\n";
        }
        double ystep = nice_step(ymax - ymin, 4);
        for (double ty = std::ceil(ymin / ystep) * ystep; ty <= ymax + 1e-9;
             ty += ystep) {
            out << "<line x1=\"" << fmt(ox - 4) << "\" y1=\"" << fmt(sy(ty))
                << "\" x2=\"" << fmt(ox) << "\" y2=\"" << fmt(sy(ty))
                << "\" stroke=\"#444\"/>\n"
                << "<text x=\"" << fmt(ox - 6) << "\" y=\"" << fmt(sy(ty) + 3)
                << "\" font-family=\"sans-serif\" font-size=\"9\" "
                   "text-anchor=\"end\">"
                << fmt(ty) << "</text>\n";
        }

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const auto& s = panel.series[si];
            const std::string& color = palette()[si % palette().size()];
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i])) << ' ';
            out << "\"/>\n";
        }
    }

    if (!legend.empty()) {
        double lx = 16;
        double ly = rows * panel_h + legend_h - 9;
        for (std::size_t i = 0; i < legend.size(); ++i) {
            const std::string& color = palette()[i % palette().size()];
            out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4)
                << "\" x2=\"" << fmt(lx + 22) << "\" y2=\"" << fmt(ly - 4)
                << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << fmt(lx + 27) << "\" y=\"" << fmt(ly)
                << "\" font-family=\"sans-serif\" font-size=\"11\">"
                << legend[i] << "</text>\n";
            lx += 34.0 + 7.2 * static_cast<double>(legend[i].size());
        }
    }
    out << "</svg>\n";
}

} // namespace svg

struct NamedSeries {
    std::string name;
    std::vector<YearFrame> mean_frames;
};

/// Renders the nine-panel scenario overview (biodiversity, price index,
/// mean farm size, pesticide, production vs demand, farmer count, ROI,
/// efficiency, yield), one curve per scenario, calibration window shaded.
inline void render_scenario_chart(const std::vector<NamedSeries>& scenarios,
                                  const std::string& path,
                                  int calib_start = 1990,
                                  int calib_end = 2021) {
    if (scenarios.empty())
        throw std::invalid_argument("render_scenario_chart: no scenarios");
    const auto& first = scenarios.front().mean_frames;
    if (first.empty())
        throw std::invalid_argument("render_scenario_chart: empty series");
    for (const auto& s : scenarios)
        if (s.mean_frames.empty() ||
            s.mean_frames.front().year != first.front().year ||
            s.mean_frames.back().year != first.back().year)
            throw std::invalid_argument(
                "render_scenario_chart: scenarios cover different year ranges");

    auto years = [&](const NamedSeries& s) {
        std::vector<double> x;
        for (const auto& f : s.mean_frames) x.push_back(f.year);
        return x;
    };
    auto field = [&](const NamedSeries& s, double YearFrame::* m) {
        std::vector<double> y;
        for (const auto& f : s.mean_frames) y.push_back(f.*m);
        return y;
    };

    std::vector<svg::Panel> panels;
    auto add_panel = [&](const std::string& title, double YearFrame::* m) {
        svg::Panel p;
        p.title = title;
        p.shade_x0 = calib_start;
        p.shade_x1 = calib_end;
        for (const auto& s : scenarios)
            p.series.push_back({s.name, years(s), field(s, m)});
        panels.push_back(std::move(p));
    };

    add_panel("biodiversity index", &YearFrame::eps);
    {
        svg::Panel p;
        p.title = "price index (start = 100)";
        p.shade_x0 = calib_start;
        p.shade_x1 = calib_end;
        for (const auto& s : scenarios) {
            auto y = field(s, &YearFrame::price);
            double base = y.front();
            for (double& v : y) v = 100.0 * v / base;
            p.series.push_back({s.name, years(s), std::move(y)});
        }
        panels.push_back(std::move(p));
    }
    add_panel("mean farm size [ha]", &YearFrame::mean_farm_size);
    add_panel("mean pesticide use [kg/ha]", &YearFrame::weighted_pesticide_mean);
    {
        svg::Panel p;
        p.title = "production vs demand [t]";
        p.shade_x0 = calib_start;
        p.shade_x1 = calib_end;
        for (const auto& s : scenarios)
            p.series.push_back({s.name, years(s), field(s, &YearFrame::total_production)});
        p.series.push_back({"demand", years(scenarios.front()),
                            field(scenarios.front(), &YearFrame::demand)});
        panels.push_back(std::move(p));
    }
    add_panel("active farmers", &YearFrame::n_active);
    add_panel("mean return on investment", &YearFrame::mean_roi);
    add_panel("mean efficiency", &YearFrame::mean_efficiency);
    add_panel("mean yield [t/ha]", &YearFrame::mean_yield);

    std::vector<std::string> legend;
    for (const auto& s : scenarios) legend.push_back(s.name);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write chart file: " + path);
    svg::render_grid(out, panels, 3, 320, 220, legend);
}

/// Renders the six-panel reallocation sweep: end-of-horizon outcomes versus
/// the reallocated share of the subsidy pool.
inline void render_sweep_chart(const std::vector<SweepRow>& rows,
                               const std::string& path) {
    if (rows.size() < 2)
        throw std::invalid_argument("render_sweep_chart: need at least 2 rows");
    std::vector<double> x;
    for (const auto& r : rows) x.push_back(100.0 * r.theta);
    auto panel = [&](const std::string& title, auto getter) {
        svg::Panel p;
        p.title = title;
        svg::Series s;
        s.label = title;
        s.x = x;
        for (const auto& r : rows) s.y.push_back(getter(r));
        p.series.push_back(std::move(s));
        return p;
    };
    std::vector<svg::Panel> panels;
    panels.push_back(panel("subsidy per farmer [EUR]",
                           [](const SweepRow& r) { return r.subsidy_per_farmer; }));
    panels.push_back(panel("subsidy per hectare [EUR/ha]",
                           [](const SweepRow& r) { return r.subsidy_per_hectare; }));
    panels.push_back(panel("biodiversity index",
                           [](const SweepRow& r) { return r.eps; }));
    panels.push_back(panel("market price [EUR/t]",
                           [](const SweepRow& r) { return r.price; }));
    panels.push_back(panel("mean farm size [ha]",
                           [](const SweepRow& r) { return r.mean_farm_size; }));
    panels.push_back(panel("active farmers",
                           [](const SweepRow& r) { return r.n_active; }));

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write chart file: " + path);
    svg::render_grid(out, panels, 3, 320, 220,
                     {"reallocation sweep (x: % of pool reallocated)"});
}

} // namespace agrisim
