// The three plot types, rendered straight to SVG files: a measured-versus-
// predicted scatter, forecast trajectories laid over the CGM trace, and a
// close-up of a single prediction origin with its meal and insulin events.
// Glucose values are converted to the display unit at the last moment; all
// geometry is a pure function of the inputs, so rendering twice gives
// byte-identical files.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "glucast/core/errors.hpp"
#include "glucast/core/frame.hpp"
#include "glucast/core/units.hpp"
#include "glucast/metrics/scalar.hpp"
#include "glucast/report/svg.hpp"

namespace glucast {

struct ScatterSeries {
    int horizon_minutes = 0;
    PairedSeries pairs;
};

/// Forecasts aligned to a frame: row i of `predictions` is the trajectory
/// launched from the grid point at origins[i].
struct TrajectorySet {
    std::vector<Timestamp> origins;
    Eigen::MatrixXd predictions;
    int interval_minutes = 5;
};

/// Everything needed for the single-origin close-up. Times are absolute;
/// `actual` may be shorter than `predicted` (or empty) when the recording
/// ends inside the horizon.
struct SinglePrediction {
    std::vector<Timestamp> history_times;
    std::vector<double> history_cgm;  // mg/dL
    Timestamp origin = 0;
    int interval_minutes = 5;
    std::vector<double> predicted;  // mg/dL, steps origin+1 .. origin+H
    std::vector<double> actual;     // mg/dL, same grid, possibly truncated
    std::vector<std::pair<Timestamp, double>> carb_events;   // grams
    std::vector<std::pair<Timestamp, double>> bolus_events;  // insulin units
};

namespace detail {

inline const char* kPlotStyle =
    ".axis { stroke: #333333; stroke-width: 1; }\n"
    ".grid { stroke: #dddddd; stroke-width: 0.5; }\n"
    ".lbl { font: 12px sans-serif; fill: #333333; }\n"
    ".title { font: 14px sans-serif; fill: #111111; }\n"
    ".identity { stroke: #888888; stroke-dasharray: 4 3; }\n"
    ".pt { fill-opacity: 0.55; }\n"
    ".hz0 { fill: #1f77b4; } .hz1 { fill: #ff7f0e; } .hz2 { fill: #2ca02c; }\n"
    ".hz3 { fill: #d62728; } .hz4 { fill: #9467bd; } .hz5 { fill: #8c564b; }\n"
    ".cgm { fill: #444444; }\n"
    ".traj { fill: none; stroke: #1f77b4; stroke-width: 1.2; stroke-dasharray: 5 4; }\n"
    ".hist { fill: none; stroke: #444444; stroke-width: 1.5; }\n"
    ".pred { fill: none; stroke: #d62728; stroke-width: 1.8; stroke-dasharray: 6 3; }\n"
    ".actual { fill: none; stroke: #2ca02c; stroke-width: 1.5; }\n"
    ".carb-marker { fill: #ff7f0e; }\n"
    ".bolus-marker { fill: #9467bd; }\n"
    ".swatch { stroke-width: 2; }\n";

struct PlotBox {
    double left = 70.0;
    double right = 975.0;
    double top = 45.0;
    double bottom = 545.0;
};

// tick spacing: the largest of 1/2/5 x 10^k that yields at least four steps
inline double nice_step(double span) {
    const double raw = span / 4.0;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {5.0, 2.0}) {
        if (magnitude * m <= raw) return magnitude * m;
    }
    return magnitude;
}

inline void pad_domain(double& lo, double& hi) {
    if (hi - lo < 1e-9) {
        lo -= 1.0;
        hi += 1.0;
        return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

inline std::string tick_label(double v, int decimals) {
    if (decimals == 0) return std::to_string(static_cast<long long>(std::llround(v)));
    return format_fixed(v, decimals);
}

inline void draw_axes(SvgCanvas& svg, const PlotBox& box, const LinearScale& x,
                      const LinearScale& y, const std::string& x_label,
                      const std::string& y_label, int x_decimals, int y_decimals,
                      const std::string& title) {
    const double x_step = nice_step(x.domain_max - x.domain_min);
    for (double v = std::ceil(x.domain_min / x_step) * x_step; v <= x.domain_max;
         v += x_step) {
        svg.line(x(v), box.top, x(v), box.bottom, "grid");
        svg.text(x(v), box.bottom + 16, tick_label(v, x_decimals), "lbl", "middle");
    }
    const double y_step = nice_step(y.domain_max - y.domain_min);
    for (double v = std::ceil(y.domain_min / y_step) * y_step; v <= y.domain_max;
         v += y_step) {
        svg.line(box.left, y(v), box.right, y(v), "grid");
        svg.text(box.left - 6, y(v) + 4, tick_label(v, y_decimals), "lbl", "end");
    }
    svg.line(box.left, box.bottom, box.right, box.bottom, "axis");
    svg.line(box.left, box.top, box.left, box.bottom, "axis");
    svg.text((box.left + box.right) / 2.0, box.bottom + 36, x_label, "lbl", "middle");
    svg.text(box.left, box.top - 10, y_label, "lbl");
    svg.text((box.left + box.right) / 2.0, 22, title, "title", "middle");
}

inline void draw_legend(SvgCanvas& svg, const PlotBox& box,
                        const std::vector<std::pair<std::string, std::string>>& entries) {
    double ty = box.top + 14;
    for (const auto& [cls, label] : entries) {
        svg.rect(box.right - 150, ty - 8, 18, 8, cls + " swatch");
        svg.text(box.right - 126, ty, label, "lbl");
        ty += 18;
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

inline std::string glucose_axis_label(const std::string& what, GlucoseUnit unit) {
    return what + " (" + unit_to_string(unit) + ")";
}

}  // namespace detail

/// Square measured-versus-predicted scatter with the identity diagonal; one
/// color per horizon. Exactly one circle per pair.
inline void render_scatter(std::vector<ScatterSeries> series, GlucoseUnit unit,
                           const std::string& model_name,
                           const std::filesystem::path& out_path) {
    if (series.empty()) throw EmptyInputError("scatter plot needs at least one horizon series");
    std::sort(series.begin(), series.end(), [](const ScatterSeries& a, const ScatterSeries& b) {
        return a.horizon_minutes < b.horizon_minutes;
    });
    double lo = 1e300, hi = -1e300;
    for (const auto& s : series) {
        validate_pairs(s.pairs);
        for (double v : s.pairs.reference) {
            const double d = convert_glucose(v, GlucoseUnit::MGDL, unit);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        for (double v : s.pairs.predicted) {
            const double d = convert_glucose(v, GlucoseUnit::MGDL, unit);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    detail::pad_domain(lo, hi);

    detail::PlotBox box;
    const double side = std::min(box.right - box.left, box.bottom - box.top);
    box.right = box.left + side;
    box.top = box.bottom - side;
    const LinearScale x{lo, hi, box.left, box.right};
    const LinearScale y{lo, hi, box.bottom, box.top};

    SvgCanvas svg(detail::kPlotStyle);
    const int decimals = unit == GlucoseUnit::MMOLL ? 1 : 0;
    detail::draw_axes(svg, box, x, y, detail::glucose_axis_label("measured", unit),
                      detail::glucose_axis_label("predicted", unit), decimals, decimals,
                      model_name + ": measured vs predicted");
    svg.line(x(lo), y(lo), x(hi), y(hi), "identity");
    std::vector<std::pair<std::string, std::string>> legend;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const std::string cls = "hz" + std::to_string(s % 6);
        legend.emplace_back(cls, std::to_string(series[s].horizon_minutes) + " min");
        for (std::size_t i = 0; i < series[s].pairs.reference.size(); ++i) {
            const double px = convert_glucose(series[s].pairs.reference[i],
                                              GlucoseUnit::MGDL, unit);
            const double py = convert_glucose(series[s].pairs.predicted[i],
                                              GlucoseUnit::MGDL, unit);
            svg.circle(x(px), y(py), 3.0, "pt " + cls);
        }
    }
    detail::draw_legend(svg, box, legend);
    detail::write_text_file(out_path, svg.finish());
}

/// CGM trace as dots plus one dashed polyline per forecast origin. Trajectory
/// points past the final measurement are cut off, so an origin at the end of
/// the recording contributes no line at all.
inline void render_trajectories(const DatasetFrame& frame, const TrajectorySet& set,
                                GlucoseUnit unit, const std::string& model_name,
                                const std::filesystem::path& out_path) {
    if (set.predictions.rows() != static_cast<Eigen::Index>(set.origins.size())) {
        throw AlignmentError("trajectory set has " + std::to_string(set.origins.size()) +
                             " origins but " + std::to_string(set.predictions.rows()) +
                             " prediction rows");
    }
    if (set.interval_minutes != frame.interval_minutes()) {
        throw AlignmentError("trajectory grid runs every " +
                             std::to_string(set.interval_minutes) +
                             " min but the frame every " +
                             std::to_string(frame.interval_minutes()));
    }
    const auto& cgm = frame.column(kColCgm);
    const std::size_t bins = cgm.values.size();
    const long long step_seconds = 60LL * frame.interval_minutes();
    std::ptrdiff_t last_present = -1;
    for (std::size_t i = 0; i < bins; ++i) {
        if (cgm.present[i]) last_present = static_cast<std::ptrdiff_t>(i);
    }
    if (last_present < 0) throw EmptyInputError("frame holds no CGM measurements to plot");
    const Timestamp last_ts = frame.timestamp_at(static_cast<std::size_t>(last_present));

    auto origin_index = [&](Timestamp ts) {
        const long long offset = ts - frame.start();
        if (offset < 0 || offset % step_seconds != 0 ||
            offset / step_seconds >= static_cast<long long>(bins)) {
            throw AlignmentError("prediction origin " + format_rfc3339(ts) +
                                 " is not on the frame grid");
        }
        return static_cast<std::size_t>(offset / step_seconds);
    };

    auto minutes_of = [&](Timestamp ts) {
        return static_cast<double>(ts - frame.start()) / 60.0;
    };
    auto display = [&](double mgdl) { return convert_glucose(mgdl, GlucoseUnit::MGDL, unit); };

    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < bins; ++i) {
        if (!cgm.present[i]) continue;
        lo = std::min(lo, display(cgm.values[i]));
        hi = std::max(hi, display(cgm.values[i]));
    }
    const int horizon = static_cast<int>(set.predictions.cols());
    for (Eigen::Index i = 0; i < set.predictions.rows(); ++i) {
        const Timestamp origin = set.origins[static_cast<std::size_t>(i)];
        origin_index(origin);  // alignment check for every row
        for (int h = 0; h < horizon; ++h) {
            if (origin + (h + 1) * step_seconds > last_ts) break;
            lo = std::min(lo, display(set.predictions(i, h)));
            hi = std::max(hi, display(set.predictions(i, h)));
        }
    }
    detail::pad_domain(lo, hi);

    detail::PlotBox box;
    const double minutes_max = static_cast<double>(bins - 1) * frame.interval_minutes();
    const LinearScale x{0.0, std::max(minutes_max, 1.0), box.left, box.right};
    const LinearScale y{lo, hi, box.bottom, box.top};

    SvgCanvas svg(detail::kPlotStyle);
    detail::draw_axes(svg, box, x, y, "minutes",
                      detail::glucose_axis_label("glucose", unit), 0,
                      unit == GlucoseUnit::MMOLL ? 1 : 0,
                      model_name + ": forecast trajectories");
    for (std::size_t i = 0; i < bins; ++i) {
        if (!cgm.present[i]) continue;
        svg.circle(x(static_cast<double>(i) * frame.interval_minutes()),
                   y(display(cgm.values[i])), 2.0, "cgm");
    }
    for (Eigen::Index i = 0; i < set.predictions.rows(); ++i) {
        const Timestamp origin = set.origins[static_cast<std::size_t>(i)];
        const std::size_t at = origin_index(origin);
        std::vector<std::pair<double, double>> points;
        if (cgm.present[at]) {
            points.emplace_back(x(minutes_of(origin)), y(display(cgm.values[at])));
        }
        for (int h = 0; h < horizon; ++h) {
            const Timestamp ts = origin + (h + 1) * step_seconds;
            if (ts > last_ts) break;  // no measurement left to compare with
            points.emplace_back(x(minutes_of(ts)), y(display(set.predictions(i, h))));
        }
        if (points.size() >= 2) svg.polyline(points, "traj");
    }
    detail::draw_legend(svg, box, {{"cgm", "CGM"}, {"traj", "forecast"}});
    detail::write_text_file(out_path, svg.finish());
}

/// Close-up of one origin: history, dashed forecast, actual continuation when
/// available, and carb/bolus event markers along the bottom.
inline void render_single_prediction(const SinglePrediction& sample, GlucoseUnit unit,
                                     const std::string& model_name,
                                     const std::filesystem::path& out_path) {
    if (sample.predicted.empty()) throw EmptyInputError("single-prediction plot needs a forecast");
    if (sample.history_times.size() != sample.history_cgm.size()) {
        throw ShapeError("history for the single-prediction plot has " +
                         std::to_string(sample.history_times.size()) + " times but " +
                         std::to_string(sample.history_cgm.size()) + " values");
    }
    if (sample.actual.size() > sample.predicted.size()) {
        throw ShapeError("actual continuation is longer than the forecast horizon");
    }

    auto minutes_of = [&](Timestamp ts) {
        return static_cast<double>(ts - sample.origin) / 60.0;
    };
    auto display = [&](double mgdl) { return convert_glucose(mgdl, GlucoseUnit::MGDL, unit); };

    double x_lo = 0.0;
    double x_hi = static_cast<double>(sample.predicted.size() * sample.interval_minutes);
    for (Timestamp ts : sample.history_times) x_lo = std::min(x_lo, minutes_of(ts));
    double lo = 1e300, hi = -1e300;
    for (double v : sample.history_cgm) {
        lo = std::min(lo, display(v));
        hi = std::max(hi, display(v));
    }
    for (double v : sample.predicted) {
        lo = std::min(lo, display(v));
        hi = std::max(hi, display(v));
    }
    for (double v : sample.actual) {
        lo = std::min(lo, display(v));
        hi = std::max(hi, display(v));
    }
    detail::pad_domain(lo, hi);

    detail::PlotBox box;
    const LinearScale x{x_lo, x_hi, box.left, box.right};
    const LinearScale y{lo, hi, box.bottom, box.top};

    SvgCanvas svg(detail::kPlotStyle);
    detail::draw_axes(svg, box, x, y, "minutes from origin",
                      detail::glucose_axis_label("glucose", unit), 0,
                      unit == GlucoseUnit::MMOLL ? 1 : 0,
                      model_name + ": single prediction");
    svg.line(x(0.0), box.top, x(0.0), box.bottom, "identity");

    std::vector<std::pair<double, double>> history;
    for (std::size_t i = 0; i < sample.history_times.size(); ++i) {
        history.emplace_back(x(minutes_of(sample.history_times[i])),
                             y(display(sample.history_cgm[i])));
        svg.circle(history.back().first, history.back().second, 2.0, "cgm");
    }
    if (history.size() >= 2) svg.polyline(history, "hist");

    const bool anchored = !sample.history_cgm.empty();
    std::vector<std::pair<double, double>> forecast;
    if (anchored) forecast.emplace_back(x(0.0), y(display(sample.history_cgm.back())));
    for (std::size_t h = 0; h < sample.predicted.size(); ++h) {
        forecast.emplace_back(x(static_cast<double>((h + 1) * sample.interval_minutes)),
                              y(display(sample.predicted[h])));
    }
    if (forecast.size() >= 2) svg.polyline(forecast, "pred");

    if (!sample.actual.empty()) {
        std::vector<std::pair<double, double>> actual;
        if (anchored) actual.emplace_back(x(0.0), y(display(sample.history_cgm.back())));
        for (std::size_t h = 0; h < sample.actual.size(); ++h) {
            actual.emplace_back(x(static_cast<double>((h + 1) * sample.interval_minutes)),
                                y(display(sample.actual[h])));
        }
        if (actual.size() >= 2) svg.polyline(actual, "actual");
    }

    for (const auto& [ts, grams] : sample.carb_events) {
        const double mx = minutes_of(ts);
        if (mx < x_lo || mx > x_hi) continue;
        svg.circle(x(mx), box.bottom - 14, 5.0, "carb-marker");
        svg.text(x(mx) + 8, box.bottom - 10, format_fixed(grams, 0) + " g", "lbl");
    }
    for (const auto& [ts, units] : sample.bolus_events) {
        const double mx = minutes_of(ts);
        if (mx < x_lo || mx > x_hi) continue;
        svg.circle(x(mx), box.bottom - 30, 5.0, "bolus-marker");
        svg.text(x(mx) + 8, box.bottom - 26, format_fixed(units, 1) + " U", "lbl");
    }

    std::vector<std::pair<std::string, std::string>> legend = {{"cgm", "history"},
                                                               {"pred", "forecast"}};
    if (!sample.actual.empty()) legend.emplace_back("actual", "actual");
    if (!sample.carb_events.empty()) legend.emplace_back("carb-marker", "carbs");
    if (!sample.bolus_events.empty()) legend.emplace_back("bolus-marker", "bolus");
    detail::draw_legend(svg, box, legend);
    detail::write_text_file(out_path, svg.finish());
}

}  // namespace glucast
