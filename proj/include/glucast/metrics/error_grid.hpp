// Clarke and Parkes (consensus, type 1) error grids: clinical accuracy zones
// for (reference, predicted) pairs, A benign through E dangerous.
//
// Clarke zones come from an ordered rule set (the common operationalization
// of the 1987 grid); the order of the checks is part of the definition.
//
// Parkes zones are encoded as the published boundary polylines. Above the
// diagonal the zones are E, D, C, B from the top left; below it the worst
// zone is D. A point between the two innermost boundaries is A, and a point
// exactly on any boundary belongs to the better zone (all comparisons are
// strict on the worse side). Beyond the last vertex each boundary continues
// with its final slope; leading vertical segments act as hard lower bounds
// on the reference axis. The exact vertex tables are a transcription, so the
// test suite pins the structural properties (total partition, diagonal is
// always A, zones worsen monotonically away from the diagonal) rather than
// the raw coordinates.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "glucast/metrics/scalar.hpp"

namespace glucast {

enum class GridKind { CLARKE, PARKES };

inline std::string grid_kind_name(GridKind kind) {
    return kind == GridKind::CLARKE ? "clarke" : "parkes";
}

enum class Zone { A = 0, B = 1, C = 2, D = 3, E = 4 };

inline char zone_letter(Zone z) { return static_cast<char>('A' + static_cast<int>(z)); }

inline Zone classify_clarke(double r, double p) {
    if (std::abs(p - r) <= 0.2 * r || (r < 70.0 && p < 70.0)) return Zone::A;
    if ((r >= 180.0 && p <= 70.0) || (r <= 70.0 && p >= 180.0)) return Zone::E;
    if ((r >= 70.0 && r <= 290.0 && p >= r + 110.0) ||
        (r >= 130.0 && r <= 180.0 && p <= (7.0 / 5.0) * r - 182.0)) {
        return Zone::C;
    }
    if ((r >= 240.0 && p >= 70.0 && p <= 180.0) || (r <= 70.0 && p >= 70.0 && p <= 180.0)) {
        return Zone::D;
    }
    return Zone::B;
}

namespace detail {

struct GridPoint {
    double x;
    double y;
};

// piecewise-linear boundary value at x, extending the end segments outward
inline double boundary_at(const std::vector<GridPoint>& pts, double x) {
    std::size_t seg = 0;
    while (seg + 2 < pts.size() && x > pts[seg + 1].x) ++seg;
    const GridPoint& a = pts[seg];
    const GridPoint& b = pts[seg + 1];
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
}

// boundaries above the diagonal, worst first; a point strictly above one of
// these is in that zone or worse
inline const std::vector<std::vector<GridPoint>>& parkes_upper() {
    static const std::vector<std::vector<GridPoint>> bounds = {
        {{0, 150}, {35, 155}, {50, 550}},                        // E
        {{0, 100}, {25, 100}, {50, 125}, {80, 215}, {125, 550}}, // D
        {{0, 60}, {30, 60}, {50, 80}, {70, 110}, {260, 550}},    // C
        {{0, 50}, {30, 50}, {140, 170}, {280, 380}, {430, 550}}, // B
    };
    return bounds;
}

// boundaries below the diagonal, worst first. min_x is where the published
// boundary rises vertically from the reference axis: left of it the zone
// does not exist at all.
struct LowerBoundary {
    double min_x;
    std::vector<GridPoint> pts;
};

inline const std::vector<LowerBoundary>& parkes_lower() {
    static const std::vector<LowerBoundary> bounds = {
        {250, {{250, 40}, {550, 150}}},                          // D
        {120, {{120, 30}, {260, 130}, {550, 250}}},              // C
        {50, {{50, 30}, {170, 145}, {385, 300}, {550, 450}}},    // B
    };
    return bounds;
}

}  // namespace detail

inline Zone classify_parkes(double r, double p) {
    static const Zone upper_zones[] = {Zone::E, Zone::D, Zone::C, Zone::B};
    const auto& upper = detail::parkes_upper();
    for (std::size_t i = 0; i < upper.size(); ++i) {
        if (p > detail::boundary_at(upper[i], r)) return upper_zones[i];
    }
    static const Zone lower_zones[] = {Zone::D, Zone::C, Zone::B};
    const auto& lower = detail::parkes_lower();
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (r > lower[i].min_x && p < detail::boundary_at(lower[i].pts, r)) {
            return lower_zones[i];
        }
    }
    return Zone::A;
}

inline Zone classify(GridKind kind, double r, double p) {
    return kind == GridKind::CLARKE ? classify_clarke(r, p) : classify_parkes(r, p);
}

struct ErrorGridResult {
    GridKind kind = GridKind::CLARKE;
    std::array<std::size_t, 5> zone_counts{};
    std::array<double, 5> zone_percentages{};

    std::size_t count(Zone z) const { return zone_counts[static_cast<std::size_t>(z)]; }
    double percentage(Zone z) const { return zone_percentages[static_cast<std::size_t>(z)]; }
};

inline ErrorGridResult error_grid(const PairedSeries& pairs, GridKind kind) {
    validate_pairs(pairs);
    ErrorGridResult out;
    out.kind = kind;
    for (std::size_t i = 0; i < pairs.reference.size(); ++i) {
        const Zone z = classify(kind, pairs.reference[i], pairs.predicted[i]);
        ++out.zone_counts[static_cast<std::size_t>(z)];
    }
    const double n = static_cast<double>(pairs.reference.size());
    for (std::size_t z = 0; z < out.zone_counts.size(); ++z) {
        out.zone_percentages[z] = 100.0 * static_cast<double>(out.zone_counts[z]) / n;
    }
    return out;
}

}  // namespace glucast
