// Gap filling on the uniform grid. Continuous vitals (CGM, heart rate) are
// linearly interpolated across short interior gaps; dose-like columns
// (bolus, carbs, delivered basal) treat absence of a record as zero. Present
// values are never touched, and gaps longer than the bound stay missing so
// the feature builder drops them instead of fabricating half an hour of
// glucose out of two endpoints.
#pragma once

#include <string>

#include "glucast/core/frame.hpp"

namespace glucast {

inline DatasetFrame impute(const DatasetFrame& frame, int max_gap_minutes) {
    DatasetFrame out = frame;
    const std::size_t n = out.size();
    if (n == 0) return out;
    const int max_gap_bins =
        max_gap_minutes <= 0 ? 0 : max_gap_minutes / out.interval_minutes();

    for (const auto& name : out.column_names()) {
        SignalColumn& col = out.column(name);
        const bool dose_like = name == kColBolus || name == kColCarbs || name == kColBasal;
        if (dose_like) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!col.present[i]) {
                    col.values[i] = 0.0;
                    col.present[i] = 1;
                }
            }
            continue;
        }
        // interpolate interior runs bounded by present values on both sides
        std::size_t i = 0;
        while (i < n) {
            if (col.present[i]) {
                ++i;
                continue;
            }
            std::size_t run_start = i;
            while (i < n && !col.present[i]) ++i;
            std::size_t run_end = i;  // one past the gap
            if (run_start == 0 || run_end == n) continue;  // leading/trailing stay missing
            std::size_t gap = run_end - run_start;
            if (static_cast<int>(gap) > max_gap_bins) continue;
            double left = col.values[run_start - 1];
            double right = col.values[run_end];
            for (std::size_t k = 0; k < gap; ++k) {
                double frac = static_cast<double>(k + 1) / static_cast<double>(gap + 1);
                col.values[run_start + k] = left + frac * (right - left);
                col.present[run_start + k] = 1;
            }
        }
    }
    return out;
}

}  // namespace glucast
