// Glucose-specific RMSE: squared errors weighted by a clinical penalty
// before averaging. The penalty surface is pinned here from its documented
// qualitative shape: it is 1 everywhere except the two genuinely dangerous
// quadrants, overprediction during hypoglycemia (a high forecast can hide a
// low) and underprediction during hyperglycemia (a low forecast can hide a
// high), where it rises smoothly with both the depth of the excursion and
// the size of the error, up to 1 + amplitude.
#pragma once

#include <algorithm>
#include <cmath>

#include "glucast/metrics/scalar.hpp"

namespace glucast {

struct GsPenaltyParams {
    double hypo_amplitude = 3.0;   // weight ceiling for overprediction below 70
    double hyper_amplitude = 2.0;  // weight ceiling for underprediction above 180
};

namespace detail {

// clamp to [0, 1]: the saturation knob for both penalty factors
inline double unit_ramp(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace detail

/// Penalty weight for one (reference, predicted) pair. Always >= 1, exactly 1
/// whenever the error is clinically benign, and exactly 1 everywhere when
/// both amplitudes are zero (which reduces gs_rmse to plain rmse).
inline double gs_penalty(double reference, double predicted,
                         const GsPenaltyParams& params = {}) {
    double pen = 1.0;
    if (reference < 70.0 && predicted > reference) {
        const double depth = detail::unit_ramp((70.0 - reference) / 60.0);
        const double error = detail::unit_ramp((predicted - reference) / 100.0);
        pen += params.hypo_amplitude * depth * error;
    }
    if (reference > 180.0 && predicted < reference) {
        const double depth = detail::unit_ramp((reference - 180.0) / 220.0);
        const double error = detail::unit_ramp((reference - predicted) / 100.0);
        pen += params.hyper_amplitude * depth * error;
    }
    return pen;
}

inline double gs_rmse(const PairedSeries& pairs, const GsPenaltyParams& params = {}) {
    validate_pairs(pairs);
    const std::size_t n = pairs.reference.size();
    double weighted_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = pairs.predicted[i] - pairs.reference[i];
        weighted_sq += gs_penalty(pairs.reference[i], pairs.predicted[i], params) * diff * diff;
    }
    return std::sqrt(weighted_sq / static_cast<double>(n));
}

}  // namespace glucast
