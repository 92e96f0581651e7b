// Scalar accuracy metrics over (reference, predicted) glucose pairs.
// Everything is computed in mg/dL; relative metrics are percentages and are
// safe because reference values are validated into the sensor range, which
// excludes zero.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"

namespace glucast {

struct PairedSeries {
    std::vector<double> reference;  // measured CGM, mg/dL
    std::vector<double> predicted;  // model output, mg/dL
};

/// Shared precondition for every metric: equal non-zero lengths, finite
/// values, and reference readings inside the sensor range. Predictions may
/// leave the range (models are free to be wrong); they only have to be finite.
inline void validate_pairs(const PairedSeries& pairs) {
    if (pairs.reference.size() != pairs.predicted.size()) {
        throw ShapeError("paired series length mismatch: " +
                         std::to_string(pairs.reference.size()) + " references vs " +
                         std::to_string(pairs.predicted.size()) + " predictions");
    }
    if (pairs.reference.empty()) throw EmptyInputError("no pairs to evaluate");
    for (std::size_t i = 0; i < pairs.reference.size(); ++i) {
        const double r = pairs.reference[i];
        const double p = pairs.predicted[i];
        if (!std::isfinite(r) || r < kCgmFloorMgdl || r > kCgmCeilMgdl) {
            throw InvalidValueError("reference value " + std::to_string(r) + " at pair " +
                                    std::to_string(i) + " is outside the sensor range");
        }
        if (!std::isfinite(p)) {
            throw InvalidValueError("prediction at pair " + std::to_string(i) + " is not finite");
        }
    }
}

struct ScalarMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double mard_percent = 0.0;
    double me = 0.0;
    double mre_percent = 0.0;
};

inline ScalarMetrics scalar_metrics(const PairedSeries& pairs) {
    validate_pairs(pairs);
    const std::size_t n = pairs.reference.size();
    double sq = 0.0, abs_err = 0.0, abs_rel = 0.0, err = 0.0, rel = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = pairs.predicted[i] - pairs.reference[i];
        sq += diff * diff;
        abs_err += std::abs(diff);
        abs_rel += std::abs(diff) / pairs.reference[i];
        err += diff;
        rel += diff / pairs.reference[i];
    }
    const double count = static_cast<double>(n);
    ScalarMetrics out;
    out.rmse = std::sqrt(sq / count);
    out.mae = abs_err / count;
    out.mard_percent = 100.0 * abs_rel / count;
    out.me = err / count;
    out.mre_percent = 100.0 * rel / count;
    return out;
}

}  // namespace glucast
