// One model's evaluation over every horizon step: scalar metrics, the
// penalty-weighted RMSE, and both error grids, all computed in mg/dL. The
// display unit travels with the report; conversion happens at render time so
// stored numbers stay exact.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glucast/core/errors.hpp"
#include "glucast/core/units.hpp"
#include "glucast/metrics/error_grid.hpp"
#include "glucast/metrics/gs_rmse.hpp"
#include "glucast/metrics/scalar.hpp"
#include "glucast/preprocess/supervised.hpp"

namespace glucast {

struct HorizonMetrics {
    int horizon_minutes = 0;
    ScalarMetrics scalar;
    double gs_rmse_value = 0.0;
    ErrorGridResult clarke;
    ErrorGridResult parkes;
};

struct EvaluationReport {
    std::string model_name;
    std::string config_hash;
    GlucoseUnit unit = GlucoseUnit::MGDL;
    std::vector<HorizonMetrics> horizons;  // ascending, one entry per step
};

/// Scores `predictions` (one row per test sample, one column per horizon
/// step) against the test targets. Row counts must agree; the horizon keys of
/// the result are (step index + 1) * interval by construction.
inline EvaluationReport evaluate_model(const std::string& model_name,
                                       const std::string& config_hash, GlucoseUnit unit,
                                       const SupervisedSet& test,
                                       const Eigen::MatrixXd& predictions,
                                       int interval_minutes) {
    if (predictions.rows() != test.rows() || predictions.cols() != test.horizon()) {
        throw ShapeError("prediction matrix is " + std::to_string(predictions.rows()) + "x" +
                         std::to_string(predictions.cols()) + " but the test split needs " +
                         std::to_string(test.rows()) + "x" + std::to_string(test.horizon()));
    }
    EvaluationReport report;
    report.model_name = model_name;
    report.config_hash = config_hash;
    report.unit = unit;
    for (Eigen::Index h = 0; h < test.horizon(); ++h) {
        PairedSeries pairs;
        pairs.reference.assign(test.targets.col(h).data(),
                               test.targets.col(h).data() + test.rows());
        pairs.predicted.resize(test.rows());
        for (Eigen::Index i = 0; i < test.rows(); ++i) pairs.predicted[i] = predictions(i, h);
        HorizonMetrics metrics;
        metrics.horizon_minutes = static_cast<int>(h + 1) * interval_minutes;
        metrics.scalar = scalar_metrics(pairs);
        metrics.gs_rmse_value = gs_rmse(pairs);
        metrics.clarke = error_grid(pairs, GridKind::CLARKE);
        metrics.parkes = error_grid(pairs, GridKind::PARKES);
        report.horizons.push_back(std::move(metrics));
    }
    return report;
}

}  // namespace glucast
