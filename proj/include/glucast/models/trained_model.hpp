// Fitting and prediction across the whole horizon. The strategy is direct
// multi-horizon: one independent regressor per future step, all trained on
// the same standardized feature matrix, so a trajectory is just the H
// per-step predictions side by side and no forecast feeds back into another.
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glucast/core/errors.hpp"
#include "glucast/core/frame.hpp"
#include "glucast/models/forest.hpp"
#include "glucast/models/gbt.hpp"
#include "glucast/models/linear.hpp"
#include "glucast/models/regressor.hpp"
#include "glucast/models/spec.hpp"
#include "glucast/models/tree.hpp"
#include "glucast/preprocess/scaler.hpp"
#include "glucast/preprocess/supervised.hpp"
#include "glucast/util/random.hpp"

namespace glucast {

inline constexpr int kModelFormatVersion = 1;

/// Fit diagnostics for one horizon step. Solver trouble lands here as
/// cleared flags, never as an exception; the caller decides how loudly to
/// report it.
struct FitHorizonReport {
    bool converged = true;
    bool singular = false;
    int iterations = 0;
    std::vector<double> loss_curve;  // boosting only: MSE per round
};

struct FitReport {
    std::vector<FitHorizonReport> horizons;
};

struct TrainedModel {
    ModelSpec spec;  // resolved: every hyperparameter and seed pinned
    std::vector<std::string> feature_names;
    ScalerParams scaler;
    std::string config_hash;
    int interval_minutes = 5;
    std::vector<std::unique_ptr<Regressor>> predictors;  // one per horizon step

    int horizon_steps() const { return static_cast<int>(predictors.size()); }
};

struct FitOutcome {
    TrainedModel model;
    FitReport report;
};

namespace detail {

inline int locf_feature_index(const std::vector<std::string>& feature_names) {
    const std::string wanted = std::string(kColCgm) + "[t-0]";
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i] == wanted) return static_cast<int>(i);
    }
    throw SchemaError("locf_baseline needs the " + wanted + " feature, which is missing");
}

}  // namespace detail

/// Trains one regressor per target column of `train`. Features are
/// standardized with the caller's scaler (fitted on training data only, so
/// nothing from the test period can reach the coefficients); targets stay in
/// mg/dL. The spec is resolved here, so the artifact records every default
/// and the effective seed.
inline FitOutcome fit_model(const ModelSpec& spec, const SupervisedSet& train,
                            const ScalerParams& scaler, const std::string& config_hash,
                            int interval_minutes, std::uint64_t default_seed) {
    if (train.rows() == 0) throw EmptyInputError("cannot fit a model on zero samples");
    if (train.horizon() == 0) throw EmptyInputError("training set has no target columns");

    FitOutcome out;
    out.model.spec = resolve_spec(spec, default_seed);
    out.model.feature_names = train.feature_names;
    out.model.scaler = scaler;
    out.model.config_hash = config_hash;
    out.model.interval_minutes = interval_minutes;

    const Eigen::MatrixXd scaled = scaler_transform(scaler, train.features);
    const std::string& name = out.model.spec.name;
    const int horizon = static_cast<int>(train.horizon());
    for (int h = 0; h < horizon; ++h) {
        const Eigen::VectorXd y = train.targets.col(h);
        FitHorizonReport report;
        std::unique_ptr<Regressor> predictor;
        if (name == "ols") {
            const LinearFit fit = solve_ridge(scaled, y, 0.0);
            report.singular = fit.singular;
            predictor = std::make_unique<LinearRegressor>(fit.weights, fit.intercept);
        } else if (name == "ridge") {
            const LinearFit fit = solve_ridge(scaled, y, spec_param(out.model.spec, "alpha"));
            report.singular = fit.singular;
            predictor = std::make_unique<LinearRegressor>(fit.weights, fit.intercept);
        } else if (name == "lasso" || name == "elastic_net") {
            const double l1 = name == "lasso" ? 1.0 : spec_param(out.model.spec, "l1_ratio");
            const LinearFit fit =
                solve_elastic_net(scaled, y, spec_param(out.model.spec, "alpha"), l1);
            report.converged = fit.converged;
            report.iterations = fit.iterations;
            predictor = std::make_unique<LinearRegressor>(fit.weights, fit.intercept);
        } else if (name == "huber") {
            const LinearFit fit = solve_huber(scaled, y, spec_param(out.model.spec, "huber_delta"));
            report.converged = fit.converged;
            report.iterations = fit.iterations;
            predictor = std::make_unique<LinearRegressor>(fit.weights, fit.intercept);
        } else if (name == "random_forest") {
            TreeOptions options;
            options.max_depth = static_cast<int>(spec_param(out.model.spec, "max_depth"));
            options.min_samples_leaf =
                static_cast<int>(spec_param(out.model.spec, "min_samples_leaf"));
            const auto seed = static_cast<std::uint64_t>(spec_param(out.model.spec, "random_seed"));
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(h)));
            predictor = ForestRegressor::train(
                scaled, y, static_cast<int>(spec_param(out.model.spec, "n_trees")), options,
                spec_param(out.model.spec, "bootstrap") != 0.0, rng);
        } else if (name == "gbt") {
            TreeOptions options;
            options.max_depth = static_cast<int>(spec_param(out.model.spec, "max_depth"));
            options.min_samples_leaf =
                static_cast<int>(spec_param(out.model.spec, "min_samples_leaf"));
            const auto seed = static_cast<std::uint64_t>(spec_param(out.model.spec, "random_seed"));
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(h)));
            GbtRegressor::TrainResult trained = GbtRegressor::train(
                scaled, y, static_cast<int>(spec_param(out.model.spec, "n_trees")), options,
                spec_param(out.model.spec, "learning_rate"),
                spec_param(out.model.spec, "subsample"), rng);
            report.loss_curve = std::move(trained.loss_curve);
            predictor = std::move(trained.model);
        } else if (name == "locf_baseline") {
            predictor = std::make_unique<LocfRegressor>(
                detail::locf_feature_index(train.feature_names));
        } else {
            throw SchemaError("no trainer registered for model '" + name + "'");
        }
        out.model.predictors.push_back(std::move(predictor));
        out.report.horizons.push_back(std::move(report));
    }
    return out;
}

/// Trajectory predictions: row i of the result holds the H-step forecast for
/// row i of `raw_features` (unscaled, same column layout as training).
inline Eigen::MatrixXd predict(const TrainedModel& model, const Eigen::MatrixXd& raw_features) {
    if (raw_features.cols() != static_cast<Eigen::Index>(model.feature_names.size())) {
        throw ShapeError("model expects " + std::to_string(model.feature_names.size()) +
                         " features, got " + std::to_string(raw_features.cols()));
    }
    const int horizon = model.horizon_steps();
    Eigen::MatrixXd out(raw_features.rows(), horizon);
    if (raw_features.rows() == 0) return out;
    const Eigen::MatrixXd scaled = scaler_transform(model.scaler, raw_features);
    for (Eigen::Index i = 0; i < raw_features.rows(); ++i) {
        for (int h = 0; h < horizon; ++h) {
            out(i, h) = model.predictors[h]->predict_one(scaled.row(i), raw_features.row(i));
        }
    }
    return out;
}

}  // namespace glucast
