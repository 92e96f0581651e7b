// Feature standardization fitted on training data only. Population standard
// deviation (divide by n) keeps the numbers reproducible across libraries.
// Targets are never scaled; models always see and emit mg/dL.
#pragma once

#include <Eigen/Dense>

#include "glucast/core/errors.hpp"
#include "glucast/preprocess/supervised.hpp"

namespace glucast {

struct ScalerParams {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    bool operator==(const ScalerParams& other) const {
        return mean.size() == other.mean.size() && scale.size() == other.scale.size() &&
               mean == other.mean && scale == other.scale;
    }
};

inline ScalerParams scaler_fit(const SupervisedSet& train) {
    if (train.rows() == 0) throw EmptyInputError("cannot fit a scaler on zero samples");
    const Eigen::Index n = train.rows();
    const Eigen::Index p = train.cols();
    ScalerParams params;
    params.mean.resize(p);
    params.scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto col = train.features.col(j);
        double lo = col.minCoeff();
        double hi = col.maxCoeff();
        if (lo == hi) {
            // constant column: using the constant itself as the mean makes
            // the transformed value exactly zero, not zero plus rounding
            params.mean(j) = lo;
            params.scale(j) = 1.0;
            continue;
        }
        double mean = col.mean();
        double var = (col.array() - mean).square().sum() / static_cast<double>(n);
        double sd = std::sqrt(var);
        params.mean(j) = mean;
        params.scale(j) = sd > 0.0 ? sd : 1.0;
    }
    return params;
}

/// Identity parameters (mean 0, scale 1), used when scaling is disabled so
/// downstream code and the artifact format see one uniform shape.
inline ScalerParams scaler_identity(Eigen::Index cols) {
    ScalerParams params;
    params.mean = Eigen::VectorXd::Zero(cols);
    params.scale = Eigen::VectorXd::Ones(cols);
    return params;
}

inline Eigen::MatrixXd scaler_transform(const ScalerParams& params,
                                        const Eigen::MatrixXd& features) {
    if (features.cols() != params.mean.size()) {
        throw ShapeError("scaler fitted for " + std::to_string(params.mean.size()) +
                         " features, got " + std::to_string(features.cols()));
    }
    return (features.rowwise() - params.mean.transpose()).array().rowwise() /
           params.scale.transpose().array();
}

inline SupervisedSet scaler_apply(const ScalerParams& params, const SupervisedSet& set) {
    SupervisedSet out = set;
    out.features = scaler_transform(params, set.features);
    return out;
}

}  // namespace glucast
