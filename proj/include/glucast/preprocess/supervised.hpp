// The supervised-learning view of a dataset: one row per prediction origin,
// lagged and what-if features in the columns, one target column per horizon
// step. Matrices are dense and hole-free by construction.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glucast/core/time.hpp"

namespace glucast {

struct SupervisedSet {
    Eigen::MatrixXd features;                  // n_samples x n_features
    Eigen::MatrixXd targets;                   // n_samples x H, CGM mg/dL
    std::vector<Timestamp> sample_timestamps;  // prediction origins, length n_samples
    std::vector<std::string> feature_names;    // length n_features

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
    Eigen::Index horizon() const { return targets.cols(); }
};

}  // namespace glucast
