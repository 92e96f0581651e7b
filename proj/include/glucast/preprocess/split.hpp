// Chronological train/test split. No shuffling: glucose forecasting leaks
// future into past under random splits, so the test block is always the
// final stretch of the series.
#pragma once

#include <cmath>
#include <utility>

#include "glucast/core/errors.hpp"
#include "glucast/preprocess/supervised.hpp"

namespace glucast {

inline std::pair<SupervisedSet, SupervisedSet> split(const SupervisedSet& set,
                                                     double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InvalidValueError("test_fraction must lie in (0, 1)");
    }
    const Eigen::Index n = set.rows();
    if (n < 2) {
        throw InsufficientDataError("need at least 2 samples to split, have " +
                                    std::to_string(n));
    }
    const Eigen::Index train_n = static_cast<Eigen::Index>(
        std::ceil(static_cast<double>(n) * (1.0 - test_fraction)));
    const Eigen::Index test_n = n - train_n;

    auto take = [&](Eigen::Index from, Eigen::Index count) {
        SupervisedSet part;
        part.features = set.features.middleRows(from, count);
        part.targets = set.targets.middleRows(from, count);
        part.sample_timestamps.assign(
            set.sample_timestamps.begin() + from,
            set.sample_timestamps.begin() + from + count);
        part.feature_names = set.feature_names;
        return part;
    };
    return {take(0, train_n), take(train_n, test_n)};
}

}  // namespace glucast
