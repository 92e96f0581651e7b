// Build the supervised matrices from an imputed frame. For each prediction
// origin t the features are, per configured signal, the lag window
// s[t-(L-1)] .. s[t-0], plus (for what-if signals) the future values
// s[t+1] .. s[t+H]; targets are CGM at t+1 .. t+H. Any sample touching a
// missing cell is dropped whole.
#pragma once

#include <string>
#include <vector>

#include "glucast/core/config.hpp"
#include "glucast/core/errors.hpp"
#include "glucast/core/frame.hpp"
#include "glucast/preprocess/supervised.hpp"

namespace glucast {

inline SupervisedSet featurize(const DatasetFrame& frame, const PipelineConfig& config) {
    config.validate();
    const int L = config.num_lagged_samples;
    const int H = config.horizon_steps();
    const std::size_t n = frame.size();

    if (frame.interval_minutes() != config.interval_minutes) {
        throw AlignmentError("frame interval " + std::to_string(frame.interval_minutes()) +
                             " does not match configured interval " +
                             std::to_string(config.interval_minutes));
    }
    for (const auto& signal : config.feature_signals) {
        if (!frame.has_column(signal)) {
            throw SchemaError("frame has no column '" + signal +
                              "' required by feature_signals");
        }
    }
    if (n < static_cast<std::size_t>(L + H)) {
        throw EmptyInputError("frame has " + std::to_string(n) + " bins, need at least " +
                              std::to_string(L + H));
    }

    SupervisedSet out;
    for (const auto& signal : config.feature_signals) {
        for (int k = L - 1; k >= 0; --k) {
            out.feature_names.push_back(signal + "[t-" + std::to_string(k) + "]");
        }
    }
    for (const auto& signal : config.what_if_signals) {
        for (int k = 1; k <= H; ++k) {
            out.feature_names.push_back(signal + "[t+" + std::to_string(k) + "]");
        }
    }
    const Eigen::Index p = static_cast<Eigen::Index>(out.feature_names.size());

    std::vector<Eigen::Index> origins;
    for (std::size_t t = static_cast<std::size_t>(L - 1); t + static_cast<std::size_t>(H) < n;
         ++t) {
        bool complete = true;
        for (const auto& signal : config.feature_signals) {
            const SignalColumn& col = frame.column(signal);
            for (int k = 0; k < L && complete; ++k) {
                if (!col.present[t - static_cast<std::size_t>(k)]) complete = false;
            }
            if (!complete) break;
        }
        if (complete) {
            for (const auto& signal : config.what_if_signals) {
                const SignalColumn& col = frame.column(signal);
                for (int k = 1; k <= H && complete; ++k) {
                    if (!col.present[t + static_cast<std::size_t>(k)]) complete = false;
                }
                if (!complete) break;
            }
        }
        if (complete) {
            const SignalColumn& cgm = frame.column(kColCgm);
            for (int k = 1; k <= H && complete; ++k) {
                if (!cgm.present[t + static_cast<std::size_t>(k)]) complete = false;
            }
        }
        if (complete) origins.push_back(static_cast<Eigen::Index>(t));
    }
    if (origins.empty()) {
        throw EmptyInputError("no complete samples: every window touches a missing value");
    }

    out.features.resize(static_cast<Eigen::Index>(origins.size()), p);
    out.targets.resize(static_cast<Eigen::Index>(origins.size()), H);
    out.sample_timestamps.reserve(origins.size());

    for (std::size_t row = 0; row < origins.size(); ++row) {
        const std::size_t t = static_cast<std::size_t>(origins[row]);
        Eigen::Index col_idx = 0;
        for (const auto& signal : config.feature_signals) {
            const SignalColumn& col = frame.column(signal);
            for (int k = L - 1; k >= 0; --k) {
                out.features(static_cast<Eigen::Index>(row), col_idx++) =
                    col.values[t - static_cast<std::size_t>(k)];
            }
        }
        for (const auto& signal : config.what_if_signals) {
            const SignalColumn& col = frame.column(signal);
            for (int k = 1; k <= H; ++k) {
                out.features(static_cast<Eigen::Index>(row), col_idx++) =
                    col.values[t + static_cast<std::size_t>(k)];
            }
        }
        const SignalColumn& cgm = frame.column(kColCgm);
        for (int k = 1; k <= H; ++k) {
            out.targets(static_cast<Eigen::Index>(row), k - 1) =
                cgm.values[t + static_cast<std::size_t>(k)];
        }
        out.sample_timestamps.push_back(frame.timestamp_at(t));
    }
    return out;
}

}  // namespace glucast
