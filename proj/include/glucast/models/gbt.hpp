// Gradient boosted trees for squared error: stagewise fitting of shallow
// regression trees to the current residuals, each scaled by the learning
// rate, on top of a constant base prediction. With the full sample per round
// the training loss can only shrink, a property the test suite relies on;
// subsampling trades that guarantee for variance reduction.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "glucast/models/regressor.hpp"
#include "glucast/models/tree.hpp"

namespace glucast {

class GbtRegressor : public Regressor {
public:
    GbtRegressor() = default;

    struct TrainResult {
        std::unique_ptr<GbtRegressor> model;
        // entry 0 is the MSE of the constant base, entry t the MSE after tree t
        std::vector<double> loss_curve;
    };

    static TrainResult train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int n_trees,
                             TreeOptions options, double learning_rate, double subsample,
                             std::mt19937_64& rng) {
        const int n = static_cast<int>(X.rows());
        if (n == 0) throw EmptyInputError("cannot train boosted trees on zero samples");
        options.features_per_split = 0;  // boosting uses every feature
        TrainResult result;
        result.model = std::make_unique<GbtRegressor>();
        result.model->base_ = y.mean();
        result.model->learning_rate_ = learning_rate;

        Eigen::VectorXd residual = y.array() - result.model->base_;
        result.loss_curve.push_back(residual.squaredNorm() / n);

        const int sample_size = std::max(1, static_cast<int>(std::ceil(subsample * n)));
        std::vector<int> all_rows(n);
        for (int i = 0; i < n; ++i) all_rows[i] = i;
        for (int t = 0; t < n_trees; ++t) {
            std::vector<int> rows = all_rows;
            if (sample_size < n) {
                // partial Fisher-Yates, written out so the draw sequence does
                // not depend on the standard library's shuffle internals
                for (int i = 0; i < sample_size; ++i) {
                    const int j =
                        i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
                    std::swap(rows[i], rows[j]);
                }
                rows.resize(sample_size);
                std::sort(rows.begin(), rows.end());
            }
            const RegressionTree tree = RegressionTree::grow(X, residual, rows, options, &rng);
            for (int i = 0; i < n; ++i) {
                residual(i) -= learning_rate * tree.predict_row(X.row(i));
            }
            result.model->trees_.push_back(tree);
            result.loss_curve.push_back(residual.squaredNorm() / n);
        }
        return result;
    }

    double predict_one(const Eigen::RowVectorXd& scaled_row,
                       const Eigen::RowVectorXd& raw_row) const override {
        (void)raw_row;
        double out = base_;
        for (const auto& tree : trees_) out += learning_rate_ * tree.predict_row(scaled_row);
        return out;
    }

    std::string kind() const override { return "gbt"; }

    nlohmann::json to_json() const override {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : trees_) trees.push_back(tree.to_json());
        return {{"kind", "gbt"},
                {"base", base_},
                {"learning_rate", learning_rate_},
                {"trees", std::move(trees)}};
    }

    static std::unique_ptr<GbtRegressor> from_json(const nlohmann::json& j) {
        auto model = std::make_unique<GbtRegressor>();
        model->base_ = detail::require_number(j, "base");
        model->learning_rate_ = detail::require_number(j, "learning_rate");
        if (!j.contains("trees") || !j["trees"].is_array()) {
            throw IntegrityError("gbt payload must hold a tree array");
        }
        for (const auto& tree : j["trees"]) model->trees_.push_back(RegressionTree::from_json(tree));
        return model;
    }

    double base() const { return base_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }

private:
    double base_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<RegressionTree> trees_;
};

}  // namespace glucast
