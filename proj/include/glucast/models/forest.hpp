// Random forest: bagged regression trees averaged at predict time. Each tree
// sees a bootstrap resample (one rng draw per row) and one third of the
// features per split, the classic regression-forest heuristic. Trees are
// grown sequentially from a single generator so a seed fixes the whole
// ensemble. bootstrap=0 disables resampling, which makes the forest
// deterministic in the data alone when every feature is considered.
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "glucast/models/regressor.hpp"
#include "glucast/models/tree.hpp"

namespace glucast {

class ForestRegressor : public Regressor {
public:
    ForestRegressor() = default;

    static std::unique_ptr<ForestRegressor> train(const Eigen::MatrixXd& X,
                                                  const Eigen::VectorXd& y, int n_trees,
                                                  TreeOptions options, bool bootstrap,
                                                  std::mt19937_64& rng) {
        const int n = static_cast<int>(X.rows());
        const int p = static_cast<int>(X.cols());
        if (n == 0) throw EmptyInputError("cannot train a forest on zero samples");
        if (options.features_per_split <= 0) options.features_per_split = (p + 2) / 3;
        auto forest = std::make_unique<ForestRegressor>();
        std::vector<int> rows(n);
        for (int t = 0; t < n_trees; ++t) {
            if (bootstrap) {
                for (int i = 0; i < n; ++i) {
                    rows[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
                }
            } else {
                for (int i = 0; i < n; ++i) rows[i] = i;
            }
            forest->trees_.push_back(RegressionTree::grow(X, y, rows, options, &rng));
        }
        return forest;
    }

    double predict_one(const Eigen::RowVectorXd& scaled_row,
                       const Eigen::RowVectorXd& raw_row) const override {
        (void)raw_row;
        double sum = 0.0;
        for (const auto& tree : trees_) sum += tree.predict_row(scaled_row);
        return sum / static_cast<double>(trees_.size());
    }

    std::string kind() const override { return "forest"; }

    nlohmann::json to_json() const override {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : trees_) trees.push_back(tree.to_json());
        return {{"kind", "forest"}, {"trees", std::move(trees)}};
    }

    static std::unique_ptr<ForestRegressor> from_json(const nlohmann::json& j) {
        if (!j.contains("trees") || !j["trees"].is_array() || j["trees"].empty()) {
            throw IntegrityError("forest payload must hold a non-empty tree array");
        }
        auto forest = std::make_unique<ForestRegressor>();
        for (const auto& tree : j["trees"]) forest->trees_.push_back(RegressionTree::from_json(tree));
        return forest;
    }

    const std::vector<RegressionTree>& trees() const { return trees_; }

private:
    std::vector<RegressionTree> trees_;
};

}  // namespace glucast
