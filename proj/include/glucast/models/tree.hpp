// Least-squares regression tree. Splits maximize variance reduction; a
// candidate is accepted only when strictly better than the incumbent, and
// features and thresholds are scanned in ascending order, so ties resolve to
// the lowest feature index and then the lowest threshold. That rule plus
// midpoint thresholds makes every tree a pure function of (data, rng stream).
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "glucast/core/errors.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;  // mean target of the node's training rows
    int left = -1;
    int right = -1;
};

struct TreeOptions {
    int max_depth = 12;
    int min_samples_leaf = 1;
    int features_per_split = 0;  // 0 means consider every feature
};

class RegressionTree {
public:
    /// Grows a tree on the given training rows. The rng is consumed only when
    /// features_per_split restricts the candidate set, one draw per sampled
    /// feature per node, so the stream advances the same way on every run.
    static RegressionTree grow(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const std::vector<int>& rows, const TreeOptions& options,
                               std::mt19937_64* rng = nullptr) {
        if (rows.empty()) throw EmptyInputError("cannot grow a tree on zero rows");
        RegressionTree tree;
        std::vector<int> scratch = rows;
        tree.grow_node(X, y, scratch, 0, static_cast<int>(scratch.size()), 0, options, rng);
        return tree;
    }

    double predict_row(const Eigen::RowVectorXd& x) const {
        int at = 0;
        while (nodes_[at].feature >= 0) {
            at = x(nodes_[at].feature) <= nodes_[at].threshold ? nodes_[at].left
                                                               : nodes_[at].right;
        }
        return nodes_[at].value;
    }

    const std::vector<TreeNode>& nodes() const { return nodes_; }

    nlohmann::json to_json() const {
        const std::size_t n = nodes_.size();
        std::vector<double> feature(n), threshold(n), value(n), left(n), right(n);
        for (std::size_t i = 0; i < n; ++i) {
            feature[i] = nodes_[i].feature;
            threshold[i] = nodes_[i].threshold;
            value[i] = nodes_[i].value;
            left[i] = nodes_[i].left;
            right[i] = nodes_[i].right;
        }
        return {{"feature", doubles_to_base64(feature)},
                {"threshold", doubles_to_base64(threshold)},
                {"value", doubles_to_base64(value)},
                {"left", doubles_to_base64(left)},
                {"right", doubles_to_base64(right)}};
    }

    static RegressionTree from_json(const nlohmann::json& j) {
        auto decode = [&j](const char* key) {
            if (!j.contains(key) || !j[key].is_string()) {
                throw IntegrityError(std::string("tree payload is missing field '") + key + "'");
            }
            return base64_to_doubles(j[key].get<std::string>());
        };
        const std::vector<double> feature = decode("feature");
        const std::vector<double> threshold = decode("threshold");
        const std::vector<double> value = decode("value");
        const std::vector<double> left = decode("left");
        const std::vector<double> right = decode("right");
        const std::size_t n = feature.size();
        if (n == 0 || threshold.size() != n || value.size() != n || left.size() != n ||
            right.size() != n) {
            throw IntegrityError("tree payload arrays have inconsistent lengths");
        }
        RegressionTree tree;
        tree.nodes_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            TreeNode& node = tree.nodes_[i];
            node.feature = static_cast<int>(feature[i]);
            node.threshold = threshold[i];
            node.value = value[i];
            node.left = static_cast<int>(left[i]);
            node.right = static_cast<int>(right[i]);
            if (node.feature < 0) {
                if (node.left != -1 || node.right != -1) {
                    throw IntegrityError("tree payload leaf with children");
                }
            } else {
                // children were numbered after their parent when the tree was
                // grown, which also guarantees prediction terminates
                const bool left_ok = node.left > static_cast<int>(i) &&
                                     node.left < static_cast<int>(n);
                const bool right_ok = node.right > static_cast<int>(i) &&
                                      node.right < static_cast<int>(n);
                if (!left_ok || !right_ok) {
                    throw IntegrityError("tree payload has out-of-order node links");
                }
            }
        }
        return tree;
    }

private:
    std::vector<TreeNode> nodes_;

    struct SplitChoice {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
        int left_count = 0;
    };

    // Builds the node for rows[begin, begin+count) and returns its id.
    // Children reorder that span in place (left partition first).
    int grow_node(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& rows,
                  int begin, int count, int depth, const TreeOptions& options,
                  std::mt19937_64* rng) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        double sum = 0.0;
        for (int i = begin; i < begin + count; ++i) sum += y(rows[i]);
        nodes_[id].value = sum / count;

        if (depth >= options.max_depth || count < 2 * options.min_samples_leaf) return id;
        const SplitChoice split = best_split(X, y, rows, begin, count, sum, options, rng);
        if (split.feature < 0) return id;

        std::stable_partition(rows.begin() + begin, rows.begin() + begin + count,
                              [&](int row) { return X(row, split.feature) <= split.threshold; });
        nodes_[id].feature = split.feature;
        nodes_[id].threshold = split.threshold;
        const int left_id =
            grow_node(X, y, rows, begin, split.left_count, depth + 1, options, rng);
        const int right_id = grow_node(X, y, rows, begin + split.left_count,
                                       count - split.left_count, depth + 1, options, rng);
        nodes_[id].left = left_id;
        nodes_[id].right = right_id;
        return id;
    }

    SplitChoice best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const std::vector<int>& rows, int begin, int count, double sum,
                           const TreeOptions& options, std::mt19937_64* rng) const {
        const int p = static_cast<int>(X.cols());
        std::vector<int> candidates(p);
        for (int j = 0; j < p; ++j) candidates[j] = j;
        if (options.features_per_split > 0 && options.features_per_split < p) {
            if (rng == nullptr) {
                throw InvalidValueError("feature subsampling requires a random generator");
            }
            for (int i = 0; i < options.features_per_split; ++i) {
                const int j = i + static_cast<int>((*rng)() % static_cast<std::uint64_t>(p - i));
                std::swap(candidates[i], candidates[j]);
            }
            candidates.resize(options.features_per_split);
            std::sort(candidates.begin(), candidates.end());
        }

        SplitChoice best;
        std::vector<int> order(rows.begin() + begin, rows.begin() + begin + count);
        const double parent_score = sum * sum / count;
        for (int feature : candidates) {
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double va = X(a, feature);
                const double vb = X(b, feature);
                return va < vb || (va == vb && a < b);
            });
            double left_sum = 0.0;
            for (int k = 0; k + 1 < count; ++k) {
                left_sum += y(order[k]);
                const int left_count = k + 1;
                const int right_count = count - left_count;
                if (left_count < options.min_samples_leaf) continue;
                if (right_count < options.min_samples_leaf) break;
                const double lo = X(order[k], feature);
                const double hi = X(order[k + 1], feature);
                if (lo == hi) continue;
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / left_count +
                                    right_sum * right_sum / right_count - parent_score;
                if (gain > best.gain) {
                    best.feature = feature;
                    // midpoint, unless rounding lands on hi (adjacent doubles):
                    // the split rule is x <= threshold, so the threshold must
                    // stay strictly below the first right-hand value
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold < hi)) threshold = lo;
                    best.threshold = threshold;
                    best.gain = gain;
                    best.left_count = left_count;
                }
            }
        }
        return best;
    }
};

}  // namespace glucast
