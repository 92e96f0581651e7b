// Per-horizon prediction interface. Every regressor sees both views of the
// feature row: the standardized one (what linear and tree models train on)
// and the raw one (what the LOCF baseline echoes back).
#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "glucast/core/errors.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

class Regressor {
public:
    virtual ~Regressor() = default;
    virtual double predict_one(const Eigen::RowVectorXd& scaled_row,
                               const Eigen::RowVectorXd& raw_row) const = 0;
    virtual std::string kind() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

namespace detail {

inline std::string encode_vector(const Eigen::VectorXd& v) {
    return doubles_to_base64(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd decode_vector(const nlohmann::json& j, const std::string& what) {
    if (!j.is_string()) throw IntegrityError("model payload field '" + what + "' must be base64");
    const std::vector<double> values = base64_to_doubles(j.get<std::string>());
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

inline double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw IntegrityError("model payload is missing numeric field '" + key + "'");
    }
    return j[key].get<double>();
}

}  // namespace detail

class LinearRegressor : public Regressor {
public:
    LinearRegressor(Eigen::VectorXd weights, double intercept)
        : weights_(std::move(weights)), intercept_(intercept) {}

    double predict_one(const Eigen::RowVectorXd& scaled_row,
                       const Eigen::RowVectorXd& raw_row) const override {
        (void)raw_row;
        return scaled_row.dot(weights_) + intercept_;
    }

    std::string kind() const override { return "linear"; }

    nlohmann::json to_json() const override {
        return {{"kind", "linear"},
                {"weights", detail::encode_vector(weights_)},
                {"intercept", intercept_}};
    }

    static std::unique_ptr<LinearRegressor> from_json(const nlohmann::json& j) {
        return std::make_unique<LinearRegressor>(detail::decode_vector(j.at("weights"), "weights"),
                                                 detail::require_number(j, "intercept"));
    }

    const Eigen::VectorXd& weights() const { return weights_; }
    double intercept() const { return intercept_; }

private:
    Eigen::VectorXd weights_;
    double intercept_;
};

/// Last observation carried forward: repeats the newest raw CGM reading for
/// every future step. The benchmark floor every learner has to beat.
class LocfRegressor : public Regressor {
public:
    explicit LocfRegressor(int feature_index) : feature_index_(feature_index) {}

    double predict_one(const Eigen::RowVectorXd& scaled_row,
                       const Eigen::RowVectorXd& raw_row) const override {
        (void)scaled_row;
        if (feature_index_ < 0 || feature_index_ >= raw_row.size()) {
            throw ShapeError("locf feature index " + std::to_string(feature_index_) +
                             " outside row of width " + std::to_string(raw_row.size()));
        }
        return raw_row(feature_index_);
    }

    std::string kind() const override { return "locf"; }

    nlohmann::json to_json() const override {
        return {{"kind", "locf"}, {"feature_index", feature_index_}};
    }

    static std::unique_ptr<LocfRegressor> from_json(const nlohmann::json& j) {
        return std::make_unique<LocfRegressor>(
            static_cast<int>(detail::require_number(j, "feature_index")));
    }

private:
    int feature_index_;
};

}  // namespace glucast
