// The full reproducibility record for one pipeline run, persisted as a
// strict-schema JSON document (config_version 1, unknown fields rejected).
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glucast/core/errors.hpp"
#include "glucast/core/frame.hpp"
#include "glucast/core/units.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

enum class ScalingMode { NONE, STANDARDIZE };

inline std::string scaling_to_string(ScalingMode m) {
    return m == ScalingMode::NONE ? "NONE" : "STANDARDIZE";
}

inline ScalingMode scaling_from_string(const std::string& s) {
    if (s == "NONE") return ScalingMode::NONE;
    if (s == "STANDARDIZE") return ScalingMode::STANDARDIZE;
    throw SchemaError("unknown scaling mode '" + s + "'");
}

/// One entry of the model zoo with its hyperparameter overrides. Names are
/// canonical lowercase (ols, ridge, lasso, elastic_net, huber, random_forest,
/// gbt, locf_baseline); defaults are resolved by the model registry.
struct ModelSpecConfig {
    std::string name;
    std::map<std::string, double> hyperparameters;
};

struct PipelineConfig {
    std::string data_file;
    std::optional<std::string> subject_id;
    int interval_minutes = 5;
    int prediction_horizon_minutes = 120;
    int num_lagged_samples = 12;
    std::vector<std::string> feature_signals = {kColCgm};
    std::vector<std::string> what_if_signals;
    double test_fraction = 0.25;
    int imputation_max_gap_minutes = 30;
    ScalingMode scaling = ScalingMode::STANDARDIZE;
    std::vector<ModelSpecConfig> model_specs;
    GlucoseUnit unit = GlucoseUnit::MGDL;
    long long random_seed = 0;

    int horizon_steps() const { return prediction_horizon_minutes / interval_minutes; }

    void validate() const {
        if (data_file.empty()) throw SchemaError("config: data_file must be set");
        if (interval_minutes < 1) throw SchemaError("config: interval_minutes must be positive");
        if (prediction_horizon_minutes < 1 ||
            prediction_horizon_minutes % interval_minutes != 0) {
            throw SchemaError(
                "config: prediction_horizon_minutes must be a positive multiple of "
                "interval_minutes");
        }
        if (num_lagged_samples < 1) {
            throw SchemaError("config: num_lagged_samples must be positive");
        }
        if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
            throw SchemaError("config: test_fraction must lie in (0, 1)");
        }
        if (imputation_max_gap_minutes < 0) {
            throw SchemaError("config: imputation_max_gap_minutes must be non-negative");
        }
        if (std::find(feature_signals.begin(), feature_signals.end(), kColCgm) ==
            feature_signals.end()) {
            throw SchemaError("config: feature_signals must include CGM");
        }
        for (const auto& s : what_if_signals) {
            if (s == kColCgm) {
                throw SchemaError("config: CGM cannot be a what-if signal");
            }
            if (std::find(feature_signals.begin(), feature_signals.end(), s) ==
                feature_signals.end()) {
                throw SchemaError("config: what-if signal '" + s +
                                  "' is not in feature_signals");
            }
        }
    }
};

inline constexpr int kConfigVersion = 1;

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["config_version"] = kConfigVersion;
    j["data_file"] = c.data_file;
    if (c.subject_id) j["subject_id"] = *c.subject_id;
    j["interval_minutes"] = c.interval_minutes;
    j["prediction_horizon_minutes"] = c.prediction_horizon_minutes;
    j["num_lagged_samples"] = c.num_lagged_samples;
    j["feature_signals"] = c.feature_signals;
    j["what_if_signals"] = c.what_if_signals;
    j["test_fraction"] = c.test_fraction;
    j["imputation_max_gap_minutes"] = c.imputation_max_gap_minutes;
    j["scaling"] = scaling_to_string(c.scaling);
    nlohmann::json specs = nlohmann::json::array();
    for (const auto& m : c.model_specs) {
        specs.push_back({{"name", m.name}, {"hyperparameters", m.hyperparameters}});
    }
    j["model_specs"] = specs;
    j["unit"] = unit_to_string(c.unit);
    j["random_seed"] = c.random_seed;
    return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "config_version",   "data_file",
        "subject_id",       "interval_minutes",
        "prediction_horizon_minutes", "num_lagged_samples",
        "feature_signals",  "what_if_signals",
        "test_fraction",    "imputation_max_gap_minutes",
        "scaling",          "model_specs",
        "unit",             "random_seed"};
    if (!j.is_object()) throw SchemaError("config document must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw SchemaError("config: unknown field '" + it.key() + "'");
        }
    }
    auto require = [&](const char* key) -> const nlohmann::json& {
        auto it = j.find(key);
        if (it == j.end()) throw SchemaError(std::string("config: missing field '") + key + "'");
        return *it;
    };
    if (require("config_version").get<int>() != kConfigVersion) {
        throw SchemaError("config: unsupported config_version");
    }
    PipelineConfig c;
    c.data_file = require("data_file").get<std::string>();
    if (auto it = j.find("subject_id"); it != j.end() && !it->is_null()) {
        c.subject_id = it->get<std::string>();
    }
    c.interval_minutes = require("interval_minutes").get<int>();
    c.prediction_horizon_minutes = require("prediction_horizon_minutes").get<int>();
    c.num_lagged_samples = require("num_lagged_samples").get<int>();
    c.feature_signals = require("feature_signals").get<std::vector<std::string>>();
    c.what_if_signals = require("what_if_signals").get<std::vector<std::string>>();
    c.test_fraction = require("test_fraction").get<double>();
    c.imputation_max_gap_minutes = require("imputation_max_gap_minutes").get<int>();
    c.scaling = scaling_from_string(require("scaling").get<std::string>());
    for (const auto& m : require("model_specs")) {
        ModelSpecConfig spec;
        spec.name = m.at("name").get<std::string>();
        if (auto it = m.find("hyperparameters"); it != m.end()) {
            spec.hyperparameters = it->get<std::map<std::string, double>>();
        }
        c.model_specs.push_back(std::move(spec));
    }
    c.unit = unit_from_string(require("unit").get<std::string>());
    c.random_seed = require("random_seed").get<long long>();
    c.validate();
    return c;
}

/// Content hash tying model artifacts to the exact configuration that
/// produced them.
inline std::string config_hash(const PipelineConfig& c) {
    return to_hex16(fnv1a64(config_to_json(c).dump()));
}

}  // namespace glucast
