// Model zoo registry: canonical names, allowed hyperparameters, defaults and
// range checks. A spec is resolved exactly once before fitting so that the
// stored artifact carries every effective value, seed included.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "glucast/core/config.hpp"
#include "glucast/core/errors.hpp"

namespace glucast {

using ModelSpec = ModelSpecConfig;

namespace detail {

struct HyperparameterRule {
    std::string key;
    double default_value;
    double min;
    double max;
    bool min_open;   // value must be strictly above min
    bool integral;   // value must be a whole number
};

struct ModelRule {
    std::string name;
    std::vector<HyperparameterRule> params;
    bool seeded;  // takes a random_seed filled from the pipeline seed when absent
};

inline const std::vector<ModelRule>& model_rules() {
    static const double kInf = std::numeric_limits<double>::infinity();
    static const std::vector<ModelRule> rules = {
        {"ols", {}, false},
        {"ridge", {{"alpha", 1.0, 0.0, kInf, false, false}}, false},
        {"lasso", {{"alpha", 1.0, 0.0, kInf, false, false}}, false},
        {"elastic_net",
         {{"alpha", 1.0, 0.0, kInf, false, false},
          {"l1_ratio", 0.5, 0.0, 1.0, false, false}},
         false},
        {"huber", {{"huber_delta", 25.0, 0.0, kInf, true, false}}, false},
        {"random_forest",
         {{"n_trees", 50.0, 1.0, 1e6, false, true},
          {"max_depth", 12.0, 1.0, 1e6, false, true},
          {"min_samples_leaf", 1.0, 1.0, 1e6, false, true},
          {"bootstrap", 1.0, 0.0, 1.0, false, true}},
         true},
        {"gbt",
         {{"n_trees", 100.0, 1.0, 1e6, false, true},
          {"max_depth", 3.0, 1.0, 1e6, false, true},
          {"learning_rate", 0.1, 0.0, 1.0, true, false},
          {"min_samples_leaf", 1.0, 1.0, 1e6, false, true},
          {"subsample", 1.0, 0.0, 1.0, true, false}},
         true},
        {"locf_baseline", {}, false},
    };
    return rules;
}

inline std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

inline std::vector<std::string> model_names() {
    std::vector<std::string> names;
    for (const auto& rule : detail::model_rules()) names.push_back(rule.name);
    return names;
}

/// Case-insensitive lookup of the canonical lowercase model name.
inline std::string canonical_model_name(const std::string& name) {
    const std::string folded = detail::lowercase(name);
    for (const auto& rule : detail::model_rules()) {
        if (rule.name == folded) return rule.name;
    }
    std::string available;
    for (const auto& rule : detail::model_rules()) {
        if (!available.empty()) available += ", ";
        available += rule.name;
    }
    throw SchemaError("unknown model '" + name + "' (available: " + available + ")");
}

/// Validates the hyperparameter map and bakes in defaults. Seeded models get
/// random_seed from `default_seed` unless the spec pins its own. The returned
/// spec is complete: fitting it twice gives bit-identical artifacts.
inline ModelSpec resolve_spec(const ModelSpec& spec, std::uint64_t default_seed) {
    ModelSpec resolved;
    resolved.name = canonical_model_name(spec.name);
    const detail::ModelRule* rule = nullptr;
    for (const auto& r : detail::model_rules()) {
        if (r.name == resolved.name) rule = &r;
    }
    for (const auto& [key, value] : spec.hyperparameters) {
        bool known = key == "random_seed" && rule->seeded;
        for (const auto& param : rule->params) {
            if (param.key == key) known = true;
        }
        if (!known) {
            throw SchemaError("model '" + resolved.name + "' does not take hyperparameter '" +
                              key + "'");
        }
    }
    for (const auto& param : rule->params) {
        auto it = spec.hyperparameters.find(param.key);
        double value = it == spec.hyperparameters.end() ? param.default_value : it->second;
        if (!std::isfinite(value) || value < param.min || value > param.max ||
            (param.min_open && value <= param.min)) {
            throw InvalidValueError("model '" + resolved.name + "': hyperparameter '" +
                                    param.key + "' out of range: " + std::to_string(value));
        }
        if (param.integral && value != std::floor(value)) {
            throw InvalidValueError("model '" + resolved.name + "': hyperparameter '" +
                                    param.key + "' must be a whole number, got " +
                                    std::to_string(value));
        }
        resolved.hyperparameters[param.key] = value;
    }
    if (rule->seeded) {
        auto it = spec.hyperparameters.find("random_seed");
        double seed = it == spec.hyperparameters.end() ? static_cast<double>(default_seed)
                                                       : it->second;
        if (!std::isfinite(seed) || seed < 0 || seed != std::floor(seed)) {
            throw InvalidValueError("model '" + resolved.name +
                                    "': random_seed must be a non-negative whole number");
        }
        resolved.hyperparameters["random_seed"] = seed;
    }
    return resolved;
}

inline double spec_param(const ModelSpec& resolved, const std::string& key) {
    auto it = resolved.hyperparameters.find(key);
    if (it == resolved.hyperparameters.end()) {
        throw SchemaError("resolved spec for '" + resolved.name + "' is missing '" + key + "'");
    }
    return it->second;
}

}  // namespace glucast
