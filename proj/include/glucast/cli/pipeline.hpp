// Plumbing shared by the train/metrics/plots commands: locating files inside
// the workspace, loading configurations and raw datasets, and rebuilding the
// supervised split exactly as it looked at training time. The split is a
// pure function of the raw file and the configuration, so evaluation never
// needs to persist intermediate matrices; the configuration hash embedded in
// each artifact catches the case where the configuration moved on.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glucast/cli/workspace.hpp"
#include "glucast/core/config.hpp"
#include "glucast/core/errors.hpp"
#include "glucast/models/serialize.hpp"
#include "glucast/models/spec.hpp"
#include "glucast/models/trained_model.hpp"
#include "glucast/parsers/csv.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/preprocess/featurize.hpp"
#include "glucast/preprocess/impute.hpp"
#include "glucast/preprocess/scaler.hpp"
#include "glucast/preprocess/split.hpp"

namespace glucast::cli {

inline std::filesystem::path raw_path(const Workspace& workspace, const std::string& data_file) {
    check_plain_name(data_file, "raw dataset name");
    return workspace.raw_dir() / data_file;
}

inline std::filesystem::path config_path(const Workspace& workspace, const std::string& name) {
    check_plain_name(name, "configuration name");
    return workspace.configurations_dir() / (name + ".json");
}

inline std::filesystem::path artifact_path(const Workspace& workspace,
                                           const std::string& model_name,
                                           const std::string& config_name) {
    return workspace.trained_models_dir() / (model_name + "__" + config_name + ".json");
}

inline void save_config(const Workspace& workspace, const std::string& name,
                        const PipelineConfig& config) {
    const std::filesystem::path path = config_path(workspace, name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write configuration '" + path.string() + "'");
    out << config_to_json(config).dump(2) << "\n";
    if (!out) throw IoError("failed writing configuration '" + path.string() + "'");
}

inline PipelineConfig load_config(const Workspace& workspace, const std::string& name) {
    const std::filesystem::path path = config_path(workspace, name);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("configuration '" + name + "' not found at '" + path.string() +
                      "'; run generate_config first");
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw SchemaError("configuration '" + path.string() + "' is not valid JSON");
    }
    return config_from_json(j);
}

inline MergedData load_raw(const Workspace& workspace, const PipelineConfig& config) {
    const std::filesystem::path path = raw_path(workspace, config.data_file);
    if (!std::filesystem::exists(path)) {
        throw IoError("raw dataset not found: '" + path.string() + "'; run parse first");
    }
    return merge_records(parse_csv(path.string()), config.interval_minutes);
}

/// Everything the evaluation side needs, rebuilt deterministically.
struct PreparedData {
    DatasetFrame raw_frame;      // merged measurements, gaps intact (for plots)
    DatasetFrame imputed_frame;  // modeling view after gap filling
    SupervisedSet train;
    SupervisedSet test;
    ScalerParams scaler;
    std::string hash;  // of the configuration the split came from
};

inline PreparedData prepare_data(const Workspace& workspace, const PipelineConfig& config) {
    PreparedData prepared;
    prepared.hash = config_hash(config);
    MergedData merged = load_raw(workspace, config);
    prepared.raw_frame = merged.frame;
    prepared.imputed_frame = impute(merged.frame, config.imputation_max_gap_minutes);

    // one sample needs lookback + horizon grid points; one more guarantees
    // both sides of the chronological split are non-empty
    const std::size_t needed = static_cast<std::size_t>(config.num_lagged_samples) +
                               static_cast<std::size_t>(config.horizon_steps()) + 1;
    if (prepared.imputed_frame.size() < needed) {
        throw InsufficientDataError(
            "raw dataset '" + config.data_file + "' spans " +
            std::to_string(prepared.imputed_frame.size()) + " grid points but this " +
            "configuration needs at least " + std::to_string(needed) + " (lookback " +
            std::to_string(config.num_lagged_samples) + " + horizon " +
            std::to_string(config.horizon_steps()) + " steps + 1)");
    }
    const SupervisedSet supervised = featurize(prepared.imputed_frame, config);
    if (supervised.rows() < 2) {
        throw InsufficientDataError(
            "only " + std::to_string(supervised.rows()) + " usable samples remain after " +
            "featurization; need at least 2 (the dataset must span at least " +
            std::to_string(needed) + " grid points with the configured signals present)");
    }
    auto [train, test] = split(supervised, config.test_fraction);
    prepared.train = std::move(train);
    prepared.test = std::move(test);
    prepared.scaler = config.scaling == ScalingMode::STANDARDIZE
                          ? scaler_fit(prepared.train)
                          : scaler_identity(prepared.train.cols());
    return prepared;
}

/// Picks the configured model specs matching the requested names
/// (case-insensitive). No request means every configured model.
inline std::vector<ModelSpecConfig> select_models(const PipelineConfig& config,
                                                  const std::vector<std::string>& requested) {
    if (config.model_specs.empty()) {
        throw SchemaError("configuration lists no models to work with");
    }
    if (requested.empty()) return config.model_specs;
    std::vector<ModelSpecConfig> selected;
    for (const std::string& raw_name : requested) {
        const std::string wanted = canonical_model_name(raw_name);
        bool found = false;
        for (const auto& spec : config.model_specs) {
            if (spec.name == wanted) {
                selected.push_back(spec);
                found = true;
                break;
            }
        }
        if (!found) {
            std::string configured;
            for (const auto& spec : config.model_specs) {
                if (!configured.empty()) configured += ", ";
                configured += spec.name;
            }
            throw SchemaError("model '" + raw_name + "' is not part of this configuration " +
                              "(configured: " + configured + ")");
        }
    }
    return selected;
}

inline TrainedModel load_artifact(const Workspace& workspace, const std::string& model_name,
                                  const std::string& config_name,
                                  const std::string& expected_hash) {
    const std::filesystem::path path = artifact_path(workspace, model_name, config_name);
    if (!std::filesystem::exists(path)) {
        throw IoError("no trained artifact for model '" + model_name + "' at '" +
                      path.string() + "'; run train_model first");
    }
    TrainedModel model = load_model(path);
    if (model.config_hash != expected_hash) {
        throw StaleModelError("artifact '" + path.string() +
                              "' was trained against a different configuration " +
                              "(hash " + model.config_hash + ", expected " + expected_hash +
                              "); re-run train_model");
    }
    return model;
}

}  // namespace glucast::cli
