// Model artifact (de)serialization. The on-disk form is a single JSON
// document with sorted keys and base64-packed little-endian float64 arrays,
// so identical models produce identical bytes and numeric state survives the
// round trip bit for bit. Version drift raises FormatVersionError; any other
// structural damage raises IntegrityError.
#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "glucast/core/errors.hpp"
#include "glucast/models/forest.hpp"
#include "glucast/models/gbt.hpp"
#include "glucast/models/regressor.hpp"
#include "glucast/models/spec.hpp"
#include "glucast/models/trained_model.hpp"
#include "glucast/preprocess/scaler.hpp"

namespace glucast {

inline std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw IntegrityError("model payload entry has no 'kind' tag");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "linear") return LinearRegressor::from_json(j);
    if (kind == "locf") return LocfRegressor::from_json(j);
    if (kind == "forest") return ForestRegressor::from_json(j);
    if (kind == "gbt") return GbtRegressor::from_json(j);
    throw IntegrityError("model payload has unknown regressor kind '" + kind + "'");
}

inline nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json horizons = nlohmann::json::array();
    for (int h = 1; h <= model.horizon_steps(); ++h) {
        horizons.push_back(h * model.interval_minutes);
    }
    nlohmann::json payload = nlohmann::json::array();
    for (const auto& predictor : model.predictors) payload.push_back(predictor->to_json());
    return {{"format_version", kModelFormatVersion},
            {"spec", {{"name", model.spec.name}, {"hyperparameters", model.spec.hyperparameters}}},
            {"feature_names", model.feature_names},
            {"config_hash", model.config_hash},
            {"scaler",
             {{"mean", detail::encode_vector(model.scaler.mean)},
              {"scale", detail::encode_vector(model.scaler.scale)}}},
            {"horizons", std::move(horizons)},
            {"payload", std::move(payload)}};
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw IntegrityError("model artifact root must be a JSON object");
    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
        throw IntegrityError("model artifact has no format_version");
    }
    const int version = j["format_version"].get<int>();
    if (version != kModelFormatVersion) {
        throw FormatVersionError("model artifact format_version " + std::to_string(version) +
                                 " is not supported (expected " +
                                 std::to_string(kModelFormatVersion) + ")");
    }
    try {
        TrainedModel model;
        model.spec.name = j.at("spec").at("name").get<std::string>();
        model.spec.hyperparameters =
            j.at("spec").at("hyperparameters").get<std::map<std::string, double>>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.config_hash = j.at("config_hash").get<std::string>();
        model.scaler.mean = detail::decode_vector(j.at("scaler").at("mean"), "scaler.mean");
        model.scaler.scale = detail::decode_vector(j.at("scaler").at("scale"), "scaler.scale");
        const auto horizons = j.at("horizons").get<std::vector<int>>();
        if (horizons.empty()) throw IntegrityError("model artifact lists no horizons");
        model.interval_minutes = horizons.front();
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            if (horizons[h] != static_cast<int>(h + 1) * model.interval_minutes) {
                throw IntegrityError("model artifact horizon grid is not uniform");
            }
        }
        if (!j.at("payload").is_array() || j.at("payload").size() != horizons.size()) {
            throw IntegrityError("model artifact payload does not match its horizon count");
        }
        for (const auto& entry : j.at("payload")) {
            model.predictors.push_back(regressor_from_json(entry));
        }
        const auto width = static_cast<Eigen::Index>(model.feature_names.size());
        if (model.scaler.mean.size() != width || model.scaler.scale.size() != width) {
            throw IntegrityError("model artifact scaler width does not match feature names");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(std::string("model artifact is structurally damaged: ") + e.what());
    }
}

inline void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw IntegrityError("model artifact " + path.string() + " is not valid JSON");
    }
    return model_from_json(j);
}

}  // namespace glucast
