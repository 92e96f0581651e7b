// Workspace layout and persisted settings. Every command works inside a
// root directory holding data/{raw,configurations,trained_models,figures,
// reports}; setup creates the tree, everything else refuses to run until it
// exists. The display unit is the only global setting and lives in
// data/settings.json; stored datasets stay in mg/dL regardless.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glucast/core/errors.hpp"
#include "glucast/core/units.hpp"

namespace glucast::cli {

class Workspace {
public:
    explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path data_dir() const { return root_ / "data"; }
    std::filesystem::path raw_dir() const { return data_dir() / "raw"; }
    std::filesystem::path configurations_dir() const { return data_dir() / "configurations"; }
    std::filesystem::path trained_models_dir() const { return data_dir() / "trained_models"; }
    std::filesystem::path figures_dir() const { return data_dir() / "figures"; }
    std::filesystem::path reports_dir() const { return data_dir() / "reports"; }
    std::filesystem::path settings_path() const { return data_dir() / "settings.json"; }

    std::vector<std::filesystem::path> subdirectories() const {
        return {raw_dir(), configurations_dir(), trained_models_dir(), figures_dir(),
                reports_dir()};
    }

    bool initialized() const {
        for (const auto& dir : subdirectories()) {
            if (!std::filesystem::is_directory(dir)) return false;
        }
        return true;
    }

    void require_initialized() const {
        if (!initialized()) {
            throw UsageError("workspace at '" + root_.string() +
                             "' is not initialized; run setup_directories first");
        }
    }

private:
    std::filesystem::path root_;
};

struct WorkspaceSettings {
    GlucoseUnit unit = GlucoseUnit::MGDL;
};

inline void save_settings(const Workspace& workspace, const WorkspaceSettings& settings) {
    nlohmann::json j;
    j["unit"] = unit_to_string(settings.unit);
    std::ofstream out(workspace.settings_path(), std::ios::binary);
    if (!out) {
        throw IoError("cannot write settings file '" + workspace.settings_path().string() + "'");
    }
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing '" + workspace.settings_path().string() + "'");
}

/// Missing settings file means factory defaults; damaged content is an error.
inline WorkspaceSettings load_settings(const Workspace& workspace) {
    WorkspaceSettings settings;
    std::ifstream in(workspace.settings_path(), std::ios::binary);
    if (!in) return settings;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("unit") || !j["unit"].is_string()) {
        throw SchemaError("settings file '" + workspace.settings_path().string() +
                          "' is damaged; expected {\"unit\": \"mg/dL\"|\"mmol/L\"}");
    }
    settings.unit = unit_from_string(j["unit"].get<std::string>());
    return settings;
}

/// Creates the five-subdirectory layout. Idempotent: existing directories and
/// files are left untouched, only missing pieces are added.
inline Workspace setup_workspace(const std::filesystem::path& root) {
    Workspace workspace(root);
    for (const auto& dir : workspace.subdirectories()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec || !std::filesystem::is_directory(dir)) {
            throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
        }
    }
    if (!std::filesystem::exists(workspace.settings_path())) {
        save_settings(workspace, WorkspaceSettings{});
    }
    return workspace;
}

/// Output names become file names under data/; anything that could escape
/// the workspace is rejected up front.
inline void check_plain_name(const std::string& name, const std::string& what) {
    if (name.empty()) throw UsageError(what + " must not be empty");
    if (name == "." || name == ".." || name.find('/') != std::string::npos ||
        name.find('\\') != std::string::npos) {
        throw UsageError(what + " '" + name + "' must be a plain name without path separators");
    }
}

}  // namespace glucast::cli
