// The seven workspace commands behind the `glucast` binary:
//
//   setup_directories   create the data/ tree
//   parse               acquire a source and write the canonical raw CSV
//   generate_config     validate flags against a raw file, write config JSON
//   train_model         fit configured models, write artifacts
//   calculate_metrics   score artifacts on the held-out split, write tables
//   draw_plots          render scatter / trajectories / single SVGs
//   set_unit            persist the display unit
//
// Results land in files; everything printed here goes to standard error.
// Every command except setup refuses to run outside an initialized
// workspace, and the whole chain is deterministic: re-running a command with
// the same inputs rewrites byte-identical outputs.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "glucast/cli/pipeline.hpp"
#include "glucast/cli/workspace.hpp"
#include "glucast/core/config.hpp"
#include "glucast/core/errors.hpp"
#include "glucast/core/time.hpp"
#include "glucast/core/units.hpp"
#include "glucast/parsers/registry.hpp"
#include "glucast/report/plots.hpp"
#include "glucast/report/table.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast::cli {

namespace detail {

inline SourceKind source_kind_from_name(const std::string& name) {
    if (name == "nightscout") return SourceKind::NIGHTSCOUT;
    if (name == "apple_health") return SourceKind::APPLE_HEALTH;
    if (name == "ohio_t1dm") return SourceKind::OHIO_T1DM;
    if (name == "synthetic") return SourceKind::SYNTHETIC;
    return SourceKind::CSV;  // registry lookup rejects unknown names first
}

/// The horizons called out in summaries: 30/60/120 when the grid reaches
/// them, otherwise the final horizon alone.
inline std::vector<int> highlight_minutes(const PipelineConfig& config) {
    std::vector<int> minutes;
    for (int m : {30, 60, 120}) {
        if (m % config.interval_minutes == 0 && m <= config.prediction_horizon_minutes) {
            minutes.push_back(m);
        }
    }
    if (minutes.empty()) minutes.push_back(config.prediction_horizon_minutes);
    return minutes;
}

inline double column_rmse(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets,
                          Eigen::Index h) {
    return std::sqrt((predictions.col(h) - targets.col(h)).squaredNorm() /
                     static_cast<double>(predictions.rows()));
}

inline std::string rmse_highlights(const PipelineConfig& config,
                                   const Eigen::MatrixXd& predictions,
                                   const Eigen::MatrixXd& targets, GlucoseUnit unit) {
    std::string out = "RMSE (" + unit_to_string(unit) + ")";
    for (int m : highlight_minutes(config)) {
        const Eigen::Index h = m / config.interval_minutes - 1;
        const double value =
            convert_glucose(column_rmse(predictions, targets, h), GlucoseUnit::MGDL, unit);
        out += " " + std::to_string(m) + "min=" + format_fixed(value, 4);
    }
    return out;
}

struct ParseOptions {
    std::string source;
    std::string location;
    std::string token;
    std::string start;
    std::string end;
    std::string output_name;
    long long seed = 0;
    int days = 0;  // 0 means "flag not given"
    bool seed_given = false;
};

struct GenerateConfigOptions {
    std::string data;
    std::string output_name;
    int prediction_horizon = 120;
    int num_lagged_samples = 12;
    std::vector<std::string> features = {kColCgm};
    std::vector<std::string> what_if;
    double test_fraction = 0.25;
    std::vector<std::string> models = {"ridge", "locf_baseline"};
};

inline void cmd_setup_directories(const std::filesystem::path& root) {
    const Workspace workspace = setup_workspace(root);
    for (const auto& dir : workspace.subdirectories()) {
        std::cerr << "ready: " << dir.string() << "\n";
    }
}

inline void cmd_parse(const std::filesystem::path& root, const ParseOptions& opt) {
    Workspace workspace(root);
    workspace.require_initialized();

    SourceDescriptor desc;
    desc.kind = source_kind_from_name(opt.source);
    desc.location = opt.location;
    if (!opt.token.empty()) desc.credentials = opt.token;
    if (opt.start.empty() != opt.end.empty()) {
        throw UsageError("--start and --end must be given together");
    }
    if (!opt.start.empty()) {
        desc.time_range = TimeRange{parse_timestamp(opt.start), parse_timestamp(opt.end)};
    }
    if (opt.seed_given) desc.params["seed"] = static_cast<double>(opt.seed);
    if (opt.days > 0) desc.params["days"] = static_cast<double>(opt.days);

    std::string name = opt.output_name;
    if (name.empty()) {
        name = opt.source == "synthetic" || opt.location.empty()
                   ? opt.source
                   : std::filesystem::path(opt.location).stem().string();
    }
    check_plain_name(name, "output name");

    static const SourceRegistry registry;
    const MergedData merged = registry.acquire(opt.source, desc, 5);
    const std::filesystem::path out = workspace.raw_dir() / (name + ".csv");
    write_raw_csv(merged, out.string());

    std::cerr << "wrote " << out.string() << " (" << merged.frame.size() << " grid points)\n";
    for (const auto& column : merged.frame.column_names()) {
        const auto& present = merged.frame.column(column).present;
        const auto count = std::count(present.begin(), present.end(), true);
        std::cerr << "  " << column << ": " << count << " records\n";
    }
}

inline void cmd_generate_config(const std::filesystem::path& root,
                                const GenerateConfigOptions& opt) {
    Workspace workspace(root);
    workspace.require_initialized();

    std::string data_file = opt.data;
    if (data_file.size() < 4 || data_file.substr(data_file.size() - 4) != ".csv") {
        data_file += ".csv";
    }
    check_plain_name(data_file, "raw dataset name");
    const std::filesystem::path raw = workspace.raw_dir() / data_file;
    if (!std::filesystem::exists(raw)) {
        throw IoError("raw dataset not found: '" + raw.string() + "'; run parse first");
    }

    // flags are validated against what the raw file actually provides
    const DatasetFrame frame = merge_to_frame(parse_csv(raw.string()), 5);
    for (const auto& signal : opt.features) {
        if (!frame.has_column(signal)) {
            std::string available;
            for (const auto& column : frame.column_names()) {
                if (!available.empty()) available += ", ";
                available += column;
            }
            throw SchemaError("signal '" + signal + "' is not available in '" + data_file +
                              "' (available: " + available + ")");
        }
    }

    PipelineConfig config;
    config.data_file = data_file;
    config.prediction_horizon_minutes = opt.prediction_horizon;
    config.num_lagged_samples = opt.num_lagged_samples;
    config.feature_signals = opt.features;
    config.what_if_signals = opt.what_if;
    config.test_fraction = opt.test_fraction;
    config.unit = load_settings(workspace).unit;
    for (const auto& name : opt.models) {
        ModelSpecConfig spec;
        spec.name = canonical_model_name(name);
        config.model_specs.push_back(std::move(spec));
    }
    config.validate();

    std::string config_name = opt.output_name;
    if (config_name.empty()) config_name = data_file.substr(0, data_file.size() - 4);
    save_config(workspace, config_name, config);
    std::cerr << "wrote " << config_path(workspace, config_name).string() << " (hash "
              << config_hash(config) << ")\n";
}

inline void cmd_train_model(const std::filesystem::path& root, const std::string& config_name,
                            const std::string& only_model) {
    Workspace workspace(root);
    workspace.require_initialized();
    const PipelineConfig config = load_config(workspace, config_name);
    const PreparedData prepared = prepare_data(workspace, config);

    std::vector<std::string> requested;
    if (!only_model.empty()) requested.push_back(only_model);
    for (const auto& spec : select_models(config, requested)) {
        FitOutcome outcome =
            fit_model(spec, prepared.train, prepared.scaler, prepared.hash,
                      config.interval_minutes, static_cast<std::uint64_t>(config.random_seed));
        const std::filesystem::path out = artifact_path(workspace, spec.name, config_name);
        save_model(outcome.model, out);

        int converged = 0;
        int singular = 0;
        for (const auto& horizon : outcome.report.horizons) {
            if (horizon.converged) ++converged;
            if (horizon.singular) ++singular;
        }
        const Eigen::MatrixXd fit_predictions = predict(outcome.model, prepared.train.features);
        std::cerr << spec.name << ": " << converged << "/" << outcome.report.horizons.size()
                  << " horizons converged";
        if (singular > 0) std::cerr << ", " << singular << " singular";
        std::cerr << "; training "
                  << detail::rmse_highlights(config, fit_predictions, prepared.train.targets,
                                             GlucoseUnit::MGDL)
                  << "\n";
        std::cerr << "wrote " << out.string() << "\n";
    }
}

inline void cmd_calculate_metrics(const std::filesystem::path& root,
                                  const std::string& config_name,
                                  const std::vector<std::string>& models) {
    Workspace workspace(root);
    workspace.require_initialized();
    const PipelineConfig config = load_config(workspace, config_name);
    const GlucoseUnit unit = load_settings(workspace).unit;
    const PreparedData prepared = prepare_data(workspace, config);

    std::vector<EvaluationReport> reports;
    for (const auto& spec : select_models(config, models)) {
        const TrainedModel model =
            load_artifact(workspace, spec.name, config_name, prepared.hash);
        const Eigen::MatrixXd predictions = predict(model, prepared.test.features);
        reports.push_back(evaluate_model(spec.name, prepared.hash, unit, prepared.test,
                                         predictions, config.interval_minutes));
        std::cerr << spec.name << ": test "
                  << detail::rmse_highlights(config, predictions, prepared.test.targets, unit)
                  << "\n";
    }

    auto write_tables = [&](const std::string& stem, const std::vector<EvaluationReport>& rs) {
        const std::filesystem::path base = workspace.reports_dir() / stem;
        glucast::detail::write_text_file(base.string() + ".csv",
                                         metrics_table(rs, TableFormat::CSV));
        glucast::detail::write_text_file(base.string() + ".json",
                                         metrics_table(rs, TableFormat::JSON));
        glucast::detail::write_text_file(base.string() + ".md",
                                         metrics_table(rs, TableFormat::MARKDOWN));
        std::cerr << "wrote " << base.string() << ".{csv,json,md}\n";
    };
    for (const auto& report : reports) {
        write_tables(report.model_name + "__" + config_name + "__metrics", {report});
    }
    write_tables("all__" + config_name + "__metrics", reports);
}

inline void cmd_draw_plots(const std::filesystem::path& root, const std::string& config_name,
                           const std::vector<std::string>& models,
                           const std::string& plot_type) {
    Workspace workspace(root);
    workspace.require_initialized();
    const PipelineConfig config = load_config(workspace, config_name);
    const GlucoseUnit unit = load_settings(workspace).unit;
    const PreparedData prepared = prepare_data(workspace, config);
    const SupervisedSet& test = prepared.test;

    for (const auto& spec : select_models(config, models)) {
        const TrainedModel model =
            load_artifact(workspace, spec.name, config_name, prepared.hash);
        const Eigen::MatrixXd predictions = predict(model, test.features);
        const std::filesystem::path out =
            workspace.figures_dir() / (spec.name + "__" + config_name + "__" + plot_type + ".svg");

        if (plot_type == "scatter") {
            std::vector<ScatterSeries> series;
            for (int m : detail::highlight_minutes(config)) {
                const Eigen::Index h = m / config.interval_minutes - 1;
                ScatterSeries s;
                s.horizon_minutes = m;
                s.pairs.reference.assign(test.targets.col(h).data(),
                                         test.targets.col(h).data() + test.rows());
                s.pairs.predicted.resize(static_cast<std::size_t>(test.rows()));
                for (Eigen::Index i = 0; i < test.rows(); ++i) {
                    s.pairs.predicted[static_cast<std::size_t>(i)] = predictions(i, h);
                }
                series.push_back(std::move(s));
            }
            render_scatter(std::move(series), unit, spec.name, out);
        } else if (plot_type == "trajectories") {
            // thin the origins so the figure stays legible on long test runs
            const Eigen::Index stride = std::max<Eigen::Index>(1, test.rows() / 48);
            TrajectorySet set;
            set.interval_minutes = config.interval_minutes;
            std::vector<Eigen::Index> picked;
            for (Eigen::Index i = 0; i < test.rows(); i += stride) picked.push_back(i);
            set.predictions.resize(static_cast<Eigen::Index>(picked.size()),
                                   predictions.cols());
            for (std::size_t k = 0; k < picked.size(); ++k) {
                set.origins.push_back(test.sample_timestamps[static_cast<std::size_t>(picked[k])]);
                set.predictions.row(static_cast<Eigen::Index>(k)) = predictions.row(picked[k]);
            }
            render_trajectories(prepared.raw_frame, set, unit, spec.name, out);
        } else {  // "single"; the option validator admits nothing else
            const Eigen::Index mid = test.rows() / 2;
            const long long step_seconds = 60LL * config.interval_minutes;
            const Timestamp origin = test.sample_timestamps[static_cast<std::size_t>(mid)];
            const auto origin_bin = static_cast<std::size_t>(
                (origin - prepared.raw_frame.start()) / step_seconds);

            SinglePrediction sample;
            sample.origin = origin;
            sample.interval_minutes = config.interval_minutes;
            const std::size_t first_bin =
                origin_bin >= static_cast<std::size_t>(config.num_lagged_samples) - 1
                    ? origin_bin - static_cast<std::size_t>(config.num_lagged_samples) + 1
                    : 0;
            const auto& cgm = prepared.raw_frame.column(kColCgm);
            for (std::size_t i = first_bin; i <= origin_bin; ++i) {
                if (!cgm.present[i]) continue;
                sample.history_times.push_back(prepared.raw_frame.timestamp_at(i));
                sample.history_cgm.push_back(cgm.values[i]);
            }
            for (Eigen::Index h = 0; h < predictions.cols(); ++h) {
                sample.predicted.push_back(predictions(mid, h));
                sample.actual.push_back(test.targets(mid, h));
            }
            const std::size_t last_bin =
                std::min(prepared.raw_frame.size() - 1,
                         origin_bin + static_cast<std::size_t>(config.horizon_steps()));
            auto collect = [&](const char* column,
                               std::vector<std::pair<Timestamp, double>>& events) {
                if (!prepared.raw_frame.has_column(column)) return;
                const auto& col = prepared.raw_frame.column(column);
                for (std::size_t i = first_bin; i <= last_bin; ++i) {
                    if (col.present[i] && col.values[i] > 0.0) {
                        events.emplace_back(prepared.raw_frame.timestamp_at(i), col.values[i]);
                    }
                }
            };
            collect(kColCarbs, sample.carb_events);
            collect(kColBolus, sample.bolus_events);
            render_single_prediction(sample, unit, spec.name, out);
        }
        std::cerr << "wrote " << out.string() << "\n";
    }
}

inline void cmd_set_unit(const std::filesystem::path& root, const std::string& unit_name) {
    Workspace workspace(root);
    workspace.require_initialized();
    WorkspaceSettings settings = load_settings(workspace);
    settings.unit = unit_from_string(unit_name);
    save_settings(workspace, settings);
    std::cerr << "display unit set to " << unit_to_string(settings.unit) << "\n";
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"blood glucose prediction workbench"};
    app.name("glucast");
    app.require_subcommand(1);
    app.fallthrough();

    std::string root = ".";
    app.add_option("--root", root, "workspace root directory")->capture_default_str();

    CLI::App* setup = app.add_subcommand("setup_directories", "create the data/ directory tree");

    detail::ParseOptions parse_opt;
    CLI::App* parse = app.add_subcommand("parse", "acquire a data source into data/raw");
    parse->add_option("--source", parse_opt.source, "source kind")->required();
    parse->add_option("--location", parse_opt.location, "file path or base URL");
    parse->add_option("--token", parse_opt.token, "API token for remote sources");
    parse->add_option("--start", parse_opt.start, "range start, RFC 3339");
    parse->add_option("--end", parse_opt.end, "range end, RFC 3339");
    parse->add_option("--output-name", parse_opt.output_name, "raw dataset name");
    parse->add_option("--seed", parse_opt.seed, "synthetic generator seed")
        ->each([&](const std::string&) { parse_opt.seed_given = true; });
    parse->add_option("--days", parse_opt.days, "synthetic length in days");

    detail::GenerateConfigOptions config_opt;
    CLI::App* generate =
        app.add_subcommand("generate_config", "write a pipeline configuration JSON");
    generate->add_option("--data", config_opt.data, "raw dataset the config is for")->required();
    generate->add_option("--output-name", config_opt.output_name, "configuration name");
    generate->add_option("--prediction-horizon", config_opt.prediction_horizon,
                         "prediction horizon in minutes")
        ->capture_default_str();
    generate->add_option("--num-lagged-samples", config_opt.num_lagged_samples,
                         "lookback length in samples")
        ->capture_default_str();
    generate->add_option("--features", config_opt.features, "input signals")
        ->delimiter(',')
        ->capture_default_str();
    generate->add_option("--what-if", config_opt.what_if, "assumed-known future signals")
        ->delimiter(',');
    generate->add_option("--test-fraction", config_opt.test_fraction,
                         "fraction of samples held out for testing")
        ->capture_default_str();
    generate->add_option("--models", config_opt.models, "models to configure")
        ->delimiter(',')
        ->capture_default_str();

    std::string train_config;
    std::string train_model_name;
    CLI::App* train = app.add_subcommand("train_model", "fit configured models");
    train->add_option("--config", train_config, "configuration name")->required();
    train->add_option("--model", train_model_name, "train only this model");

    std::string metrics_config;
    std::vector<std::string> metrics_models;
    CLI::App* metrics =
        app.add_subcommand("calculate_metrics", "evaluate trained models on the test split");
    metrics->add_option("--config", metrics_config, "configuration name")->required();
    metrics->add_option("--models", metrics_models, "models to evaluate")->delimiter(',');

    std::string plots_config;
    std::vector<std::string> plots_models;
    std::string plot_type;
    CLI::App* plots = app.add_subcommand("draw_plots", "render SVG figures");
    plots->add_option("--config", plots_config, "configuration name")->required();
    plots->add_option("--models", plots_models, "models to plot")->delimiter(',');
    plots->add_option("--plot-type", plot_type, "scatter, trajectories, or single")
        ->required()
        ->check(CLI::IsMember({"scatter", "trajectories", "single"}));

    std::string unit_name;
    CLI::App* unit = app.add_subcommand("set_unit", "persist the display unit");
    unit->add_option("--unit", unit_name, "mg/dL or mmol/L")
        ->required()
        ->check(CLI::IsMember({"mg/dL", "mmol/L"}));

    setup->callback([&] { detail::cmd_setup_directories(root); });
    parse->callback([&] { detail::cmd_parse(root, parse_opt); });
    generate->callback([&] { detail::cmd_generate_config(root, config_opt); });
    train->callback([&] { detail::cmd_train_model(root, train_config, train_model_name); });
    metrics->callback([&] { detail::cmd_calculate_metrics(root, metrics_config, metrics_models); });
    plots->callback([&] { detail::cmd_draw_plots(root, plots_config, plots_models, plot_type); });
    unit->callback([&] { detail::cmd_set_unit(root, unit_name); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace glucast::cli
