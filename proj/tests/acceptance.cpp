// Acceptance gate: one line per criterion, pass/fail with the measured
// numbers, exit code 0 only if every criterion holds. Tolerances are pinned
// here, not read from anywhere else. Criteria cover solver equivalences,
// metric identities, error-grid partitioning, a synthetic forecasting
// benchmark against the LOCF baseline, the end-to-end CLI golden run,
// horizon coverage, display-unit correctness, train/test isolation, and the
// raw CSV round trip.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "glucast/cli/commands.hpp"
#include "glucast/core/config.hpp"
#include "glucast/core/units.hpp"
#include "glucast/metrics/error_grid.hpp"
#include "glucast/metrics/gs_rmse.hpp"
#include "glucast/metrics/scalar.hpp"
#include "glucast/models/linear.hpp"
#include "glucast/models/serialize.hpp"
#include "glucast/models/trained_model.hpp"
#include "glucast/parsers/csv.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/parsers/synthetic.hpp"
#include "glucast/parsers/xml.hpp"
#include "glucast/preprocess/featurize.hpp"
#include "glucast/preprocess/impute.hpp"
#include "glucast/preprocess/scaler.hpp"
#include "glucast/preprocess/split.hpp"
#include "glucast/util/random.hpp"
#include "test_util.hpp"

using namespace glucast;

namespace {

using Clock = std::chrono::steady_clock;

void check(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Instance {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

Instance random_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto n = static_cast<Eigen::Index>(20 + rng() % 181);  // <= 200
    const auto p = static_cast<Eigen::Index>(2 + rng() % 19);    // <= 20
    Instance inst;
    inst.X.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) inst.X(i, j) = standard_normal(rng);
    }
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; j += 2) truth(j) = standard_normal(rng) * 2.0;
    inst.y = inst.X * truth + Eigen::VectorXd::Constant(n, 3.0);
    for (Eigen::Index i = 0; i < n; ++i) inst.y(i) += 0.3 * standard_normal(rng);
    return inst;
}

/// Largest KKT violation of the lasso optimality conditions at `fit`,
/// measured on the centered problem the solver actually works on.
double lasso_kkt_violation(const Instance& inst, const LinearFit& fit, double alpha) {
    const auto n = static_cast<double>(inst.X.rows());
    const Eigen::RowVectorXd x_mean = inst.X.colwise().mean();
    const Eigen::MatrixXd Xc = inst.X.rowwise() - x_mean;
    const Eigen::VectorXd yc = inst.y.array() - inst.y.mean();
    const Eigen::VectorXd gradient = Xc.transpose() * (Xc * fit.weights - yc) / n;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < fit.weights.size(); ++j) {
        const double violation =
            fit.weights(j) != 0.0
                ? std::abs(gradient(j) + alpha * (fit.weights(j) > 0.0 ? 1.0 : -1.0))
                : std::max(0.0, std::abs(gradient(j)) - alpha);
        worst = std::max(worst, violation);
    }
    return worst;
}

int run_cli_quiet(std::vector<std::string> args, const std::filesystem::path& root) {
    args.push_back("--root");
    args.push_back(root.string());
    std::ostringstream sink;
    std::streambuf* old = std::cerr.rdbuf(sink.rdbuf());
    int code = 1;
    try {
        code = cli::run_cli(args);
    } catch (...) {
        std::cerr.rdbuf(old);
        throw;
    }
    std::cerr.rdbuf(old);
    return code;
}

void check_svg_well_formed(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    check(in.good(), "cannot open " + path.string());
    xml::Scanner scanner(in);
    std::size_t elements = 0;
    for (;;) {
        xml::Token tok = scanner.next();  // throws ParseError on damage
        if (tok.kind == xml::TokenKind::EndOfDocument) break;
        if (tok.kind == xml::TokenKind::ElementStart) {
            if (elements == 0) check(tok.name == "svg", path.string() + ": root is not <svg>");
            ++elements;
        }
    }
    check(elements > 1, path.string() + " holds no drawable elements");
}

/// setup -> parse(synthetic seed 7) -> config(ridge+locf, 120 min) -> train
/// -> metrics -> plots; every step must exit 0.
void golden_run(const std::filesystem::path& root) {
    auto step = [&](std::vector<std::string> args, const char* what) {
        check(run_cli_quiet(std::move(args), root) == 0, std::string(what) + " failed");
    };
    step({"setup_directories"}, "setup_directories");
    step({"parse", "--source", "synthetic", "--seed", "7", "--days", "14"}, "parse");
    step({"generate_config", "--data", "synthetic", "--models", "ridge,locf_baseline"},
         "generate_config");
    step({"train_model", "--config", "synthetic"}, "train_model");
    step({"calculate_metrics", "--config", "synthetic"}, "calculate_metrics");
    step({"draw_plots", "--config", "synthetic", "--plot-type", "scatter"}, "draw_plots scatter");
    step({"draw_plots", "--config", "synthetic", "--plot-type", "trajectories"},
         "draw_plots trajectories");
}

const std::vector<std::string> kGoldenOutputs = {
    "data/trained_models/ridge__synthetic.json",
    "data/trained_models/locf_baseline__synthetic.json",
    "data/reports/all__synthetic__metrics.csv",
    "data/reports/all__synthetic__metrics.json",
    "data/reports/all__synthetic__metrics.md",
    "data/figures/ridge__synthetic__scatter.svg",
    "data/figures/locf_baseline__synthetic__scatter.svg",
    "data/figures/ridge__synthetic__trajectories.svg",
    "data/figures/locf_baseline__synthetic__trajectories.svg",
};

}  // namespace

int main() {
    int passed = 0;
    int failed = 0;
    testutil::TempDir golden_dir;  // shared by criteria 6, 7, and 8

    auto criterion = [&](int id, const std::string& label,
                         const std::function<std::string()>& body) {
        const auto started = Clock::now();
        bool ok = true;
        std::string detail;
        try {
            detail = body();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double seconds =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started)
                .count() /
            1000.0;
        std::printf("[%2d] %s %s: %s (%.1f s)\n", id, ok ? "PASS" : "FAIL", label.c_str(),
                    detail.c_str(), seconds);
        std::fflush(stdout);
        (ok ? passed : failed) += 1;
    };

    criterion(1, "elastic net (l1_ratio=0) matches the ridge closed form", [] {
        const auto started = Clock::now();
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const Instance inst = random_instance(derive_seed(1001, t));
            std::mt19937_64 rng(derive_seed(1002, t));
            const double alpha = 0.05 + uniform_unit(rng) * 5.0;
            const LinearFit enet =
                solve_elastic_net(inst.X, inst.y, alpha, 0.0, 1e-12, 200000);
            const LinearFit ridge =
                solve_ridge(inst.X, inst.y, alpha * static_cast<double>(inst.X.rows()));
            worst = std::max(worst, (enet.weights - ridge.weights).cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(enet.intercept - ridge.intercept));
        }
        const double seconds =
            std::chrono::duration<double>(Clock::now() - started).count();
        check(worst < 1e-6, "max coefficient difference " + num(worst) + " >= 1e-6");
        check(seconds < 10.0, "runtime " + num(seconds) + " s >= 10 s");
        return "20 instances, max coefficient difference " + num(worst) + " < 1e-6";
    });

    criterion(2, "lasso satisfies the KKT optimality conditions", [] {
        const auto started = Clock::now();
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const Instance inst = random_instance(derive_seed(2001, t));
            std::mt19937_64 rng(derive_seed(2002, t));
            const double alpha = 0.02 + uniform_unit(rng);
            const LinearFit fit = solve_elastic_net(inst.X, inst.y, alpha, 1.0, 1e-10, 200000);
            worst = std::max(worst, lasso_kkt_violation(inst, fit, alpha));
        }
        const double seconds =
            std::chrono::duration<double>(Clock::now() - started).count();
        check(worst < 1e-4, "max KKT violation " + num(worst) + " >= 1e-4");
        check(seconds < 10.0, "runtime " + num(seconds) + " s >= 10 s");
        return "20 instances, max KKT violation " + num(worst) + " < 1e-4";
    });

    criterion(3, "metric identities hold", [] {
        std::mt19937_64 rng(3001);
        PairedSeries perfect;
        for (int i = 0; i < 200; ++i) {
            perfect.reference.push_back(40.0 + uniform_unit(rng) * 360.0);
        }
        perfect.predicted = perfect.reference;
        const ScalarMetrics zero = scalar_metrics(perfect);
        check(zero.rmse == 0.0 && zero.mae == 0.0 && zero.mard_percent == 0.0 &&
                  zero.me == 0.0 && zero.mre_percent == 0.0,
              "perfect prediction left a nonzero scalar metric");
        check(gs_rmse(perfect) == 0.0, "perfect prediction left a nonzero gs_rmse");

        PairedSeries offset = perfect;
        for (double& p : offset.predicted) p += 10.0;
        const ScalarMetrics ten = scalar_metrics(offset);
        check(ten.me == 10.0 && ten.mae == 10.0 && ten.rmse == 10.0,
              "+10 offset: expected me = mae = rmse = 10 exactly, got me=" + num(ten.me) +
                  " mae=" + num(ten.mae) + " rmse=" + num(ten.rmse));

        for (int t = 0; t < 1000; ++t) {
            PairedSeries pairs;
            for (int i = 0; i < 50; ++i) {
                const double r = 10.0 + uniform_unit(rng) * 590.0;
                pairs.reference.push_back(r);
                pairs.predicted.push_back(r + (uniform_unit(rng) - 0.5) * 160.0);
            }
            check(gs_rmse(pairs) >= scalar_metrics(pairs).rmse,
                  "gs_rmse fell below rmse on series " + std::to_string(t));
        }
        return "perfect=0, +10 offset exact, gs_rmse >= rmse on 1000 series";
    });

    criterion(4, "error grids partition the glucose lattice", [] {
        const auto started = Clock::now();
        PairedSeries lattice;
        for (int r = 10; r <= 600; ++r) {
            for (int p = 10; p <= 600; ++p) {
                lattice.reference.push_back(r);
                lattice.predicted.push_back(p);
            }
            const double d = r;
            check(classify(GridKind::CLARKE, d, d) == Zone::A,
                  "Clarke diagonal point " + std::to_string(r) + " not in zone A");
            check(classify(GridKind::PARKES, d, d) == Zone::A,
                  "Parkes diagonal point " + std::to_string(r) + " not in zone A");
        }
        const std::size_t n = lattice.reference.size();
        for (GridKind kind : {GridKind::CLARKE, GridKind::PARKES}) {
            const ErrorGridResult grid = error_grid(lattice, kind);
            std::size_t total = 0;
            double percent = 0.0;
            for (int z = 0; z < 5; ++z) {
                total += grid.zone_counts[static_cast<std::size_t>(z)];
                percent += grid.zone_percentages[static_cast<std::size_t>(z)];
            }
            check(total == n, std::string(grid_kind_name(kind)) + ": zone counts sum to " +
                                  std::to_string(total) + ", not " + std::to_string(n));
            check(std::abs(percent - 100.0) < 1e-9,
                  std::string(grid_kind_name(kind)) + ": percentages sum to " + num(percent));
        }
        const double seconds =
            std::chrono::duration<double>(Clock::now() - started).count();
        check(seconds < 30.0, "runtime " + num(seconds) + " s >= 30 s");
        return std::to_string(n) + " lattice points, both grids partition, diagonal all A";
    });

    criterion(5, "every learner beats the LOCF baseline on synthetic data", [] {
        const auto started = Clock::now();
        SyntheticParams params;
        params.seed = 7;  // 14 days, noise 5, meals and doses on by default
        PipelineConfig config;
        config.data_file = "synthetic.csv";
        config.prediction_horizon_minutes = 60;
        config.num_lagged_samples = 12;
        config.feature_signals = {kColCgm, kColCarbs, kColBolus};
        config.what_if_signals = {kColCarbs, kColBolus};
        const DatasetFrame frame = impute(synth_generate(params), 30);
        const SupervisedSet supervised = featurize(frame, config);
        auto [train, test] = split(supervised, config.test_fraction);
        const ScalerParams scaler = scaler_fit(train);

        auto spec_of = [](const std::string& name,
                          std::map<std::string, double> hp) {
            ModelSpecConfig spec;
            spec.name = name;
            spec.hyperparameters = std::move(hp);
            return spec;
        };
        auto rmse_at = [&](const TrainedModel& model, Eigen::Index h) {
            const Eigen::MatrixXd predictions = predict(model, test.features);
            return std::sqrt((predictions.col(h) - test.targets.col(h)).squaredNorm() /
                             static_cast<double>(test.rows()));
        };
        const Eigen::Index h60 = 11;  // 60 minutes on the 5-minute grid
        const Eigen::Index h5 = 0;

        const FitOutcome locf =
            fit_model(spec_of("locf_baseline", {}), train, scaler, "acceptance", 5, 7);
        const double base60 = rmse_at(locf.model, h60);
        const double base5 = rmse_at(locf.model, h5);

        const std::vector<ModelSpecConfig> specs = {
            spec_of("ols", {}),
            spec_of("ridge", {{"alpha", 1.0}}),
            spec_of("elastic_net", {{"alpha", 0.001}, {"l1_ratio", 0.5}}),
            spec_of("huber", {{"huber_delta", 25.0}}),
            spec_of("random_forest",
                    {{"n_trees", 20}, {"max_depth", 10}, {"min_samples_leaf", 5}}),
            spec_of("gbt", {{"n_trees", 60}, {"max_depth", 3}, {"learning_rate", 0.1}}),
        };
        double worst_ratio60 = 0.0;
        std::string worst_name;
        for (const auto& spec : specs) {
            const FitOutcome fit = fit_model(spec, train, scaler, "acceptance", 5, 7);
            const double r60 = rmse_at(fit.model, h60);
            const double r5 = rmse_at(fit.model, h5);
            check(r60 <= 0.95 * base60,
                  spec.name + ": 60-minute RMSE " + num(r60) + " not 5% below baseline " +
                      num(base60));
            check(r5 <= 2.0 * base5, spec.name + ": 5-minute RMSE " + num(r5) +
                                         " above 2x baseline " + num(base5));
            if (r60 / base60 > worst_ratio60) {
                worst_ratio60 = r60 / base60;
                worst_name = spec.name;
            }
        }
        const double seconds =
            std::chrono::duration<double>(Clock::now() - started).count();
        check(seconds < 180.0, "runtime " + num(seconds) + " s >= 180 s");
        return "6 learners beat LOCF at 60 min (closest: " + worst_name + " at " +
               num(100.0 * worst_ratio60) + "% of baseline)";
    });

    criterion(6, "CLI golden run completes and reruns byte-identically", [&golden_dir] {
        golden_run(golden_dir.path());
        for (const auto& relative : kGoldenOutputs) {
            check(std::filesystem::exists(golden_dir.path() / relative),
                  "missing output " + relative);
        }
        std::size_t svgs = 0;
        for (const auto& entry :
             std::filesystem::directory_iterator(golden_dir.path() / "data" / "figures")) {
            check_svg_well_formed(entry.path());
            ++svgs;
        }
        check(svgs >= 2, "only " + std::to_string(svgs) + " SVG files rendered");

        testutil::TempDir second;
        golden_run(second.path());
        for (const auto& relative : kGoldenOutputs) {
            check(testutil::read_file((golden_dir.path() / relative).string()) ==
                      testutil::read_file((second.path() / relative).string()),
                  relative + " differs between identical runs");
        }
        return "2 artifacts, 3 report formats, " + std::to_string(svgs) +
               " well-formed SVGs, rerun byte-identical";
    });

    criterion(7, "metric tables cover the 30/60/120-minute horizons", [&golden_dir] {
        const nlohmann::json rows = nlohmann::json::parse(testutil::read_file(
            (golden_dir.path() / "data/reports/all__synthetic__metrics.json").string()));
        std::map<std::string, std::set<int>> horizons;
        for (const auto& row : rows) {
            horizons[row["model"].get<std::string>()].insert(row["horizon_minutes"].get<int>());
        }
        check(horizons.size() == 2, "expected rows for 2 models");
        for (const auto& [model, minutes] : horizons) {
            for (int m : {30, 60, 120}) {
                check(minutes.count(m) == 1,
                      model + " lacks a row for " + std::to_string(m) + " minutes");
            }
        }
        return "rows present at 30, 60, and 120 minutes for both models";
    });

    criterion(8, "set_unit mmol/L rescales glucose cells by exactly the constant",
              [&golden_dir] {
        const auto report_path =
            golden_dir.path() / "data/reports/ridge__synthetic__metrics.json";
        const nlohmann::json mgdl =
            nlohmann::json::parse(testutil::read_file(report_path.string()));
        check(run_cli_quiet({"set_unit", "--unit", "mmol/L"}, golden_dir.path()) == 0,
              "set_unit failed");
        check(run_cli_quiet({"calculate_metrics", "--config", "synthetic"},
                            golden_dir.path()) == 0,
              "calculate_metrics after set_unit failed");
        const nlohmann::json mmol =
            nlohmann::json::parse(testutil::read_file(report_path.string()));
        check(mgdl.size() == mmol.size(), "row count changed with the unit");

        const std::vector<std::string> glucose_cells = {"rmse", "mae", "me", "gs_rmse"};
        const std::vector<std::string> percent_cells = {
            "mard",     "mre",      "clarke_A", "clarke_B", "clarke_C", "clarke_D",
            "clarke_E", "parkes_A", "parkes_B", "parkes_C", "parkes_D", "parkes_E"};
        double worst = 0.0;
        for (std::size_t i = 0; i < mgdl.size(); ++i) {
            for (const auto& key : glucose_cells) {
                const double expected = mgdl[i][key].get<double>() / kMgdlPerMmoll;
                const double actual = mmol[i][key].get<double>();
                const double relative =
                    std::abs(actual - expected) / std::max(1.0, std::abs(expected));
                worst = std::max(worst, relative);
                check(relative <= 1e-9, key + " row " + std::to_string(i) +
                                            ": relative error " + num(relative) + " > 1e-9");
            }
            for (const auto& key : percent_cells) {
                check(mmol[i][key].get<double>() == mgdl[i][key].get<double>(),
                      key + " row " + std::to_string(i) + " changed with the unit");
            }
        }
        return "glucose cells match mg/dL / 18.0182 (worst relative error " + num(worst) +
               "), percent cells unchanged";
    });

    criterion(9, "mutating test-period data leaves the trained model bit-identical", [] {
        SyntheticParams params;
        params.seed = 11;
        params.days = 3;
        PipelineConfig config;
        config.data_file = "synthetic.csv";
        config.prediction_horizon_minutes = 60;
        const int horizon_steps = config.horizon_steps();
        const DatasetFrame frame = impute(synth_generate(params), 30);

        const SupervisedSet supervised = featurize(frame, config);
        auto [train, test] = split(supervised, config.test_fraction);

        // the test period starts after the last grid point any training
        // sample touches: last train origin + horizon
        const Timestamp last_train_origin =
            train.sample_timestamps[static_cast<std::size_t>(train.rows() - 1)];
        const auto last_train_bin = static_cast<std::size_t>(
            (last_train_origin - frame.start()) / (60 * frame.interval_minutes()));
        const std::size_t first_test_bin =
            last_train_bin + static_cast<std::size_t>(horizon_steps) + 1;

        DatasetFrame mutated = frame;
        SignalColumn& cgm = mutated.column(kColCgm);
        for (std::size_t i = first_test_bin; i < mutated.size(); ++i) {
            if (cgm.present[i]) cgm.values[i] += 37.0;
        }
        const SupervisedSet supervised2 = featurize(mutated, config);
        auto [train2, test2] = split(supervised2, config.test_fraction);

        check(test2.features != test.features || test2.targets != test.targets,
              "mutation never reached the test split; the check would be vacuous");
        check(train2.rows() == train.rows() && train2.cols() == train.cols(),
              "training split changed shape");
        auto bit_equal = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
            return a.rows() == b.rows() && a.cols() == b.cols() &&
                   std::memcmp(a.data(), b.data(),
                               sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
        };
        check(bit_equal(train.features, train2.features), "training features changed");
        check(bit_equal(train.targets, train2.targets), "training targets changed");

        const ScalerParams scaler1 = scaler_fit(train);
        const ScalerParams scaler2 = scaler_fit(train2);
        check(bit_equal(scaler1.mean, scaler2.mean) && bit_equal(scaler1.scale, scaler2.scale),
              "scaler parameters changed");

        ModelSpecConfig ridge;
        ridge.name = "ridge";
        const FitOutcome fit1 = fit_model(ridge, train, scaler1, "leakcheck", 5, 7);
        const FitOutcome fit2 = fit_model(ridge, train2, scaler2, "leakcheck", 5, 7);
        check(model_to_json(fit1.model).dump() == model_to_json(fit2.model).dump(),
              "fitted coefficients changed");
        return "train features, scaler, and ridge coefficients bit-identical under mutation";
    });

    criterion(10, "the raw CSV round-trips to the exact same frame", [] {
        SyntheticParams params;
        params.seed = 5;
        params.days = 2;
        const DatasetFrame expected = synth_generate(params);

        testutil::TempDir dir;
        check(run_cli_quiet({"setup_directories"}, dir.path()) == 0, "setup failed");
        check(run_cli_quiet({"parse", "--source", "synthetic", "--seed", "5", "--days", "2"},
                            dir.path()) == 0,
              "parse failed");
        const std::filesystem::path raw = dir.path() / "data" / "raw" / "synthetic.csv";
        const MergedData reread = merge_records(parse_csv(raw.string()), 5);
        check(reread.frame == expected, "re-merged frame differs from the generated one");
        for (std::uint8_t present : reread.basal_present) {
            check(present == 0, "basal appeared out of nowhere");
        }
        return "cmd_parse output re-read and re-merged reproduces the frame exactly";
    });

    std::printf("ACCEPTANCE: %d/%d criteria passed\n", passed, passed + failed);
    return failed == 0 ? 0 : 1;
}
