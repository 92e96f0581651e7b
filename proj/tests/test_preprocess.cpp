#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <random>

#include "glucast/core/config.hpp"
#include "glucast/preprocess/featurize.hpp"
#include "glucast/preprocess/impute.hpp"
#include "glucast/preprocess/scaler.hpp"
#include "glucast/preprocess/split.hpp"

using namespace glucast;

namespace {

DatasetFrame cgm_frame(const std::vector<double>& values,
                       const std::vector<std::uint8_t>& present) {
    DatasetFrame f(1704067200, 5);
    SignalColumn col;
    col.values = values;
    col.present = present;
    f.add_column(kColCgm, std::move(col));
    return f;
}

DatasetFrame cgm_frame(const std::vector<double>& values) {
    return cgm_frame(values, std::vector<std::uint8_t>(values.size(), 1));
}

PipelineConfig basic_config(int lags, int horizon_minutes) {
    PipelineConfig c;
    c.data_file = "test.csv";
    c.num_lagged_samples = lags;
    c.prediction_horizon_minutes = horizon_minutes;
    return c;
}

}  // namespace

// --------------------------------------------------------------- impute ----

TEST_CASE("impute fills a single bin gap with the midpoint") {
    DatasetFrame f = cgm_frame({100, 0, 110}, {1, 0, 1});
    DatasetFrame filled = impute(f, 30);
    CHECK(filled.is_present(kColCgm, 1));
    CHECK(filled.value(kColCgm, 1) == 105.0);
}

TEST_CASE("impute interpolates linearly across multi-bin gaps") {
    DatasetFrame f = cgm_frame({100, 0, 0, 130}, {1, 0, 0, 1});
    DatasetFrame filled = impute(f, 30);
    CHECK(filled.value(kColCgm, 1) == Catch::Approx(110.0));
    CHECK(filled.value(kColCgm, 2) == Catch::Approx(120.0));
}

TEST_CASE("impute leaves gaps longer than the bound untouched") {
    std::vector<double> values(9, 0.0);
    std::vector<std::uint8_t> present(9, 0);
    values[0] = 100;
    present[0] = 1;
    values[8] = 140;
    present[8] = 1;  // 7 missing bins between
    DatasetFrame filled = impute(cgm_frame(values, present), 30);  // bound is 6 bins
    for (std::size_t i = 1; i < 8; ++i) {
        CHECK_FALSE(filled.is_present(kColCgm, i));
    }
}

TEST_CASE("impute leaves leading and trailing gaps missing") {
    DatasetFrame f = cgm_frame({0, 100, 110, 0}, {0, 1, 1, 0});
    DatasetFrame filled = impute(f, 60);
    CHECK_FALSE(filled.is_present(kColCgm, 0));
    CHECK_FALSE(filled.is_present(kColCgm, 3));
}

TEST_CASE("impute zero-fills dose-like columns completely") {
    DatasetFrame f = cgm_frame({100, 110, 120});
    SignalColumn bolus;
    bolus.values = {0, 2.5, 0};
    bolus.present = {0, 1, 0};
    f.add_column(kColBolus, std::move(bolus));
    SignalColumn basal;
    basal.values = {0.1, 0, 0};
    basal.present = {1, 0, 0};
    f.add_column(kColBasal, std::move(basal));

    DatasetFrame filled = impute(f, 30);
    CHECK(filled.value(kColBolus, 0) == 0.0);
    CHECK(filled.is_present(kColBolus, 0));
    CHECK(filled.value(kColBolus, 1) == 2.5);
    CHECK(filled.value(kColBasal, 1) == 0.0);
    CHECK(filled.is_present(kColBasal, 2));
}

TEST_CASE("impute never modifies present values") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 30 + rng() % 50;
        std::vector<double> values(n);
        std::vector<std::uint8_t> present(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = 60.0 + static_cast<double>(rng() % 2000) / 10.0;
            present[i] = rng() % 4 != 0;
        }
        DatasetFrame f = cgm_frame(values, present);
        DatasetFrame filled = impute(f, 30);
        for (std::size_t i = 0; i < n; ++i) {
            if (present[i]) {
                REQUIRE(filled.is_present(kColCgm, i));
                REQUIRE(std::memcmp(&filled.column(kColCgm).values[i], &values[i], 8) == 0);
            }
        }
    }
}

// ------------------------------------------------------------ featurize ----

TEST_CASE("featurize counts samples by the lag and horizon window") {
    std::vector<double> values(10);
    for (std::size_t i = 0; i < 10; ++i) values[i] = 100.0 + static_cast<double>(i);
    // N=10, L=2, H=6: valid origins are t = 1, 2, 3
    PipelineConfig c = basic_config(2, 30);
    SupervisedSet set = featurize(cgm_frame(values), c);
    REQUIRE(set.rows() == 3);
    CHECK(set.cols() == 2);
    CHECK(set.horizon() == 6);
    CHECK(set.feature_names == std::vector<std::string>{"CGM[t-1]", "CGM[t-0]"});

    // first origin t=1: lags are CGM[0], CGM[1]; targets CGM[2..7]
    CHECK(set.features(0, 0) == 100.0);
    CHECK(set.features(0, 1) == 101.0);
    CHECK(set.targets(0, 0) == 102.0);
    CHECK(set.targets(0, 5) == 107.0);
    CHECK(set.sample_timestamps[0] == 1704067200 + 300);
}

TEST_CASE("a what-if signal adds exactly H feature columns") {
    std::vector<double> values(20, 120.0);
    DatasetFrame f = cgm_frame(values);
    SignalColumn carbs;
    carbs.values.assign(20, 0.0);
    carbs.present.assign(20, 1);
    carbs.values[10] = 40.0;
    f.add_column(kColCarbs, std::move(carbs));

    PipelineConfig without = basic_config(3, 30);
    without.feature_signals = {kColCgm, kColCarbs};
    SupervisedSet a = featurize(f, without);

    PipelineConfig with = without;
    with.what_if_signals = {kColCarbs};
    SupervisedSet b = featurize(f, with);

    CHECK(b.cols() == a.cols() + 6);
    CHECK(b.feature_names[static_cast<std::size_t>(a.cols())] == "carbs[t+1]");
    CHECK(b.feature_names.back() == "carbs[t+6]");
}

TEST_CASE("constant frames produce constant targets") {
    SupervisedSet set = featurize(cgm_frame(std::vector<double>(30, 120.0)),
                                  basic_config(4, 60));
    CHECK((set.targets.array() == 120.0).all());
}

TEST_CASE("targets line up with the frame by timestamp") {
    std::mt19937_64 rng(83);
    std::vector<double> values(120);
    for (auto& v : values) v = 60.0 + static_cast<double>(rng() % 3000) / 10.0;
    DatasetFrame f = cgm_frame(values);
    PipelineConfig c = basic_config(6, 45);
    SupervisedSet set = featurize(f, c);

    for (int probe = 0; probe < 50; ++probe) {
        Eigen::Index i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(set.rows()));
        int k = 1 + static_cast<int>(rng() % 9);
        Timestamp origin = set.sample_timestamps[static_cast<std::size_t>(i)];
        std::size_t frame_idx = static_cast<std::size_t>((origin - f.start()) / 300);
        CHECK(set.targets(i, k - 1) == f.value(kColCgm, frame_idx + static_cast<std::size_t>(k)));
    }
}

TEST_CASE("samples touching missing bins are dropped whole") {
    std::vector<double> values(30, 120.0);
    std::vector<std::uint8_t> present(30, 1);
    present[10] = 0;  // hole
    DatasetFrame f = cgm_frame(values, present);
    PipelineConfig c = basic_config(2, 20);  // L=2, H=4

    SupervisedSet set = featurize(f, c);
    // origins whose window [t-1, t+4] covers index 10 are t = 6..11
    for (Timestamp ts : set.sample_timestamps) {
        std::size_t t = static_cast<std::size_t>((ts - f.start()) / 300);
        CHECK((t < 6 || t > 11));
    }
    // everything else is still there: 30 - (L-1) - H = 25 minus the 6 dropped
    CHECK(set.rows() == 19);
}

TEST_CASE("featurize rejects impossible geometry") {
    CHECK_THROWS_AS(featurize(cgm_frame(std::vector<double>(5, 120.0)), basic_config(4, 60)),
                    EmptyInputError);

    PipelineConfig wants_carbs = basic_config(2, 30);
    wants_carbs.feature_signals = {kColCgm, kColCarbs};
    CHECK_THROWS_AS(featurize(cgm_frame(std::vector<double>(30, 120.0)), wants_carbs),
                    SchemaError);

    PipelineConfig other_interval = basic_config(2, 30);
    other_interval.interval_minutes = 10;
    other_interval.prediction_horizon_minutes = 30;
    CHECK_THROWS_AS(featurize(cgm_frame(std::vector<double>(30, 120.0)), other_interval),
                    AlignmentError);
}

// ---------------------------------------------------------------- split ----

namespace {

SupervisedSet numbered_set(int n) {
    SupervisedSet set;
    set.features.resize(n, 1);
    set.targets.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        set.features(i, 0) = i;
        set.targets(i, 0) = i * 10;
        set.targets(i, 1) = i * 10 + 1;
        set.sample_timestamps.push_back(1704067200 + static_cast<Timestamp>(i) * 300);
    }
    set.feature_names = {"CGM[t-0]"};
    return set;
}

}  // namespace

TEST_CASE("split follows the ceiling rule") {
    auto [train20, test20] = split(numbered_set(10), 0.2);
    CHECK(train20.rows() == 8);
    CHECK(test20.rows() == 2);

    auto [train25, test25] = split(numbered_set(10), 0.25);
    CHECK(train25.rows() == 8);  // ceil(7.5)
    CHECK(test25.rows() == 2);

    CHECK(test25.features(0, 0) == 8.0);
    CHECK(test25.features(1, 0) == 9.0);
}

TEST_CASE("split keeps train strictly before test") {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 200);
        double f = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
        auto [train, test] = split(numbered_set(n), f);
        CHECK(train.rows() + test.rows() == n);
        CHECK(train.rows() >= 1);
        if (test.rows() > 0) {
            CHECK(train.sample_timestamps.back() < test.sample_timestamps.front());
        }
    }
}

TEST_CASE("split refuses degenerate inputs") {
    CHECK_THROWS_AS(split(numbered_set(1), 0.25), InsufficientDataError);
    CHECK_THROWS_AS(split(numbered_set(10), 0.0), InvalidValueError);
    CHECK_THROWS_AS(split(numbered_set(10), 1.0), InvalidValueError);
}

// --------------------------------------------------------------- scaler ----

TEST_CASE("scaler standardizes a two-point column") {
    SupervisedSet set;
    set.features.resize(2, 1);
    set.features << 1.0, 3.0;
    set.targets.resize(2, 1);
    set.targets << 10.0, 20.0;
    set.feature_names = {"CGM[t-0]"};
    set.sample_timestamps = {0, 300};

    ScalerParams params = scaler_fit(set);
    CHECK(params.mean(0) == 2.0);
    CHECK(params.scale(0) == 1.0);  // population sd of {1,3}

    SupervisedSet scaled = scaler_apply(params, set);
    CHECK(scaled.features(0, 0) == -1.0);
    CHECK(scaled.features(1, 0) == 1.0);
    CHECK(scaled.targets == set.targets);  // targets untouched
}

TEST_CASE("constant columns transform to exactly zero") {
    SupervisedSet set;
    set.features.resize(3, 2);
    set.features << 5.0, 0.1, 5.0, 0.1, 5.0, 0.1;
    set.targets.resize(3, 1);
    set.targets.setZero();
    set.feature_names = {"a", "b"};
    set.sample_timestamps = {0, 300, 600};

    ScalerParams params = scaler_fit(set);
    CHECK(params.scale(0) == 1.0);
    CHECK(params.scale(1) == 1.0);
    SupervisedSet scaled = scaler_apply(params, set);
    // 0.1 has no exact binary form; the constant-column rule still gives 0
    CHECK((scaled.features.array() == 0.0).all());
}

TEST_CASE("scaled training features have mean 0 and sd 1") {
    std::mt19937_64 rng(97);
    SupervisedSet set;
    int n = 400, p = 7;
    set.features.resize(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
            set.features(i, j) = static_cast<double>(rng() % 100000) / 100.0 - 250.0;
        }
    }
    set.targets.resize(n, 1);
    set.targets.setZero();
    for (int j = 0; j < p; ++j) set.feature_names.push_back("f" + std::to_string(j));
    set.sample_timestamps.assign(static_cast<std::size_t>(n), 0);

    SupervisedSet scaled = scaler_apply(scaler_fit(set), set);
    for (int j = 0; j < p; ++j) {
        double mean = scaled.features.col(j).mean();
        double sd = std::sqrt((scaled.features.col(j).array() - mean).square().sum() / n);
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(sd - 1.0) < 1e-10);
    }
}

TEST_CASE("scaler rejects width mismatches") {
    SupervisedSet set = numbered_set(4);
    ScalerParams params = scaler_fit(set);
    Eigen::MatrixXd wide(2, 3);
    wide.setZero();
    CHECK_THROWS_AS(scaler_transform(params, wide), ShapeError);
}

TEST_CASE("test-period values cannot reach the scaler or train features") {
    // build a frame, split it, then corrupt the test period and verify the
    // training-side artifacts are bit-identical
    std::mt19937_64 rng(101);
    std::vector<double> values(200);
    for (auto& v : values) v = 80.0 + static_cast<double>(rng() % 2000) / 10.0;
    PipelineConfig c = basic_config(6, 30);
    c.test_fraction = 0.25;

    auto run = [&](const std::vector<double>& vals) {
        SupervisedSet set = featurize(cgm_frame(vals), c);
        auto [train, test] = split(set, c.test_fraction);
        ScalerParams params = scaler_fit(train);
        return std::make_tuple(scaler_apply(params, train).features, params,
                               train.sample_timestamps, test.sample_timestamps);
    };

    auto [train_a, params_a, train_ts, test_ts] = run(values);

    // every frame bin strictly after last train origin + H is test-period
    Timestamp last_train_origin = train_ts.back();
    std::size_t first_untouched = static_cast<std::size_t>(
        (last_train_origin - 1704067200) / 300 + 6 + 1);
    std::vector<double> corrupted = values;
    for (std::size_t i = first_untouched; i < corrupted.size(); ++i) {
        corrupted[i] = 55.5;  // arbitrary rewrite of the future
    }
    auto [train_b, params_b, train_ts_b, test_ts_b] = run(corrupted);

    REQUIRE(train_a.rows() == train_b.rows());
    for (Eigen::Index i = 0; i < train_a.rows(); ++i) {
        for (Eigen::Index j = 0; j < train_a.cols(); ++j) {
            REQUIRE(std::memcmp(&train_a(i, j), &train_b(i, j), 8) == 0);
        }
    }
    CHECK(params_a == params_b);
    CHECK(train_ts == train_ts_b);
}
