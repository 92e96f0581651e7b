#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "glucast/metrics/error_grid.hpp"
#include "glucast/metrics/gs_rmse.hpp"
#include "glucast/metrics/scalar.hpp"
#include "glucast/util/random.hpp"

using namespace glucast;

namespace {

PairedSeries random_pairs(std::mt19937_64& rng, std::size_t n) {
    PairedSeries pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.reference.push_back(10.0 + 590.0 * uniform_unit(rng));
        pairs.predicted.push_back(pairs.reference.back() + 60.0 * standard_normal(rng));
    }
    return pairs;
}

}  // namespace

// --------------------------------------------------------- scalar metrics ----

TEST_CASE("scalar metrics match the two-pair arithmetic oracle") {
    PairedSeries pairs{{100, 200}, {110, 180}};
    ScalarMetrics m = scalar_metrics(pairs);
    CHECK(m.rmse == Catch::Approx(std::sqrt(250.0)).epsilon(1e-12));
    CHECK(m.mae == Catch::Approx(15.0).epsilon(1e-12));
    CHECK(m.mard_percent == Catch::Approx(10.0).epsilon(1e-12));
    CHECK(m.me == Catch::Approx(-5.0).epsilon(1e-12));
    CHECK(m.mre_percent == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("perfect prediction zeroes every metric") {
    PairedSeries pairs{{80, 120, 300, 55}, {80, 120, 300, 55}};
    ScalarMetrics m = scalar_metrics(pairs);
    CHECK(m.rmse == 0.0);
    CHECK(m.mae == 0.0);
    CHECK(m.mard_percent == 0.0);
    CHECK(m.me == 0.0);
    CHECK(m.mre_percent == 0.0);
    CHECK(gs_rmse(pairs) == 0.0);
}

TEST_CASE("a constant offset of ten shows up as exactly ten") {
    PairedSeries pairs{{100, 150, 200, 250}, {110, 160, 210, 260}};
    ScalarMetrics m = scalar_metrics(pairs);
    CHECK(m.rmse == 10.0);
    CHECK(m.mae == 10.0);
    CHECK(m.me == 10.0);
}

TEST_CASE("scalar metrics are permutation invariant") {
    std::mt19937_64 rng(101);
    PairedSeries pairs = random_pairs(rng, 64);
    ScalarMetrics base = scalar_metrics(pairs);

    // reverse both series in lockstep: the pair multiset is unchanged
    std::reverse(pairs.reference.begin(), pairs.reference.end());
    std::reverse(pairs.predicted.begin(), pairs.predicted.end());
    ScalarMetrics flipped = scalar_metrics(pairs);
    CHECK(flipped.rmse == Catch::Approx(base.rmse).epsilon(1e-12));
    CHECK(flipped.mae == Catch::Approx(base.mae).epsilon(1e-12));
    CHECK(flipped.mard_percent == Catch::Approx(base.mard_percent).epsilon(1e-12));
    CHECK(flipped.me == Catch::Approx(base.me).margin(1e-12));
    CHECK(flipped.mre_percent == Catch::Approx(base.mre_percent).margin(1e-12));
}

TEST_CASE("rmse dominates mae which dominates the absolute mean error") {
    std::mt19937_64 rng(102);
    for (int trial = 0; trial < 200; ++trial) {
        PairedSeries pairs = random_pairs(rng, 1 + rng() % 40);
        ScalarMetrics m = scalar_metrics(pairs);
        CHECK(m.rmse >= m.mae - 1e-12);
        CHECK(m.mae >= std::abs(m.me) - 1e-12);
    }
}

TEST_CASE("paired series preconditions are enforced") {
    CHECK_THROWS_AS(scalar_metrics(PairedSeries{}), EmptyInputError);
    CHECK_THROWS_AS(scalar_metrics(PairedSeries{{100, 100}, {100}}), ShapeError);
    CHECK_THROWS_AS(scalar_metrics(PairedSeries{{5}, {100}}), InvalidValueError);
    CHECK_THROWS_AS(scalar_metrics(PairedSeries{{700}, {100}}), InvalidValueError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(scalar_metrics(PairedSeries{{100}, {nan}}), InvalidValueError);
    // predictions outside the sensor range are allowed, references are not
    CHECK_NOTHROW(scalar_metrics(PairedSeries{{100}, {900}}));
}

// ----------------------------------------------------------------- gsRMSE ----

TEST_CASE("gs_rmse equals rmse when both penalty amplitudes are zero") {
    std::mt19937_64 rng(111);
    PairedSeries pairs = random_pairs(rng, 50);
    GsPenaltyParams flat{0.0, 0.0};
    CHECK(gs_rmse(pairs, flat) == scalar_metrics(pairs).rmse);
}

TEST_CASE("gs_rmse never drops below rmse") {
    std::mt19937_64 rng(112);
    for (int trial = 0; trial < 1000; ++trial) {
        PairedSeries pairs = random_pairs(rng, 1 + rng() % 30);
        CHECK(gs_rmse(pairs) >= scalar_metrics(pairs).rmse - 1e-12);
    }
}

TEST_CASE("the penalty singles out the two dangerous quadrants") {
    // overpredicting a low hides the hypo: penalized
    CHECK(gs_penalty(50, 120) > 1.0);
    // underpredicting a low is cautious: benign
    CHECK(gs_penalty(50, 40) == 1.0);
    // underpredicting a high hides the hyper: penalized
    CHECK(gs_penalty(250, 150) > 1.0);
    // overpredicting a high: benign
    CHECK(gs_penalty(250, 300) == 1.0);
    // mid-range errors in either direction: benign
    CHECK(gs_penalty(120, 160) == 1.0);
    CHECK(gs_penalty(120, 80) == 1.0);

    // the weight grows with the depth of the excursion and the error size
    CHECK(gs_penalty(30, 130) > gs_penalty(55, 130));
    CHECK(gs_penalty(50, 120) > gs_penalty(50, 90));
    CHECK(gs_penalty(400, 250) > gs_penalty(200, 150));
}

TEST_CASE("penalty weights stay within their documented ceiling") {
    std::mt19937_64 rng(113);
    GsPenaltyParams params;
    for (int trial = 0; trial < 2000; ++trial) {
        const double r = 10.0 + 590.0 * uniform_unit(rng);
        const double p = 1000.0 * uniform_unit(rng);
        const double pen = gs_penalty(r, p, params);
        CHECK(pen >= 1.0);
        CHECK(pen <= 1.0 + std::max(params.hypo_amplitude, params.hyper_amplitude));
    }
}

TEST_CASE("a single risky pair raises gs_rmse above rmse") {
    PairedSeries pairs{{50}, {140}};
    CHECK(gs_rmse(pairs) > scalar_metrics(pairs).rmse);
}

// ------------------------------------------------------------ Clarke grid ----

TEST_CASE("clarke classifies the anchor examples") {
    CHECK(classify_clarke(100, 100) == Zone::A);
    CHECK(classify_clarke(100, 115) == Zone::A);  // within twenty percent
    CHECK(classify_clarke(200, 60) == Zone::E);   // missed hyper, reads hypo
    CHECK(classify_clarke(60, 200) == Zone::E);   // missed hypo, reads hyper
    CHECK(classify_clarke(80, 200) == Zone::C);   // overcorrection high
    CHECK(classify_clarke(150, 20) == Zone::C);   // overcorrection low
    CHECK(classify_clarke(250, 100) == Zone::D);  // missed high, reads normal
    CHECK(classify_clarke(60, 100) == Zone::D);   // missed low, reads normal
    CHECK(classify_clarke(150, 190) == Zone::B);
    CHECK(classify_clarke(40, 60) == Zone::A);    // both hypo, both low
}

// ------------------------------------------------------------ Parkes grid ----

TEST_CASE("parkes classifies representative points") {
    CHECK(classify_parkes(100, 100) == Zone::A);
    CHECK(classify_parkes(100, 115) == Zone::A);
    CHECK(classify_parkes(50, 200) == Zone::D);   // far overprediction of a low
    CHECK(classify_parkes(20, 300) == Zone::E);   // reads high during severe hypo
    CHECK(classify_parkes(600, 100) == Zone::D);  // far underprediction of a high
    CHECK(classify_parkes(100, 160) == Zone::B);
    CHECK(classify_parkes(160, 100) == Zone::B);
    CHECK(classify_parkes(300, 140) == Zone::C);
}

TEST_CASE("boundary points fall into the better zone") {
    // the vertical rise of the lower B boundary sits at reference 50: a pair
    // exactly on it still counts as A
    CHECK(classify_parkes(50, 20) == Zone::A);
    CHECK(classify_parkes(50.5, 20) == Zone::B);
    // upper boundary vertex of zone B at (140, 170)
    CHECK(classify_parkes(140, 170) == Zone::A);
    CHECK(classify_parkes(140, 170.5) == Zone::B);
}

// ------------------------------------------------- partition lattice sweep ----

TEST_CASE("both grids partition the whole plane and keep the diagonal in A") {
    for (int r = 10; r <= 600; ++r) {
        CHECK(classify_clarke(r, r) == Zone::A);
        CHECK(classify_parkes(r, r) == Zone::A);
    }

    // walking away from the diagonal never improves the Parkes zone; that
    // fails loudly if any transcribed boundary crosses another
    for (int r = 10; r <= 600; ++r) {
        int worst_up = 0;
        for (int p = r; p <= 600; ++p) {
            const int zone = static_cast<int>(classify_parkes(r, p));
            CHECK(zone >= worst_up);
            worst_up = std::max(worst_up, zone);
        }
        int worst_down = 0;
        for (int p = r; p >= 0; --p) {
            const int zone = static_cast<int>(classify_parkes(r, p));
            CHECK(zone >= worst_down);
            worst_down = std::max(worst_down, zone);
        }
    }
}

TEST_CASE("error_grid aggregates counts and percentages") {
    PairedSeries pairs{{100, 200, 60, 250}, {100, 60, 200, 100}};
    ErrorGridResult clarke = error_grid(pairs, GridKind::CLARKE);
    CHECK(clarke.kind == GridKind::CLARKE);
    CHECK(clarke.count(Zone::A) == 1);
    CHECK(clarke.count(Zone::E) == 2);
    CHECK(clarke.count(Zone::D) == 1);
    CHECK(clarke.percentage(Zone::A) == Catch::Approx(25.0));
    CHECK(clarke.percentage(Zone::E) == Catch::Approx(50.0));

    std::size_t total = 0;
    double percent = 0.0;
    for (Zone z : {Zone::A, Zone::B, Zone::C, Zone::D, Zone::E}) {
        total += clarke.count(z);
        percent += clarke.percentage(z);
    }
    CHECK(total == 4);
    CHECK(percent == Catch::Approx(100.0).margin(1e-9));
}

TEST_CASE("zone counts are additive across evaluation chunks") {
    std::mt19937_64 rng(121);
    PairedSeries all = random_pairs(rng, 97);
    PairedSeries head{{all.reference.begin(), all.reference.begin() + 40},
                      {all.predicted.begin(), all.predicted.begin() + 40}};
    PairedSeries tail{{all.reference.begin() + 40, all.reference.end()},
                      {all.predicted.begin() + 40, all.predicted.end()}};
    for (GridKind kind : {GridKind::CLARKE, GridKind::PARKES}) {
        ErrorGridResult whole = error_grid(all, kind);
        ErrorGridResult first = error_grid(head, kind);
        ErrorGridResult second = error_grid(tail, kind);
        for (std::size_t z = 0; z < 5; ++z) {
            CHECK(whole.zone_counts[z] == first.zone_counts[z] + second.zone_counts[z]);
        }
    }
}

TEST_CASE("percentages sum to one hundred on random batches") {
    std::mt19937_64 rng(122);
    for (int trial = 0; trial < 50; ++trial) {
        PairedSeries pairs = random_pairs(rng, 1 + rng() % 200);
        for (GridKind kind : {GridKind::CLARKE, GridKind::PARKES}) {
            ErrorGridResult result = error_grid(pairs, kind);
            double percent = 0.0;
            std::size_t total = 0;
            for (std::size_t z = 0; z < 5; ++z) {
                percent += result.zone_percentages[z];
                total += result.zone_counts[z];
            }
            CHECK(total == pairs.reference.size());
            CHECK(percent == Catch::Approx(100.0).margin(1e-9));
        }
    }
}
