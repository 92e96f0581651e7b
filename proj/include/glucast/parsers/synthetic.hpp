// Synthetic CGM data for tests and demos. A discrete dynamical model on the
// 5-minute grid:
//
//   G[t+1] = clamp( G[t] + reversion*(baseline - G[t]) + drift(t)
//                   + carb_effect(t) - insulin_effect(t) + noise, 40, 400 )
//
// Carb absorption is a triangular kernel over 60 minutes; insulin action is
// a triangular kernel over 180 minutes peaking at 75. Both are normalized,
// so total excursion scales directly with grams and units. The reversion
// term pulls the series back toward baseline so a long run stays inside the
// physiologic band instead of random-walking into the clamps; at baseline
// with zero noise and no meals the model holds the baseline exactly.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/frame.hpp"
#include "glucast/core/time.hpp"
#include "glucast/util/random.hpp"

namespace glucast {

struct MealSpec {
    int minute_of_day = 0;  // multiple of the grid interval
    double grams = 0.0;
};

struct SyntheticParams {
    long long seed = 0;
    int days = 14;
    double baseline_mgdl = 120.0;
    double noise_std = 5.0;
    double drift_amplitude = 0.0;   // mg/dL per step, sinusoidal over the day
    double reversion_rate = 0.05;   // fraction of the gap to baseline per step
    double carb_rise_mgdl_per_g = 3.5;
    double insulin_drop_mgdl_per_u = 35.0;
    double carb_ratio_g_per_u = 10.0;
    bool meals = true;
    bool dose_insulin = true;
    std::vector<MealSpec> meal_schedule = {{480, 40.0}, {780, 60.0}, {1140, 50.0}};
};

inline void validate_synthetic_params(const SyntheticParams& p) {
    if (p.days < 1) throw InvalidValueError("synthetic: days must be at least 1");
    if (p.noise_std < 0) throw InvalidValueError("synthetic: noise_std must be non-negative");
    if (p.carb_rise_mgdl_per_g < 0) {
        throw InvalidValueError("synthetic: carb sensitivity must be non-negative");
    }
    if (p.insulin_drop_mgdl_per_u < 0) {
        throw InvalidValueError("synthetic: insulin sensitivity must be non-negative");
    }
    if (p.carb_ratio_g_per_u <= 0) {
        throw InvalidValueError("synthetic: carb ratio must be positive");
    }
    if (p.reversion_rate < 0 || p.reversion_rate > 1) {
        throw InvalidValueError("synthetic: reversion_rate must lie in [0, 1]");
    }
    if (p.baseline_mgdl < 40 || p.baseline_mgdl > 400) {
        throw InvalidValueError("synthetic: baseline must lie in [40, 400] mg/dL");
    }
    for (const auto& m : p.meal_schedule) {
        if (m.minute_of_day < 0 || m.minute_of_day >= 1440 || m.grams < 0) {
            throw InvalidValueError("synthetic: malformed meal schedule entry");
        }
    }
}

namespace detail {

/// Triangle kernel over offsets u = 1..length, apex at `peak`, sum = 1.
inline std::vector<double> triangle_kernel(int peak, int length) {
    std::vector<double> w(static_cast<std::size_t>(length));
    double total = 0.0;
    for (int u = 1; u <= length; ++u) {
        double v = u <= peak ? static_cast<double>(u) / peak
                             : static_cast<double>(length - u) / (length - peak);
        w[static_cast<std::size_t>(u - 1)] = v;
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace detail

inline constexpr Timestamp kSyntheticStart = 1704067200;  // 2024-01-01T00:00:00Z

inline DatasetFrame synth_generate(const SyntheticParams& p) {
    validate_synthetic_params(p);

    constexpr int interval = 5;
    const int bins_per_day = 1440 / interval;
    const std::size_t n = static_cast<std::size_t>(p.days) * bins_per_day;

    // carb absorption: 60 min support; insulin action: 180 min, peak at 75
    const std::vector<double> carb_kernel = detail::triangle_kernel(6, 12);
    const std::vector<double> insulin_kernel = detail::triangle_kernel(15, 36);

    std::vector<double> carbs(n, 0.0), bolus(n, 0.0);
    std::vector<std::uint8_t> meal_mask(n, 0);
    if (p.meals) {
        for (int day = 0; day < p.days; ++day) {
            for (const auto& meal : p.meal_schedule) {
                std::size_t bin = static_cast<std::size_t>(day) * bins_per_day +
                                  static_cast<std::size_t>(meal.minute_of_day / interval);
                carbs[bin] += meal.grams;
                if (p.dose_insulin) bolus[bin] += meal.grams / p.carb_ratio_g_per_u;
                meal_mask[bin] = 1;
            }
        }
    }

    std::mt19937_64 rng(static_cast<std::uint64_t>(p.seed));
    std::vector<double> glucose(n);
    glucose[0] = p.baseline_mgdl;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        double carb_effect = 0.0;
        for (std::size_t j = 0; j < carb_kernel.size(); ++j) {
            if (t < j) break;
            std::size_t src = t - j;
            if (carbs[src] != 0.0) carb_effect += carbs[src] * carb_kernel[j];
        }
        double insulin_effect = 0.0;
        for (std::size_t j = 0; j < insulin_kernel.size(); ++j) {
            if (t < j) break;
            std::size_t src = t - j;
            if (bolus[src] != 0.0) insulin_effect += bolus[src] * insulin_kernel[j];
        }
        double minute_of_day = static_cast<double>((t % bins_per_day) * interval);
        double drift =
            p.drift_amplitude * std::sin(6.283185307179586476925287 * minute_of_day / 1440.0);
        double noise = p.noise_std > 0 ? p.noise_std * standard_normal(rng) : 0.0;
        double increment = p.reversion_rate * (p.baseline_mgdl - glucose[t]) + drift +
                           p.carb_rise_mgdl_per_g * carb_effect -
                           p.insulin_drop_mgdl_per_u * insulin_effect + noise;
        glucose[t + 1] = std::clamp(glucose[t] + increment, 40.0, 400.0);
    }

    DatasetFrame frame(kSyntheticStart, interval);
    SignalColumn cgm;
    cgm.values = std::move(glucose);
    cgm.present.assign(n, 1);
    frame.add_column(kColCgm, std::move(cgm));
    // same column order as merge_records, so a written raw CSV re-merges
    // into a frame that compares equal to this one
    if (p.meals) {
        if (p.dose_insulin) {
            SignalColumn bolus_col;
            bolus_col.values = std::move(bolus);
            bolus_col.present = meal_mask;
            frame.add_column(kColBolus, std::move(bolus_col));
        }
        SignalColumn carb_col;
        carb_col.values = std::move(carbs);
        carb_col.present = meal_mask;
        frame.add_column(kColCarbs, std::move(carb_col));
    }
    return frame;
}

/// Builds parameters from a flat key-value map (the CLI's --param flags).
inline SyntheticParams synthetic_params_from_map(const std::map<std::string, double>& m) {
    SyntheticParams p;
    for (const auto& [key, value] : m) {
        if (key == "seed") p.seed = static_cast<long long>(value);
        else if (key == "days") p.days = static_cast<int>(value);
        else if (key == "baseline") p.baseline_mgdl = value;
        else if (key == "noise_std") p.noise_std = value;
        else if (key == "drift_amplitude") p.drift_amplitude = value;
        else if (key == "reversion_rate") p.reversion_rate = value;
        else if (key == "carb_rise") p.carb_rise_mgdl_per_g = value;
        else if (key == "insulin_drop") p.insulin_drop_mgdl_per_u = value;
        else if (key == "carb_ratio") p.carb_ratio_g_per_u = value;
        else if (key == "meals") p.meals = value != 0;
        else if (key == "dose_insulin") p.dose_insulin = value != 0;
        else throw SchemaError("synthetic: unknown parameter '" + key + "'");
    }
    return p;
}

}  // namespace glucast
