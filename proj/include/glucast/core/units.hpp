// Glucose unit handling. Everything internal is mg/dL; the configured unit
// only affects display and reporting.
#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "glucast/core/errors.hpp"

namespace glucast {

enum class GlucoseUnit { MGDL, MMOLL };

/// Single pinned conversion constant, mg/dL per mmol/L.
inline constexpr double kMgdlPerMmoll = 18.0182;

inline double convert_glucose(double value, GlucoseUnit from, GlucoseUnit to) {
    if (!std::isfinite(value)) {
        throw InvalidValueError("glucose value must be finite");
    }
    if (from == to) return value;
    if (from == GlucoseUnit::MMOLL && to == GlucoseUnit::MGDL) return value * kMgdlPerMmoll;
    return value / kMgdlPerMmoll;
}

inline std::string unit_to_string(GlucoseUnit u) {
    return u == GlucoseUnit::MGDL ? "mg/dL" : "mmol/L";
}

inline GlucoseUnit unit_from_string(std::string_view s) {
    if (s == "mg/dL") return GlucoseUnit::MGDL;
    if (s == "mmol/L") return GlucoseUnit::MMOLL;
    throw SchemaError("unknown glucose unit '" + std::string(s) +
                      "' (expected mg/dL or mmol/L)");
}

}  // namespace glucast
