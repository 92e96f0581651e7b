// One raw timestamped observation from any source.
#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "glucast/core/time.hpp"

namespace glucast {

enum class EventKind { CGM, BOLUS, BASAL, CARBS, HEARTRATE };

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::CGM: return "CGM";
        case EventKind::BOLUS: return "bolus";
        case EventKind::BASAL: return "basal";
        case EventKind::CARBS: return "carbs";
        case EventKind::HEARTRATE: return "heartrate";
    }
    return "?";
}

/// CGM in mg/dL, bolus in U, basal in U/hr, carbs in g, heart rate in bpm.
/// duration_minutes only accompanies BASAL rate segments.
struct EventRecord {
    Timestamp timestamp = 0;
    EventKind kind = EventKind::CGM;
    double value = 0.0;
    std::optional<double> duration_minutes;
};

inline constexpr double kCgmFloorMgdl = 10.0;
inline constexpr double kCgmCeilMgdl = 600.0;

/// Empty string when the record satisfies every invariant, else the violation.
inline std::string event_violation(const EventRecord& r) {
    if (!std::isfinite(r.value)) return "value is not finite";
    if (r.value < 0.0) return "value is negative";
    if (r.kind == EventKind::CGM && (r.value < kCgmFloorMgdl || r.value > kCgmCeilMgdl)) {
        return "CGM value outside [10, 600] mg/dL";
    }
    if (r.duration_minutes) {
        if (r.kind != EventKind::BASAL) return "duration on a non-basal record";
        if (!std::isfinite(*r.duration_minutes) || *r.duration_minutes < 0.0) {
            return "duration is negative or not finite";
        }
    }
    return {};
}

inline bool event_is_valid(const EventRecord& r) { return event_violation(r).empty(); }

}  // namespace glucast
