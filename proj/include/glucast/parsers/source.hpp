// Where raw data comes from: one descriptor covers remote APIs, on-disk
// exports, and the synthetic generator.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "glucast/core/errors.hpp"
#include "glucast/core/time.hpp"

namespace glucast {

enum class SourceKind { NIGHTSCOUT, APPLE_HEALTH, OHIO_T1DM, CSV, SYNTHETIC };

inline std::string source_kind_name(SourceKind k) {
    switch (k) {
        case SourceKind::NIGHTSCOUT: return "nightscout";
        case SourceKind::APPLE_HEALTH: return "apple_health";
        case SourceKind::OHIO_T1DM: return "ohio_t1dm";
        case SourceKind::CSV: return "csv";
        case SourceKind::SYNTHETIC: return "synthetic";
    }
    return "?";
}

struct TimeRange {
    Timestamp start = 0;
    Timestamp end = 0;
};

struct SourceDescriptor {
    SourceKind kind = SourceKind::CSV;
    std::string location;  // base URL for NIGHTSCOUT, file path for file kinds
    std::optional<std::string> credentials;
    std::optional<TimeRange> time_range;
    std::map<std::string, double> params;  // synthetic generator knobs
};

inline void validate_source(const SourceDescriptor& desc) {
    switch (desc.kind) {
        case SourceKind::NIGHTSCOUT:
            if (desc.location.rfind("http://", 0) != 0 &&
                desc.location.rfind("https://", 0) != 0) {
                throw SchemaError("nightscout source needs an http(s) URL");
            }
            break;
        case SourceKind::SYNTHETIC:
            if (!desc.params.count("seed")) {
                throw SchemaError("synthetic source needs a 'seed' parameter");
            }
            break;
        default:
            if (desc.location.empty()) {
                throw SchemaError("file source needs a path");
            }
            break;
    }
    if (desc.time_range && desc.time_range->end < desc.time_range->start) {
        throw SchemaError("time range end precedes start");
    }
}

}  // namespace glucast
