// The canonical interchange format between pipeline stages: a uniformly
// gridded multi-signal time series in mg/dL with per-column missing masks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"
#include "glucast/core/time.hpp"

namespace glucast {

/// Canonical column names. The raw CSV header uses "basal" for the rate
/// column; after merging, the frame stores delivered units per bin under
/// this name.
inline constexpr const char* kColCgm = "CGM";
inline constexpr const char* kColBolus = "bolus";
inline constexpr const char* kColBasal = "basal_delivered";
inline constexpr const char* kColCarbs = "carbs";
inline constexpr const char* kColHeartrate = "heartrate";

struct SignalColumn {
    std::vector<double> values;
    std::vector<std::uint8_t> present;  // 1 where observed
};

class DatasetFrame {
public:
    DatasetFrame() = default;
    DatasetFrame(Timestamp start, int interval_minutes)
        : start_(start), interval_minutes_(interval_minutes) {}

    Timestamp start() const { return start_; }
    int interval_minutes() const { return interval_minutes_; }
    void set_start(Timestamp t) { start_ = t; }
    void set_interval_minutes(int m) { interval_minutes_ = m; }

    std::size_t size() const { return names_.empty() ? 0 : columns_[0].values.size(); }
    Timestamp timestamp_at(std::size_t i) const {
        return start_ + static_cast<Timestamp>(i) * interval_minutes_ * 60;
    }

    const std::vector<std::string>& column_names() const { return names_; }
    bool has_column(const std::string& name) const { return find(name) >= 0; }

    void add_column(const std::string& name, SignalColumn col) {
        if (find(name) >= 0) throw SchemaError("duplicate column '" + name + "'");
        names_.push_back(name);
        columns_.push_back(std::move(col));
    }

    const SignalColumn& column(const std::string& name) const {
        int i = find(name);
        if (i < 0) throw SchemaError("frame has no column '" + name + "'");
        return columns_[static_cast<std::size_t>(i)];
    }
    SignalColumn& column(const std::string& name) {
        int i = find(name);
        if (i < 0) throw SchemaError("frame has no column '" + name + "'");
        return columns_[static_cast<std::size_t>(i)];
    }

    double value(const std::string& name, std::size_t i) const { return column(name).values[i]; }
    bool is_present(const std::string& name, std::size_t i) const {
        return column(name).present[i] != 0;
    }

    bool operator==(const DatasetFrame& other) const {
        if (start_ != other.start_ || interval_minutes_ != other.interval_minutes_ ||
            names_ != other.names_) {
            return false;
        }
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            const auto& a = columns_[c];
            const auto& b = other.columns_[c];
            if (a.present != b.present || a.values.size() != b.values.size()) return false;
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                // only observed cells carry meaning; compare them bit-for-bit
                if (a.present[i] &&
                    std::memcmp(&a.values[i], &b.values[i], sizeof(double)) != 0) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    int find(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    Timestamp start_ = 0;
    int interval_minutes_ = 5;
    std::vector<std::string> names_;
    std::vector<SignalColumn> columns_;
};

struct FrameViolation {
    std::string column;                 // empty for frame-level violations
    std::optional<std::size_t> index;
    std::string message;
};

struct ValidationReport {
    std::vector<FrameViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every typed frame invariant; violations are data, not errors.
inline ValidationReport validate_frame(const DatasetFrame& frame) {
    ValidationReport report;
    auto add = [&](std::string col, std::optional<std::size_t> idx, std::string msg) {
        report.violations.push_back({std::move(col), idx, std::move(msg)});
    };

    if (frame.interval_minutes() <= 0) {
        add("", std::nullopt, "interval_minutes must be positive");
    }
    if (frame.column_names().empty() || frame.size() == 0) {
        add("", std::nullopt, "empty frame");
        return report;
    }
    if (!frame.has_column(kColCgm)) {
        add(kColCgm, std::nullopt, "required CGM column missing");
    }

    const std::size_t n = frame.size();
    for (const auto& name : frame.column_names()) {
        const SignalColumn& col = frame.column(name);
        if (col.values.size() != n || col.present.size() != n) {
            add(name, std::nullopt, "column length differs from frame length");
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!col.present[i]) continue;
            double v = col.values[i];
            if (!std::isfinite(v)) {
                add(name, i, "value is not finite");
            } else if (name == kColCgm && (v < kCgmFloorMgdl || v > kCgmCeilMgdl)) {
                add(name, i, "CGM value outside [10, 600] mg/dL");
            }
        }
    }
    return report;
}

}  // namespace glucast
