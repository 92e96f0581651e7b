// Metric tables in three formats. One row per (model, horizon); the column
// order is fixed and documented here:
//   model, horizon_minutes, rmse, mae, mard, me, mre, gs_rmse,
//   clarke_A..clarke_E, parkes_A..parkes_E
// Grid columns are zone percentages; mard/mre are percentages and never
// converted. Glucose-valued columns (rmse, mae, me, gs_rmse) are rescaled to
// the report's display unit. CSV and Markdown cells are fixed to 4 decimals
// for stable diffs; JSON keeps full precision for machine consumers.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "glucast/core/units.hpp"
#include "glucast/report/evaluation.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

enum class TableFormat { CSV, JSON, MARKDOWN };

namespace detail {

inline const std::vector<std::string>& table_columns() {
    static const std::vector<std::string> columns = {
        "model",    "horizon_minutes", "rmse",     "mae",      "mard",     "me",
        "mre",      "gs_rmse",         "clarke_A", "clarke_B", "clarke_C", "clarke_D",
        "clarke_E", "parkes_A",        "parkes_B", "parkes_C", "parkes_D", "parkes_E"};
    return columns;
}

inline double display_glucose(double value_mgdl, GlucoseUnit unit) {
    return unit == GlucoseUnit::MMOLL ? value_mgdl / kMgdlPerMmoll : value_mgdl;
}

// numeric cells in fixed column order; the caller prepends the model name
inline std::vector<double> row_values(const HorizonMetrics& h, GlucoseUnit unit) {
    std::vector<double> cells = {static_cast<double>(h.horizon_minutes),
                                 display_glucose(h.scalar.rmse, unit),
                                 display_glucose(h.scalar.mae, unit),
                                 h.scalar.mard_percent,
                                 display_glucose(h.scalar.me, unit),
                                 h.scalar.mre_percent,
                                 display_glucose(h.gs_rmse_value, unit)};
    for (double percent : h.clarke.zone_percentages) cells.push_back(percent);
    for (double percent : h.parkes.zone_percentages) cells.push_back(percent);
    return cells;
}

}  // namespace detail

inline std::string metrics_table(const std::vector<EvaluationReport>& reports,
                                 TableFormat format) {
    const auto& columns = detail::table_columns();
    if (format == TableFormat::JSON) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& report : reports) {
            for (const auto& horizon : report.horizons) {
                nlohmann::json row;
                row["model"] = report.model_name;
                const std::vector<double> cells = detail::row_values(horizon, report.unit);
                row["horizon_minutes"] = horizon.horizon_minutes;
                for (std::size_t c = 2; c < columns.size(); ++c) row[columns[c]] = cells[c - 1];
                rows.push_back(std::move(row));
            }
        }
        return rows.dump(2) + "\n";
    }

    std::string out;
    const char* separator = format == TableFormat::CSV ? "," : " | ";
    if (format == TableFormat::MARKDOWN) out += "| ";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c > 0) out += separator;
        out += columns[c];
    }
    if (format == TableFormat::MARKDOWN) out += " |";
    out += '\n';
    if (format == TableFormat::MARKDOWN) {
        out += "|";
        for (std::size_t c = 0; c < columns.size(); ++c) out += " --- |";
        out += '\n';
    }
    for (const auto& report : reports) {
        for (const auto& horizon : report.horizons) {
            if (format == TableFormat::MARKDOWN) out += "| ";
            out += report.model_name;
            const std::vector<double> cells = detail::row_values(horizon, report.unit);
            out += separator;
            out += std::to_string(horizon.horizon_minutes);
            for (std::size_t c = 1; c < cells.size(); ++c) {
                out += separator;
                out += format_fixed(cells[c], 4);
            }
            if (format == TableFormat::MARKDOWN) out += " |";
            out += '\n';
        }
    }
    return out;
}

}  // namespace glucast
