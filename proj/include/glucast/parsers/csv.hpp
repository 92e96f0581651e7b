// Generic CSV ingestion plus the canonical raw-file writer. The raw file
// written after a parse run uses the fixed header
//   date,CGM,bolus,basal,carbs,heartrate
// with one row per grid bin and empty cells for missing values. The basal
// cell holds the rate (U/hr) active at the bin start, not delivered units;
// together with shortest-round-trip number formatting that makes
// write -> parse_csv -> merge reproduce the original frame exactly.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"
#include "glucast/core/time.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

inline double parse_cell_number(const std::string& cell, std::size_t row, const std::string& col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ParseError("row " + std::to_string(row) + ": cell '" + cell + "' in column '" +
                         col + "' is not a number");
    }
    return v;
}

}  // namespace detail

inline std::vector<EventRecord> parse_csv_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("csv: missing header row");
    }
    std::vector<std::string> header = detail::split_csv_line(line);

    int date_col = -1;
    std::vector<std::optional<EventKind>> kinds(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& name = header[i];
        if (name == "date") {
            if (date_col >= 0) throw SchemaError("csv: duplicate 'date' column");
            date_col = static_cast<int>(i);
        } else if (name == "CGM") {
            kinds[i] = EventKind::CGM;
        } else if (name == "bolus") {
            kinds[i] = EventKind::BOLUS;
        } else if (name == "basal") {
            kinds[i] = EventKind::BASAL;
        } else if (name == "carbs") {
            kinds[i] = EventKind::CARBS;
        } else if (name == "heartrate") {
            kinds[i] = EventKind::HEARTRATE;
        } else {
            throw SchemaError("csv: unknown column '" + name + "'");
        }
    }
    if (date_col < 0) throw SchemaError("csv: no 'date' column in header");

    std::vector<EventRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        Timestamp ts;
        try {
            ts = parse_timestamp(cells[static_cast<std::size_t>(date_col)]);
        } catch (const ParseError& e) {
            throw ParseError("row " + std::to_string(row) + ": " + e.what());
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!kinds[i] || cells[i].empty()) continue;
            EventRecord rec;
            rec.timestamp = ts;
            rec.kind = *kinds[i];
            rec.value = detail::parse_cell_number(cells[i], row, header[i]);
            std::string why = event_violation(rec);
            if (!why.empty()) {
                throw ParseError("row " + std::to_string(row) + ", column '" + header[i] +
                                 "': " + why);
            }
            records.push_back(rec);
        }
    }
    std::sort(records.begin(), records.end(), detail::record_order);
    return records;
}

inline std::vector<EventRecord> parse_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open csv file '" + path + "'");
    return parse_csv_stream(in);
}

inline void write_raw_csv_stream(const MergedData& data, std::ostream& out) {
    const DatasetFrame& f = data.frame;
    out << "date,CGM,bolus,basal,carbs,heartrate\n";
    auto cell = [&](const char* col, std::size_t i) {
        if (f.has_column(col) && f.is_present(col, i)) {
            out << format_double(f.value(col, i));
        }
    };
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << format_rfc3339(f.timestamp_at(i));
        out << ',';
        cell(kColCgm, i);
        out << ',';
        cell(kColBolus, i);
        out << ',';
        if (f.has_column(kColBasal) && i < data.basal_present.size() && data.basal_present[i]) {
            out << format_double(data.basal_rate_u_per_hr[i]);
        }
        out << ',';
        cell(kColCarbs, i);
        out << ',';
        cell(kColHeartrate, i);
        out << '\n';
    }
}

inline void write_raw_csv(const MergedData& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write raw csv '" + path + "'");
    write_raw_csv_stream(data, out);
    out.flush();
    if (!out) throw IoError("failed writing raw csv '" + path + "'");
}

}  // namespace glucast
