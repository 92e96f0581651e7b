// Ohio T1DM per-subject XML reader. Events are grouped by signal section:
//   glucose_level/event @ts @value      -> CGM
//   bolus/event @ts_begin @dose         -> BOLUS
//   basal/event @ts @value              -> BASAL rate change (persistent)
//   temp_basal/event @ts_begin @ts_end @value -> BASAL override with duration
//   meal/event @ts @carbs               -> CARBS
// Timestamps are day-first (`DD-MM-YYYY HH:MM:SS`). Unlike the Apple Health
// reader this one is strict: the dataset is curated, so a bad element is a
// real problem and is reported with its section and timestamp.
#pragma once

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"
#include "glucast/core/time.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/parsers/xml.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

inline std::vector<EventRecord> parse_ohio_stream(std::istream& in) {
    xml::Scanner scanner(in);
    std::vector<EventRecord> records;
    bool seen_glucose_section = false;
    std::vector<std::string> path;

    auto required_attr = [](const xml::Token& tok, std::string_view name,
                            const std::string& section) -> const std::string& {
        const std::string* v = xml::find_attribute(tok, name);
        if (!v) {
            throw ParseError(section + " event is missing attribute '" + std::string(name) +
                             "'");
        }
        return *v;
    };
    auto attr_time = [&](const xml::Token& tok, std::string_view name,
                         const std::string& section) {
        const std::string& raw = required_attr(tok, name, section);
        try {
            return parse_day_first_timestamp(raw);
        } catch (const ParseError&) {
            throw ParseError(section + " event has unparseable timestamp '" + raw + "'");
        }
    };
    auto attr_number = [&](const xml::Token& tok, std::string_view name,
                           const std::string& section) {
        const std::string& raw = required_attr(tok, name, section);
        double v;
        if (!parse_number(raw, v)) {
            throw ParseError(section + " event has non-numeric '" + std::string(name) + "'='" +
                             raw + "'");
        }
        return v;
    };

    for (;;) {
        xml::Token tok = scanner.next();
        if (tok.kind == xml::TokenKind::EndOfDocument) break;
        if (tok.kind == xml::TokenKind::ElementEnd) {
            if (!path.empty()) path.pop_back();
            continue;
        }
        std::string section = path.empty() ? "" : path.back();
        path.push_back(tok.name);
        if (tok.name == "glucose_level") {
            seen_glucose_section = true;
            continue;
        }
        if (tok.name != "event") continue;

        EventRecord rec;
        if (section == "glucose_level") {
            rec.timestamp = attr_time(tok, "ts", section);
            rec.kind = EventKind::CGM;
            rec.value = attr_number(tok, "value", section);
        } else if (section == "bolus") {
            rec.timestamp = attr_time(tok, "ts_begin", section);
            rec.kind = EventKind::BOLUS;
            rec.value = attr_number(tok, "dose", section);
        } else if (section == "basal") {
            rec.timestamp = attr_time(tok, "ts", section);
            rec.kind = EventKind::BASAL;
            rec.value = attr_number(tok, "value", section);
        } else if (section == "temp_basal") {
            rec.timestamp = attr_time(tok, "ts_begin", section);
            Timestamp end = attr_time(tok, "ts_end", section);
            if (end <= rec.timestamp) {
                throw ParseError("temp_basal event ends at or before its start");
            }
            rec.kind = EventKind::BASAL;
            rec.value = attr_number(tok, "value", section);
            rec.duration_minutes = static_cast<double>(end - rec.timestamp) / 60.0;
        } else if (section == "meal") {
            rec.timestamp = attr_time(tok, "ts", section);
            rec.kind = EventKind::CARBS;
            rec.value = attr_number(tok, "carbs", section);
        } else {
            continue;  // exercise, finger sticks, sleep: not used by the pipeline
        }

        std::string why = event_violation(rec);
        if (!why.empty()) {
            throw ParseError(section + " event at " + format_rfc3339(rec.timestamp) + ": " +
                             why);
        }
        records.push_back(rec);
    }

    if (!seen_glucose_section) {
        throw ParseError("ohio file has no glucose_level section");
    }
    std::sort(records.begin(), records.end(), detail::record_order);
    return records;
}

inline std::vector<EventRecord> parse_ohio(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open ohio file '" + path + "'");
    return parse_ohio_stream(in);
}

}  // namespace glucast
