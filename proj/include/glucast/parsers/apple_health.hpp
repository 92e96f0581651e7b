// Apple Health export reader. Exports can run to gigabytes, so Record
// elements are consumed straight off the XML scanner. Record types we do
// not understand and values that fail validation are skipped and counted
// rather than treated as fatal: a watch export is full of unrelated data.
#pragma once

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"
#include "glucast/core/time.hpp"
#include "glucast/core/units.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/parsers/xml.hpp"
#include "glucast/util/encoding.hpp"

namespace glucast {

struct AppleHealthResult {
    std::vector<EventRecord> records;
    std::size_t skipped = 0;  // unknown types + records with unusable values
};

inline AppleHealthResult parse_apple_health_stream(std::istream& in) {
    xml::Scanner scanner(in);
    AppleHealthResult result;

    struct PendingRecord {
        std::string type;
        std::string unit;
        std::string value;
        std::string start_date;
        std::string end_date;
        std::string delivery_reason;  // MetadataEntry HKInsulinDeliveryReason
    };

    auto attr_or_empty = [](const xml::Token& tok, std::string_view name) {
        const std::string* v = xml::find_attribute(tok, name);
        return v ? *v : std::string();
    };

    auto finish_record = [&](const PendingRecord& rec) {
        double value;
        if (rec.type.empty() || !parse_number(rec.value, value)) {
            ++result.skipped;
            return;
        }
        Timestamp start;
        try {
            start = parse_timestamp(rec.start_date);
        } catch (const ParseError&) {
            ++result.skipped;
            return;
        }

        EventRecord out;
        out.timestamp = start;
        if (rec.type == "HKQuantityTypeIdentifierBloodGlucose") {
            out.kind = EventKind::CGM;
            out.value = rec.unit == "mg/dL"
                            ? value
                            : convert_glucose(value, GlucoseUnit::MMOLL, GlucoseUnit::MGDL);
        } else if (rec.type == "HKQuantityTypeIdentifierDietaryCarbohydrates") {
            out.kind = EventKind::CARBS;
            out.value = value;
        } else if (rec.type == "HKQuantityTypeIdentifierHeartRate") {
            out.kind = EventKind::HEARTRATE;
            out.value = value;
        } else if (rec.type == "HKQuantityTypeIdentifierInsulinDelivery") {
            if (rec.delivery_reason == "1") {
                // basal: total units over [start, end) become a rate segment
                Timestamp end;
                try {
                    end = parse_timestamp(rec.end_date);
                } catch (const ParseError&) {
                    ++result.skipped;
                    return;
                }
                if (end <= start) {
                    ++result.skipped;
                    return;
                }
                double hours = static_cast<double>(end - start) / 3600.0;
                out.kind = EventKind::BASAL;
                out.value = value / hours;
                out.duration_minutes = static_cast<double>(end - start) / 60.0;
            } else if (rec.delivery_reason == "2") {
                out.kind = EventKind::BOLUS;
                out.value = value;
            } else {
                ++result.skipped;
                return;
            }
        } else {
            ++result.skipped;
            return;
        }

        if (!event_is_valid(out)) {
            ++result.skipped;
            return;
        }
        result.records.push_back(out);
    };

    bool in_record = false;
    PendingRecord pending;
    for (;;) {
        xml::Token tok = scanner.next();
        if (tok.kind == xml::TokenKind::EndOfDocument) break;
        if (tok.kind == xml::TokenKind::ElementStart && tok.name == "Record") {
            pending = PendingRecord{};
            pending.type = attr_or_empty(tok, "type");
            pending.unit = attr_or_empty(tok, "unit");
            pending.value = attr_or_empty(tok, "value");
            pending.start_date = attr_or_empty(tok, "startDate");
            pending.end_date = attr_or_empty(tok, "endDate");
            in_record = true;
            if (tok.self_closing) continue;  // end token arrives next
        } else if (in_record && tok.kind == xml::TokenKind::ElementStart &&
                   tok.name == "MetadataEntry") {
            if (attr_or_empty(tok, "key") == "HKInsulinDeliveryReason") {
                pending.delivery_reason = attr_or_empty(tok, "value");
            }
        } else if (in_record && tok.kind == xml::TokenKind::ElementEnd &&
                   tok.name == "Record") {
            finish_record(pending);
            in_record = false;
        }
    }

    std::sort(result.records.begin(), result.records.end(), detail::record_order);
    return result;
}

inline AppleHealthResult parse_apple_health(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open apple health export '" + path + "'");
    return parse_apple_health_stream(in);
}

}  // namespace glucast
