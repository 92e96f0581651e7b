// Nightscout REST client. Pulls glucose entries and treatment events over
// the requested time range, paginating backwards (the API returns newest
// first) until the window is covered. Transient HTTP failures are retried
// with exponential backoff; auth failures and malformed payloads are not.
#pragma once

#include <algorithm>
#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"
#include "glucast/core/time.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/parsers/source.hpp"

namespace glucast {

struct NightscoutOptions {
    int max_attempts = 3;
    int initial_backoff_ms = 1000;
    int timeout_seconds = 30;
    int page_size = 1000;
};

namespace detail {

struct SplitUrl {
    std::string base;    // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash, may be empty
};

inline SplitUrl split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw SchemaError("URL has no scheme: '" + url + "'");
    std::size_t slash = url.find('/', scheme + 3);
    SplitUrl out;
    if (slash == std::string::npos) {
        out.base = url;
    } else {
        out.base = url.substr(0, slash);
        out.prefix = url.substr(slash);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    return out;
}

/// GET with bounded retries. Retries cover transport errors and 5xx; a 401
/// aborts immediately since more attempts cannot help.
inline std::string http_get_json(httplib::Client& client, const std::string& path,
                                 const httplib::Headers& headers,
                                 const NightscoutOptions& opts, const char* what) {
    std::string last_error;
    for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
        if (attempt > 1) {
            int delay = opts.initial_backoff_ms << (attempt - 2);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        httplib::Result res = client.Get(path, headers);
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError(std::string("nightscout rejected credentials fetching ") + what +
                            " (HTTP " + std::to_string(res->status) + ")");
        }
        if (res->status == 200) return res->body;
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status >= 400 && res->status < 500) break;  // not transient
    }
    throw TransportError(std::string("nightscout ") + what + " request failed after retries: " +
                         last_error);
}

inline nlohmann::json parse_json_array(const std::string& body, const char* what) {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
        throw ParseError(std::string("nightscout ") + what + " payload is not a JSON array");
    }
    return doc;
}

}  // namespace detail

inline std::vector<EventRecord> parse_nightscout(const SourceDescriptor& desc,
                                                 const NightscoutOptions& opts = {}) {
    validate_source(desc);
    detail::SplitUrl url = detail::split_url(desc.location);
    httplib::Client client(url.base);
    if (!client.is_valid()) {
        throw TransportError("cannot reach nightscout base URL '" + url.base +
                             "' (https needs TLS support)");
    }
    client.set_connection_timeout(opts.timeout_seconds, 0);
    client.set_read_timeout(opts.timeout_seconds, 0);

    httplib::Headers headers;
    if (desc.credentials) headers.emplace("api-secret", *desc.credentials);

    Timestamp range_start = 0;
    Timestamp range_end = parse_timestamp("2100-01-01T00:00:00Z");
    if (desc.time_range) {
        range_start = desc.time_range->start;
        range_end = desc.time_range->end;
    }

    std::vector<EventRecord> records;

    // entries: sgv in mg/dL, date in epoch milliseconds, newest first
    {
        long long gte_ms = static_cast<long long>(range_start) * 1000;
        long long lte_ms = static_cast<long long>(range_end) * 1000;
        for (;;) {
            std::string path = url.prefix + "/api/v1/entries.json?find[date][$gte]=" +
                               std::to_string(gte_ms) +
                               "&find[date][$lte]=" + std::to_string(lte_ms) +
                               "&count=" + std::to_string(opts.page_size);
            nlohmann::json batch = detail::parse_json_array(
                detail::http_get_json(client, path, headers, opts, "entries"), "entries");
            long long oldest = lte_ms;
            for (const auto& item : batch) {
                if (!item.is_object()) throw ParseError("nightscout entries item is not an object");
                auto date = item.find("date");
                auto sgv = item.find("sgv");
                if (date == item.end() || !date->is_number()) continue;
                long long ms = date->get<long long>();
                oldest = std::min(oldest, ms);
                if (sgv == item.end() || !sgv->is_number()) continue;  // not a glucose entry
                double value = sgv->get<double>();
                EventRecord rec{ms / 1000, EventKind::CGM, value, std::nullopt};
                if (event_is_valid(rec)) records.push_back(rec);
            }
            if (static_cast<int>(batch.size()) < opts.page_size) break;
            lte_ms = oldest - 1;
            if (lte_ms < gte_ms) break;
        }
    }

    // treatments: insulin boluses, carb entries, temp basals; created_at ISO time
    {
        std::string gte = format_rfc3339(range_start);
        std::string lte = format_rfc3339(range_end);
        for (;;) {
            std::string path = url.prefix + "/api/v1/treatments.json?find[created_at][$gte]=" +
                               gte + "&find[created_at][$lte]=" + lte +
                               "&count=" + std::to_string(opts.page_size);
            nlohmann::json batch = detail::parse_json_array(
                detail::http_get_json(client, path, headers, opts, "treatments"), "treatments");
            Timestamp oldest = parse_timestamp(lte);
            for (const auto& item : batch) {
                if (!item.is_object()) {
                    throw ParseError("nightscout treatments item is not an object");
                }
                auto created = item.find("created_at");
                if (created == item.end() || !created->is_string()) continue;
                Timestamp ts;
                try {
                    ts = parse_timestamp(created->get<std::string>());
                } catch (const ParseError&) {
                    throw ParseError("nightscout treatment has unparseable created_at '" +
                                     created->get<std::string>() + "'");
                }
                oldest = std::min(oldest, ts);

                if (auto insulin = item.find("insulin");
                    insulin != item.end() && insulin->is_number()) {
                    EventRecord rec{ts, EventKind::BOLUS, insulin->get<double>(), std::nullopt};
                    if (event_is_valid(rec)) records.push_back(rec);
                }
                if (auto carbs = item.find("carbs"); carbs != item.end() && carbs->is_number()) {
                    EventRecord rec{ts, EventKind::CARBS, carbs->get<double>(), std::nullopt};
                    if (event_is_valid(rec)) records.push_back(rec);
                }
                auto event_type = item.find("eventType");
                if (event_type != item.end() && event_type->is_string() &&
                    event_type->get<std::string>() == "Temp Basal") {
                    auto rate = item.find("rate");
                    if (rate == item.end()) rate = item.find("absolute");
                    auto duration = item.find("duration");
                    if (rate != item.end() && rate->is_number() && duration != item.end() &&
                        duration->is_number() && duration->get<double>() > 0) {
                        EventRecord rec{ts, EventKind::BASAL, rate->get<double>(),
                                        duration->get<double>()};
                        if (event_is_valid(rec)) records.push_back(rec);
                    }
                }
            }
            if (static_cast<int>(batch.size()) < opts.page_size) break;
            Timestamp next_lte = oldest - 1;
            if (next_lte < range_start) break;
            lte = format_rfc3339(next_lte);
        }
    }

    std::sort(records.begin(), records.end(), detail::record_order);
    return records;
}

}  // namespace glucast
