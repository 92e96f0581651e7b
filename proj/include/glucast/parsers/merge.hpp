// Collapse heterogeneous event streams onto a uniform time grid. The grid
// runs from the first to the last CGM reading; every signal is aggregated
// per bin with kind-specific rules:
//   CGM, heartrate  mean of the readings that fall in the bin
//   bolus, carbs    sum over the bin
//   basal           the rate (U/hr) active at the bin start, converted to
//                   delivered units for the bin
// Basal records are a step function: a record without a duration sets the
// persistent rate from its timestamp on; a record with a duration overrides
// the rate for [ts, ts+duration) and then falls back to the persistent one.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/core/event.hpp"
#include "glucast/core/frame.hpp"

namespace glucast {

/// A merged frame plus the basal rates it was derived from. The rates are
/// what the raw CSV stores (they survive a write/read cycle bit for bit,
/// delivered units are recomputed from them), so they travel together.
struct MergedData {
    DatasetFrame frame;
    std::vector<double> basal_rate_u_per_hr;  // aligned with the frame
    std::vector<std::uint8_t> basal_present;
};

namespace detail {

inline bool record_order(const EventRecord& a, const EventRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.value != b.value) return a.value < b.value;
    return a.duration_minutes.value_or(-1.0) < b.duration_minutes.value_or(-1.0);
}

}  // namespace detail

inline MergedData merge_records(std::vector<EventRecord> records, int interval_minutes) {
    if (interval_minutes <= 0) {
        throw InvalidValueError("merge interval must be positive");
    }
    for (const auto& r : records) {
        std::string why = event_violation(r);
        if (!why.empty()) {
            throw InvalidValueError("invalid " + std::string(event_kind_name(r.kind)) +
                                    " record: " + why);
        }
    }
    // A fixed order makes every aggregate independent of input permutation.
    std::sort(records.begin(), records.end(), detail::record_order);

    Timestamp first_cgm = 0, last_cgm = 0;
    bool seen_cgm = false;
    for (const auto& r : records) {
        if (r.kind != EventKind::CGM) continue;
        if (!seen_cgm) first_cgm = r.timestamp;
        last_cgm = r.timestamp;
        seen_cgm = true;
    }
    if (!seen_cgm) throw EmptyInputError("no CGM records to anchor the grid");

    const Timestamp step = static_cast<Timestamp>(interval_minutes) * 60;
    const std::size_t n = static_cast<std::size_t>((last_cgm - first_cgm) / step) + 1;

    struct Accumulator {
        std::vector<double> sum;
        std::vector<std::uint32_t> count;
        void init(std::size_t len) {
            sum.assign(len, 0.0);
            count.assign(len, 0);
        }
    };
    Accumulator cgm, bolus, carbs, heartrate;
    cgm.init(n);
    bolus.init(n);
    carbs.init(n);
    heartrate.init(n);

    std::vector<const EventRecord*> basal_records;
    for (const auto& r : records) {
        if (r.kind == EventKind::BASAL) {
            basal_records.push_back(&r);
            continue;
        }
        if (r.timestamp < first_cgm) continue;
        std::size_t bin = static_cast<std::size_t>((r.timestamp - first_cgm) / step);
        if (bin >= n) continue;
        Accumulator* acc = nullptr;
        switch (r.kind) {
            case EventKind::CGM: acc = &cgm; break;
            case EventKind::BOLUS: acc = &bolus; break;
            case EventKind::CARBS: acc = &carbs; break;
            case EventKind::HEARTRATE: acc = &heartrate; break;
            case EventKind::BASAL: break;
        }
        acc->sum[bin] += r.value;
        acc->count[bin] += 1;
    }

    // Sweep the basal step function across the bin starts.
    std::vector<double> basal_rate(n, 0.0);
    std::vector<std::uint8_t> basal_present(n, 0);
    if (!basal_records.empty()) {
        const Timestamp first_basal = basal_records.front()->timestamp;
        double persistent = 0.0;
        std::vector<const EventRecord*> active_temps;
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Timestamp at = first_cgm + static_cast<Timestamp>(i) * step;
            while (next < basal_records.size() && basal_records[next]->timestamp <= at) {
                const EventRecord* r = basal_records[next++];
                if (r->duration_minutes) {
                    active_temps.push_back(r);
                } else {
                    persistent = r->value;
                }
            }
            std::erase_if(active_temps, [&](const EventRecord* r) {
                return r->timestamp +
                           static_cast<Timestamp>(std::llround(*r->duration_minutes * 60.0)) <=
                       at;
            });
            if (at < first_basal) continue;
            basal_rate[i] = active_temps.empty() ? persistent : active_temps.back()->value;
            basal_present[i] = 1;
        }
    }

    MergedData out;
    out.frame = DatasetFrame(first_cgm, interval_minutes);
    out.basal_rate_u_per_hr = basal_rate;
    out.basal_present = basal_present;

    auto add_mean = [&](const char* name, const Accumulator& acc) {
        SignalColumn col;
        col.values.assign(n, 0.0);
        col.present.assign(n, 0);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (acc.count[i] == 0) continue;
            col.values[i] = acc.sum[i] / acc.count[i];
            col.present[i] = 1;
            any = true;
        }
        if (any) out.frame.add_column(name, std::move(col));
    };
    auto add_sum = [&](const char* name, const Accumulator& acc) {
        SignalColumn col;
        col.values.assign(n, 0.0);
        col.present.assign(n, 0);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (acc.count[i] == 0) continue;
            col.values[i] = acc.sum[i];
            col.present[i] = 1;
            any = true;
        }
        if (any) out.frame.add_column(name, std::move(col));
    };

    add_mean(kColCgm, cgm);
    add_sum(kColBolus, bolus);
    {
        const double hours = static_cast<double>(interval_minutes) / 60.0;
        SignalColumn col;
        col.values.assign(n, 0.0);
        col.present = basal_present;
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!basal_present[i]) continue;
            col.values[i] = basal_rate[i] * hours;
            any = true;
        }
        if (any) out.frame.add_column(kColBasal, std::move(col));
    }
    add_sum(kColCarbs, carbs);
    add_mean(kColHeartrate, heartrate);
    return out;
}

inline DatasetFrame merge_to_frame(std::vector<EventRecord> records, int interval_minutes) {
    return merge_records(std::move(records), interval_minutes).frame;
}

}  // namespace glucast
