// Name-indexed parser registry. Each entry turns a SourceDescriptor into
// merged grid data; new sources plug in by registering a name, nothing else
// in the pipeline changes.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"
#include "glucast/parsers/apple_health.hpp"
#include "glucast/parsers/csv.hpp"
#include "glucast/parsers/merge.hpp"
#include "glucast/parsers/nightscout.hpp"
#include "glucast/parsers/ohio.hpp"
#include "glucast/parsers/source.hpp"
#include "glucast/parsers/synthetic.hpp"

namespace glucast {

using AcquireFn = std::function<MergedData(const SourceDescriptor&, int interval_minutes)>;

class SourceRegistry {
public:
    SourceRegistry() {
        add("csv", [](const SourceDescriptor& desc, int interval) {
            validate_source(desc);
            return merge_records(parse_csv(desc.location), interval);
        });
        add("apple_health", [](const SourceDescriptor& desc, int interval) {
            validate_source(desc);
            return merge_records(parse_apple_health(desc.location).records, interval);
        });
        add("ohio_t1dm", [](const SourceDescriptor& desc, int interval) {
            validate_source(desc);
            return merge_records(parse_ohio(desc.location), interval);
        });
        add("nightscout", [](const SourceDescriptor& desc, int interval) {
            return merge_records(parse_nightscout(desc), interval);
        });
        add("synthetic", [](const SourceDescriptor& desc, int interval) {
            validate_source(desc);
            if (interval != 5) {
                throw InvalidValueError("synthetic data is generated on a 5-minute grid");
            }
            MergedData out;
            out.frame = synth_generate(synthetic_params_from_map(desc.params));
            return out;
        });
    }

    void add(const std::string& name, AcquireFn fn) {
        if (entries_.count(name)) {
            throw SchemaError("parser '" + name + "' is already registered");
        }
        entries_[name] = std::move(fn);
    }

    bool has(const std::string& name) const { return entries_.count(name) > 0; }

    MergedData acquire(const std::string& name, const SourceDescriptor& desc,
                       int interval_minutes) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) {
            throw SchemaError("unknown source kind '" + name + "' (available: " +
                              joined_names() + ")");
        }
        return it->second(desc, interval_minutes);
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, fn] : entries_) out.push_back(name);
        return out;
    }

private:
    std::string joined_names() const {
        std::string out;
        for (const auto& [name, fn] : entries_) {
            if (!out.empty()) out += ", ";
            out += name;
        }
        return out;
    }

    std::map<std::string, AcquireFn> entries_;
};

}  // namespace glucast
