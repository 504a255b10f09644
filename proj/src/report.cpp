#include "kinhydro/diagnostics.hpp"

#include "kinhydro/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace kinhydro {

void DiagnosticsReport::add(const std::string& name, double value, double bound, double tolerance,
                            const std::string& provenance, bool asserted)
{
    ReportEntry e;
    e.value = value;
    e.bound = bound;
    e.tolerance = tolerance;
    e.provenance = provenance;
    e.asserted = asserted;
    // NaN never passes
    e.passed = value <= bound + tolerance;
    entries_[name] = e;
}

void DiagnosticsReport::merge(const DiagnosticsReport& other, const std::string& prefix)
{
    for (const auto& [name, e] : other.entries_) {
        entries_[prefix + name] = e;
    }
    for (const auto& [k, v] : other.metadata_) {
        metadata_[prefix + k] = v;
    }
}

bool DiagnosticsReport::passed() const
{
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const auto& kv) { return !kv.second.asserted || kv.second.passed; });
}

const ReportEntry& DiagnosticsReport::at(const std::string& name) const
{
    const auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw Error("report has no entry '" + name + "'");
    }
    return it->second;
}

std::string DiagnosticsReport::to_json() const
{
    nlohmann::ordered_json j;
    j["passed"] = passed();
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata_) {
        meta[k] = v;
    }
    j["metadata"] = meta;
    nlohmann::ordered_json entries = nlohmann::ordered_json::object();
    for (const auto& [name, e] : entries_) {
        nlohmann::ordered_json row;
        row["value"] = e.value;
        row["bound"] = e.bound;
        row["tolerance"] = e.tolerance;
        row["passed"] = e.passed;
        row["asserted"] = e.asserted;
        row["provenance"] = e.provenance;
        entries[name] = row;
    }
    j["entries"] = entries;
    return j.dump(2) + "\n";
}

std::string DiagnosticsReport::to_text() const
{
    std::size_t width = 4;
    for (const auto& [name, e] : entries_) {
        width = std::max(width, name.size());
    }
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %14s  %14s  %10s  %s\n", static_cast<int>(width), "name",
                  "value", "bound", "tolerance", "status");
    os << buf;
    for (const auto& [name, e] : entries_) {
        const char* status = !e.asserted ? "info" : (e.passed ? "PASS" : "FAIL");
        std::snprintf(buf, sizeof buf, "%-*s  %14.6e  %14.6e  %10.3e  %s\n",
                      static_cast<int>(width), name.c_str(), e.value, e.bound, e.tolerance, status);
        os << buf;
    }
    os << (passed() ? "overall: PASS\n" : "overall: FAIL\n");
    return os.str();
}

} // namespace kinhydro
