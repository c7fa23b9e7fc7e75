#pragma once

// Joins per-knot feature and geometry tables and reproduces the grouped
// correlation and average-by-type summaries.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"
#include "io.hpp"
#include "stats.hpp"

namespace knotscope {

enum class GroupBy { length, type_length };

inline const std::vector<std::pair<std::string, std::string>>& default_correlation_pairs() {
    static const std::vector<std::pair<std::string, std::string>> pairs{
        {"I", "rs_volume"},     {"I", "hull_volume"}, {"I", "rg"},
        {"I", "acn"},           {"M", "hull_volume"}, {"n_bars", "hull_volume"},
        {"I", "curvature"},     {"I", "torsion"},
    };
    return pairs;
}

namespace detail {

inline double feature_value(const FeatureRow& r, const std::string& name) {
    if (name == "I") return r.integral_I;
    if (name == "M") return r.max_bar;
    if (name == "n_bars") return static_cast<double>(r.n_bars);
    if (name == "delta_eps") return r.delta_eps;
    throw DataError("unknown feature '" + name + "'");
}

inline double geometry_value(const GeometryRow& r, const std::string& name) {
    if (name == "rs_volume") return r.rs_volume;
    if (name == "hull_volume") return r.hull_volume;
    if (name == "rg") return r.rg;
    if (name == "acn") return r.acn;
    if (name == "curvature") return r.curvature;
    if (name == "torsion") return r.torsion;
    throw DataError("unknown geometry column '" + name + "'");
}

}  // namespace detail

// One correlation row per (group, pair); groups with fewer than two members
// or with a degenerate variable are omitted.
inline std::vector<CorrelationRow> correlate_by_group(
    const std::vector<FeatureRow>& features,
    const std::vector<GeometryRow>& geometry, GroupBy group_by,
    const std::vector<std::pair<std::string, std::string>>& pairs =
        default_correlation_pairs(),
    bool use_spearman = false) {
    std::unordered_map<std::string, const GeometryRow*> geo_by_id;
    for (const GeometryRow& g : geometry) geo_by_id[g.id] = &g;

    struct Joined {
        const FeatureRow* f;
        const GeometryRow* g;
    };
    std::map<std::pair<std::uint64_t, std::string>, std::vector<Joined>> groups;
    for (const FeatureRow& f : features) {
        const auto it = geo_by_id.find(f.id);
        if (it == geo_by_id.end()) {
            throw DataError("feature row '" + f.id + "' has no geometry row");
        }
        const std::string label =
            group_by == GroupBy::length ? "all" : it->second->knot_type;
        groups[{f.length, label}].push_back({&f, it->second});
    }

    std::vector<CorrelationRow> out;
    for (const auto& [key, members] : groups) {
        if (members.size() < 2) continue;
        for (const auto& [xn, yn] : pairs) {
            std::vector<double> xs, ys;
            xs.reserve(members.size());
            ys.reserve(members.size());
            for (const Joined& m : members) {
                xs.push_back(detail::feature_value(*m.f, xn));
                ys.push_back(detail::geometry_value(*m.g, yn));
            }
            const auto r = use_spearman ? spearman(xs, ys) : pearson(xs, ys);
            if (!r) continue;
            out.push_back({key.first, key.second, xn, yn, *r,
                           static_cast<std::uint64_t>(members.size())});
        }
    }
    return out;
}

// Mean and standard error of a scalar feature per (knot_type, length) group.
inline std::vector<AverageRow> average_feature_by_type(
    const std::vector<FeatureRow>& features, const std::string& feature = "I") {
    std::map<std::pair<std::string, std::uint64_t>, std::vector<double>> groups;
    for (const FeatureRow& f : features) {
        groups[{f.knot_type, f.length}].push_back(detail::feature_value(f, feature));
    }
    std::vector<AverageRow> out;
    for (const auto& [key, values] : groups) {
        if (values.empty()) continue;
        const MeanStderr m = mean_stderr(values);
        out.push_back({key.first, key.second, m.mean, m.stderr_});
    }
    return out;
}

}  // namespace knotscope
