#pragma once

// File formats: JSON Lines for knots, CSV for everything tabular. Writers
// are hand-rolled so output is byte-stable; floating values use 17
// significant digits and parse back exactly. Readers report the offending
// line number on malformed input.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "knot.hpp"
#include "persistence.hpp"

namespace knotscope {

inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw DataError(where + ": cannot parse number '" + s + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    // strtoull silently wraps negative input, so insist on digits only
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw DataError(where + ": cannot parse integer '" + s + "'");
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw DataError(where + ": cannot parse integer '" + s + "'");
    }
    return v;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for reading");
    return f;
}

}  // namespace detail

inline std::string knot_to_json_line(const KnotEmbedding& k) {
    std::string out = "{\"id\":\"" + detail::json_escape(k.id) + "\",\"seed\":";
    out += std::to_string(k.seed);
    out += ",\"length\":" + std::to_string(k.vertices.size());
    out += ",\"knot_type\":";
    if (k.knot_type) out += "\"" + detail::json_escape(*k.knot_type) + "\"";
    else out += "null";
    out += ",\"vertices\":[";
    for (std::size_t i = 0; i < k.vertices.size(); ++i) {
        if (i) out += ",";
        const Vec3& v = k.vertices[i];
        out += "[" + fmt_double(v.x) + "," + fmt_double(v.y) + "," + fmt_double(v.z) + "]";
    }
    out += "]}";
    return out;
}

inline void write_knots_jsonl(const std::string& path,
                              const std::vector<KnotEmbedding>& knots) {
    auto f = detail::open_out(path);
    for (const KnotEmbedding& k : knots) f << knot_to_json_line(k) << "\n";
}

inline KnotEmbedding knot_from_json_line(const std::string& line,
                                         const std::string& where) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": expected a JSON object");
    KnotEmbedding k;
    try {
        k.id = j.at("id").get<std::string>();
        k.seed = j.at("seed").get<std::uint64_t>();
        const auto& kt = j.at("knot_type");
        if (!kt.is_null()) k.knot_type = kt.get<std::string>();
        const auto& verts = j.at("vertices");
        if (!verts.is_array()) throw DataError(where + ": vertices must be an array");
        for (const auto& v : verts) {
            if (!v.is_array() || v.size() != 3) {
                throw DataError(where + ": each vertex must be [x,y,z]");
            }
            k.vertices.push_back(
                {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
        }
        const auto declared = j.at("length").get<std::uint64_t>();
        if (declared != k.vertices.size()) {
            throw DataError(where + ": length field " + std::to_string(declared) +
                            " does not match " + std::to_string(k.vertices.size()) +
                            " vertices");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
    return k;
}

inline std::vector<KnotEmbedding> read_knots_jsonl(const std::string& path) {
    auto f = detail::open_in(path);
    std::vector<KnotEmbedding> knots;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        knots.push_back(
            knot_from_json_line(line, path + ":" + std::to_string(lineno)));
    }
    return knots;
}

// Splits a CSV line and checks the column count; quoting is not supported
// because no produced field contains a comma.
inline std::vector<std::string> split_csv_line(const std::string& line,
                                               std::size_t n_cols,
                                               const std::string& where) {
    std::vector<std::string> cols;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cols.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cols.push_back(cur);
    if (cols.size() != n_cols) {
        throw DataError(where + ": expected " + std::to_string(n_cols) +
                        " columns, got " + std::to_string(cols.size()));
    }
    return cols;
}

// ---- barcodes.csv ----

struct BarcodeRecord {
    std::string knot_id;
    Barcode barcode;
};

inline void write_barcodes_csv(const std::string& path,
                               const std::vector<BarcodeRecord>& records) {
    auto f = detail::open_out(path);
    f << "knot_id,dim,birth,death\n";
    for (const auto& rec : records) {
        for (const Bar& b : rec.barcode.dim0) {
            f << rec.knot_id << ",0," << fmt_double(b.birth) << ","
              << fmt_double(b.death) << "\n";
        }
        for (const Bar& b : rec.barcode.dim1) {
            f << rec.knot_id << ",1," << fmt_double(b.birth) << ","
              << fmt_double(b.death) << "\n";
        }
    }
}

inline std::vector<BarcodeRecord> read_barcodes_csv(const std::string& path) {
    auto f = detail::open_in(path);
    std::vector<BarcodeRecord> records;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(f, line)) throw DataError(path + ": empty file");
    ++lineno;
    if (line != "knot_id,dim,birth,death") {
        throw DataError(path + ":1: unexpected header '" + line + "'");
    }
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto cols = split_csv_line(line, 4, where);
        if (records.empty() || records.back().knot_id != cols[0]) {
            records.push_back({cols[0], {}});
        }
        Bar b{parse_double(cols[2], where), parse_double(cols[3], where)};
        const std::uint64_t dim = parse_u64(cols[1], where);
        if (dim == 0) records.back().barcode.dim0.push_back(b);
        else if (dim == 1) records.back().barcode.dim1.push_back(b);
        else throw DataError(where + ": dimension must be 0 or 1");
    }
    return records;
}

// ---- geometry.csv ----

struct GeometryRow {
    std::string id;
    std::uint64_t length = 0;
    std::string knot_type = "unknown";
    double rs_volume = 0, hull_volume = 0, rg = 0, curvature = 0, torsion = 0,
           acn = 0;
};

inline void write_geometry_csv(const std::string& path,
                               const std::vector<GeometryRow>& rows) {
    auto f = detail::open_out(path);
    f << "id,length,knot_type,rs_volume,hull_volume,rg,curvature,torsion,acn\n";
    for (const auto& r : rows) {
        f << r.id << "," << r.length << "," << r.knot_type << ","
          << fmt_double(r.rs_volume) << "," << fmt_double(r.hull_volume) << ","
          << fmt_double(r.rg) << "," << fmt_double(r.curvature) << ","
          << fmt_double(r.torsion) << "," << fmt_double(r.acn) << "\n";
    }
}

inline std::vector<GeometryRow> read_geometry_csv(const std::string& path) {
    auto f = detail::open_in(path);
    std::vector<GeometryRow> rows;
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(f, line) ||
        line != "id,length,knot_type,rs_volume,hull_volume,rg,curvature,torsion,acn") {
        throw DataError(path + ":1: unexpected header");
    }
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto c = split_csv_line(line, 9, where);
        GeometryRow r;
        r.id = c[0];
        r.length = parse_u64(c[1], where);
        r.knot_type = c[2];
        r.rs_volume = parse_double(c[3], where);
        r.hull_volume = parse_double(c[4], where);
        r.rg = parse_double(c[5], where);
        r.curvature = parse_double(c[6], where);
        r.torsion = parse_double(c[7], where);
        r.acn = parse_double(c[8], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---- features.csv ----

struct FeatureRow {
    std::string id;
    std::uint64_t length = 0;
    std::string knot_type = "unknown";
    double integral_I = 0;
    std::uint64_t n_bars = 0;
    double max_bar = 0;
    double delta_eps = 0;
    bool spike_filtered = false;
};

inline void write_features_csv(const std::string& path,
                               const std::vector<FeatureRow>& rows) {
    auto f = detail::open_out(path);
    f << "id,length,knot_type,integral_I,n_bars,max_bar,delta_eps,spike_filtered\n";
    for (const auto& r : rows) {
        f << r.id << "," << r.length << "," << r.knot_type << ","
          << fmt_double(r.integral_I) << "," << r.n_bars << ","
          << fmt_double(r.max_bar) << "," << fmt_double(r.delta_eps) << ","
          << (r.spike_filtered ? "true" : "false") << "\n";
    }
}

inline std::vector<FeatureRow> read_features_csv(const std::string& path) {
    auto f = detail::open_in(path);
    std::vector<FeatureRow> rows;
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(f, line) ||
        line != "id,length,knot_type,integral_I,n_bars,max_bar,delta_eps,spike_filtered") {
        throw DataError(path + ":1: unexpected header");
    }
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto c = split_csv_line(line, 8, where);
        FeatureRow r;
        r.id = c[0];
        r.length = parse_u64(c[1], where);
        r.knot_type = c[2];
        r.integral_I = parse_double(c[3], where);
        r.n_bars = parse_u64(c[4], where);
        r.max_bar = parse_double(c[5], where);
        r.delta_eps = parse_double(c[6], where);
        if (c[7] == "true") r.spike_filtered = true;
        else if (c[7] == "false") r.spike_filtered = false;
        else throw DataError(where + ": spike_filtered must be true or false");
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---- correlations.csv / averages.csv ----

struct CorrelationRow {
    std::uint64_t length = 0;
    std::string group_label;
    std::string x_name, y_name;
    double pearson_r = 0;
    std::uint64_t n = 0;
};

inline void write_correlations_csv(const std::string& path,
                                   const std::vector<CorrelationRow>& rows) {
    auto f = detail::open_out(path);
    f << "length,group_label,x_name,y_name,pearson_r,n\n";
    for (const auto& r : rows) {
        f << r.length << "," << r.group_label << "," << r.x_name << ","
          << r.y_name << "," << fmt_double(r.pearson_r) << "," << r.n << "\n";
    }
}

inline std::vector<CorrelationRow> read_correlations_csv(const std::string& path) {
    auto f = detail::open_in(path);
    std::vector<CorrelationRow> rows;
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(f, line) || line != "length,group_label,x_name,y_name,pearson_r,n") {
        throw DataError(path + ":1: unexpected header");
    }
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto c = split_csv_line(line, 6, where);
        rows.push_back({parse_u64(c[0], where), c[1], c[2], c[3],
                        parse_double(c[4], where), parse_u64(c[5], where)});
    }
    return rows;
}

struct AverageRow {
    std::string knot_type;
    std::uint64_t length = 0;
    double mean = 0;
    double stderr_ = 0;
};

inline void write_averages_csv(const std::string& path,
                               const std::vector<AverageRow>& rows) {
    auto f = detail::open_out(path);
    f << "knot_type,length,mean,stderr\n";
    for (const auto& r : rows) {
        f << r.knot_type << "," << r.length << "," << fmt_double(r.mean) << ","
          << fmt_double(r.stderr_) << "\n";
    }
}

// ---- curve breakpoints ----

inline void write_curve_csv(const std::string& path,
                            const std::vector<std::pair<double, double>>& steps) {
    auto f = detail::open_out(path);
    f << "t,value\n";
    for (const auto& [t, v] : steps) {
        f << fmt_double(t) << "," << fmt_double(v) << "\n";
    }
}

// ---- hashing ----

inline std::uint64_t fnv1a64(const char* data, std::size_t size) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string file_hash(const std::string& path) {
    auto f = detail::open_in(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016" PRIx64,
                  fnv1a64(bytes.data(), bytes.size()));
    return buf;
}

}  // namespace knotscope
