#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "vec3.hpp"

namespace knotscope {

// Closed equilateral polygon in R^3 with unit-length edges. Vertex i connects
// to vertex (i+1) mod n; the final edge closes the loop implicitly.
struct KnotEmbedding {
    std::string id;
    std::uint64_t seed = 0;
    std::optional<std::string> knot_type;
    std::vector<Vec3> vertices;
};

inline std::size_t knot_length(const KnotEmbedding& k) { return k.vertices.size(); }

// Returns one message per violated invariant; empty means valid.
inline std::vector<std::string> validate(const KnotEmbedding& k) {
    std::vector<std::string> problems;
    const std::size_t n = k.vertices.size();
    if (n < 3) {
        problems.push_back("embedding has " + std::to_string(n) +
                           " vertices, need at least 3");
        return problems;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = k.vertices[i];
        const Vec3& b = k.vertices[(i + 1) % n];
        const double len = dist(a, b);
        if (std::fabs(len - 1.0) > kGeomTol) {
            problems.push_back("edge " + std::to_string(i) + " has length " +
                               std::to_string(len) + ", expected 1 within 1e-9");
        }
        if (len <= kGeomTol) {
            problems.push_back("vertices " + std::to_string(i) + " and " +
                               std::to_string((i + 1) % n) + " coincide");
        }
    }
    return problems;
}

inline void require_valid(const KnotEmbedding& k) {
    auto problems = validate(k);
    if (!problems.empty()) {
        std::string msg = "invalid embedding";
        if (!k.id.empty()) msg += " '" + k.id + "'";
        msg += ": " + problems.front();
        if (problems.size() > 1) {
            msg += " (and " + std::to_string(problems.size() - 1) + " more)";
        }
        throw ValidationError(msg);
    }
}

// Finite sample of a knot: the polygon vertices plus equally spaced points
// along each edge.
struct PointCloud {
    std::string source_id;
    double spacing = 0.0;
    std::vector<Vec3> points;
};

// Subdivides every edge into points_per_edge pieces. Each vertex appears
// exactly once; with unit edges the sample spacing is 1/points_per_edge.
inline PointCloud interpolate(const KnotEmbedding& k, std::size_t points_per_edge = 10) {
    if (points_per_edge == 0) {
        throw ValidationError("points_per_edge must be positive");
    }
    require_valid(k);
    const std::size_t n = k.vertices.size();
    PointCloud cloud;
    cloud.source_id = k.id;
    cloud.spacing = 1.0 / static_cast<double>(points_per_edge);
    cloud.points.reserve(n * points_per_edge);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = k.vertices[i];
        const Vec3& b = k.vertices[(i + 1) % n];
        for (std::size_t s = 0; s < points_per_edge; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(points_per_edge);
            cloud.points.push_back(a + (b - a) * t);
        }
    }
    return cloud;
}

}  // namespace knotscope
