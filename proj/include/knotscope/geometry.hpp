#pragma once

// Scalar geometry of closed polygons: minimum enclosing sphere, convex hull
// volume, radius of gyration, total curvature and torsion, and the average
// crossing number computed from exact solid angles rather than sampled
// projections.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "knot.hpp"
#include "rng.hpp"
#include "vec3.hpp"

namespace knotscope {

struct Sphere {
    Vec3 center;
    double radius = -1.0;  // negative: contains nothing
};

namespace detail {

inline bool sphere_contains(const Sphere& s, const Vec3& p) {
    if (s.radius < 0.0) return false;
    const double r2 = s.radius * s.radius;
    return dist2(p, s.center) <= r2 * (1.0 + 1e-10) + 1e-24;
}

inline Sphere ball2(const Vec3& a, const Vec3& b) {
    Sphere s;
    s.center = (a + b) * 0.5;
    s.radius = 0.5 * dist(a, b);
    return s;
}

inline Sphere smallest_containing(std::span<const Vec3> pts);

inline Sphere ball3(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = b - a, v = c - a;
    const double uu = norm2(u), vv = norm2(v), uv = dot(u, v);
    const double det = uu * vv - uv * uv;  // |u x v|^2
    if (det <= 1e-14 * uu * vv) {
        // collinear: smallest pair ball covering the third point
        const std::array<Vec3, 3> p{a, b, c};
        return smallest_containing(std::span<const Vec3>(p.data(), 3));
    }
    const double alpha = vv * (uu - uv) / (2.0 * det);
    const double beta = uu * (vv - uv) / (2.0 * det);
    Sphere s;
    s.center = a + u * alpha + v * beta;
    s.radius = dist(s.center, a);
    return s;
}

inline Sphere ball4(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 r1 = b - a, r2 = c - a, r3 = d - a;
    const double det = dot(r1, cross(r2, r3));
    const double scale = norm(r1) * norm(r2) * norm(r3);
    if (std::fabs(det) <= 1e-12 * std::max(scale, 1e-300)) {
        const std::array<Vec3, 4> p{a, b, c, d};
        return smallest_containing(std::span<const Vec3>(p.data(), 4));
    }
    const Vec3 rhs{0.5 * norm2(r1), 0.5 * norm2(r2), 0.5 * norm2(r3)};
    const Vec3 y = (cross(r2, r3) * rhs.x + cross(r3, r1) * rhs.y + cross(r1, r2) * rhs.z) / det;
    Sphere s;
    s.center = a + y;
    s.radius = norm(y);
    return s;
}

inline Sphere ball_from_support(const std::array<Vec3, 4>& r, int nr) {
    switch (nr) {
        case 0: return {};
        case 1: return {r[0], 0.0};
        case 2: return ball2(r[0], r[1]);
        case 3: return ball3(r[0], r[1], r[2]);
        default: return ball4(r[0], r[1], r[2], r[3]);
    }
}

// Exhaustive smallest enclosing ball over support subsets; used only for the
// degenerate fallbacks above, so sizes are at most 4.
inline Sphere smallest_containing(std::span<const Vec3> pts) {
    const std::size_t n = pts.size();
    Sphere best;
    auto consider = [&](const Sphere& s) {
        if (s.radius < 0.0) return;
        for (const Vec3& p : pts) {
            if (!sphere_contains(s, p)) return;
        }
        if (best.radius < 0.0 || s.radius < best.radius) best = s;
    };
    for (std::size_t i = 0; i < n; ++i) {
        consider({pts[i], 0.0});
        for (std::size_t j = i + 1; j < n; ++j) {
            consider(ball2(pts[i], pts[j]));
            for (std::size_t k = j + 1; k < n; ++k) {
                const Vec3 u = pts[j] - pts[i], v = pts[k] - pts[i];
                const double uu = norm2(u), vv = norm2(v), uv = dot(u, v);
                if (uu * vv - uv * uv <= 1e-14 * uu * vv) continue;
                consider(ball3(pts[i], pts[j], pts[k]));
            }
        }
    }
    return best;
}

inline Sphere welzl(std::vector<const Vec3*>& pts, std::size_t n,
                    std::array<Vec3, 4>& support, int nsup) {
    if (n == 0 || nsup == 4) return ball_from_support(support, nsup);
    Sphere s = welzl(pts, n - 1, support, nsup);
    const Vec3* p = pts[n - 1];
    if (sphere_contains(s, *p)) return s;
    support[nsup] = *p;
    s = welzl(pts, n - 1, support, nsup + 1);
    // move-to-front keeps points that defined recent balls near the start
    std::rotate(pts.begin(), pts.begin() + (n - 1), pts.begin() + n);
    return s;
}

}  // namespace detail

inline Sphere min_enclosing_sphere(std::span<const Vec3> pts) {
    if (pts.empty()) throw DataError("min_enclosing_sphere of empty point set");
    std::vector<const Vec3*> ptrs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) ptrs[i] = &pts[i];
    // fixed-seed shuffle so structured inputs cannot trigger the recursive
    // worst case, while keeping results reproducible
    Rng rng(0x57ee1b0a11ULL ^ pts.size());
    for (std::size_t i = pts.size(); i > 1; --i) {
        std::swap(ptrs[i - 1], ptrs[rng.below(i)]);
    }
    std::array<Vec3, 4> support;
    return detail::welzl(ptrs, ptrs.size(), support, 0);
}

// Volume of the convex hull, 0 when the points are affinely degenerate.
// Incremental insertion of the farthest outside point, tracking for every
// face all outside points that see it so none can be stranded by a deleted
// face.
inline double convex_hull_volume(std::span<const Vec3> pts) {
    const std::size_t n = pts.size();
    if (n < 4) return 0.0;

    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const double diag = dist(lo, hi);
    if (diag <= 0.0) return 0.0;
    const double eps = 1e-9 * diag;

    // initial simplex: farthest point pair along x, then max area, max volume
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (pts[i].x < pts[i0].x) i0 = i;
    }
    std::size_t i1 = i0;
    double bd = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = dist2(pts[i], pts[i0]);
        if (d > bd) { bd = d; i1 = i; }
    }
    if (std::sqrt(bd) <= eps) return 0.0;
    const Vec3 axis = pts[i1] - pts[i0];
    std::size_t i2 = i0;
    bd = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = norm2(cross(pts[i] - pts[i0], axis));
        if (d > bd) { bd = d; i2 = i; }
    }
    const Vec3 nrm0 = cross(pts[i1] - pts[i0], pts[i2] - pts[i0]);
    if (norm(nrm0) <= eps * norm(axis)) return 0.0;  // all collinear
    std::size_t i3 = i0;
    bd = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(dot(pts[i] - pts[i0], nrm0));
        if (d > bd) { bd = d; i3 = i; }
    }
    if (bd / norm(nrm0) <= eps) return 0.0;  // all coplanar

    struct Face {
        std::uint32_t a, b, c;
        Vec3 normal;  // unit, outward
        double offset = 0.0;
        bool alive = true;
        std::vector<std::uint32_t> outside;
    };
    std::vector<Face> faces;
    const Vec3 inner = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) * 0.25;

    // orient=true flips the winding to face away from the interior point;
    // cone faces built on horizon edges inherit a correct winding and must
    // not be flipped, or their edges would collide with the kept neighbor's.
    auto make_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, bool orient) {
        Face f;
        f.a = a; f.b = b; f.c = c;
        Vec3 nrm = cross(pts[b] - pts[a], pts[c] - pts[a]);
        const double len = norm(nrm);
        if (len > 0.0) nrm /= len;
        if (orient && dot(nrm, inner - pts[a]) > 0.0) {
            std::swap(f.b, f.c);
            nrm = -nrm;
        }
        f.normal = nrm;
        f.offset = dot(nrm, pts[a]);
        faces.push_back(std::move(f));
        return static_cast<std::uint32_t>(faces.size() - 1);
    };
    auto signed_dist = [&](const Face& f, const Vec3& p) {
        return dot(f.normal, p) - f.offset;
    };

    const std::uint32_t v0 = static_cast<std::uint32_t>(i0),
                        v1 = static_cast<std::uint32_t>(i1),
                        v2 = static_cast<std::uint32_t>(i2),
                        v3 = static_cast<std::uint32_t>(i3);
    make_face(v0, v1, v2, true);
    make_face(v0, v1, v3, true);
    make_face(v0, v2, v3, true);
    make_face(v1, v2, v3, true);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (i == v0 || i == v1 || i == v2 || i == v3) continue;
        for (std::uint32_t fi = 0; fi < 4; ++fi) {
            if (signed_dist(faces[fi], pts[i]) > eps) faces[fi].outside.push_back(i);
        }
    }

    auto edge_key = [](std::uint32_t u, std::uint32_t v) {
        return (static_cast<std::uint64_t>(u) << 32) | v;
    };
    std::unordered_map<std::uint64_t, std::uint32_t> edge_face;
    auto register_face = [&](std::uint32_t fi) {
        const Face& f = faces[fi];
        edge_face[edge_key(f.a, f.b)] = fi;
        edge_face[edge_key(f.b, f.c)] = fi;
        edge_face[edge_key(f.c, f.a)] = fi;
    };
    for (std::uint32_t fi = 0; fi < 4; ++fi) register_face(fi);

    std::vector<std::uint32_t> pending;
    for (std::uint32_t fi = 0; fi < 4; ++fi) {
        if (!faces[fi].outside.empty()) pending.push_back(fi);
    }

    std::vector<std::uint32_t> visible, stack;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;
    std::vector<std::uint8_t> seen;
    while (!pending.empty()) {
        const std::uint32_t fi = pending.back();
        pending.pop_back();
        if (!faces[fi].alive || faces[fi].outside.empty()) continue;

        std::uint32_t apex = faces[fi].outside.front();
        double far = signed_dist(faces[fi], pts[apex]);
        for (std::uint32_t q : faces[fi].outside) {
            const double d = signed_dist(faces[fi], pts[q]);
            if (d > far) { far = d; apex = q; }
        }
        const Vec3& p = pts[apex];

        visible.clear();
        horizon.clear();
        stack.assign(1, fi);
        seen.assign(faces.size(), 0);
        seen[fi] = 1;
        while (!stack.empty()) {
            const std::uint32_t cur = stack.back();
            stack.pop_back();
            visible.push_back(cur);
            const Face& f = faces[cur];
            const std::array<std::pair<std::uint32_t, std::uint32_t>, 3> es{
                std::pair{f.a, f.b}, std::pair{f.b, f.c}, std::pair{f.c, f.a}};
            for (const auto& [u, v] : es) {
                const auto it = edge_face.find(edge_key(v, u));
                if (it == edge_face.end()) continue;
                const std::uint32_t nb = it->second;
                if (seen[nb]) continue;
                if (signed_dist(faces[nb], p) > eps) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                } else {
                    horizon.push_back({u, v});
                }
            }
        }

        std::vector<std::uint32_t> orphans;
        for (std::uint32_t vf : visible) {
            Face& f = faces[vf];
            f.alive = false;
            edge_face.erase(edge_key(f.a, f.b));
            edge_face.erase(edge_key(f.b, f.c));
            edge_face.erase(edge_key(f.c, f.a));
            for (std::uint32_t q : f.outside) {
                if (q != apex) orphans.push_back(q);
            }
            f.outside.clear();
            f.outside.shrink_to_fit();
        }
        std::sort(orphans.begin(), orphans.end());
        orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());

        for (const auto& [u, v] : horizon) {
            const std::uint32_t nf = make_face(u, v, apex, false);
            register_face(nf);
            for (std::uint32_t q : orphans) {
                if (signed_dist(faces[nf], pts[q]) > eps) faces[nf].outside.push_back(q);
            }
            if (!faces[nf].outside.empty()) pending.push_back(nf);
        }
    }

    double vol6 = 0.0;
    for (const Face& f : faces) {
        if (!f.alive) continue;
        vol6 += dot(pts[f.a] - inner, cross(pts[f.b] - inner, pts[f.c] - inner));
    }
    return vol6 / 6.0;
}

inline double radius_of_gyration(std::span<const Vec3> pts) {
    if (pts.empty()) throw DataError("radius_of_gyration of empty point set");
    Vec3 mean{};
    for (const Vec3& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    double acc = 0.0;
    for (const Vec3& p : pts) acc += dist2(p, mean);
    return std::sqrt(acc / static_cast<double>(pts.size()));
}

// Sum of exterior angles at the vertices, in radians.
inline double total_curvature(const KnotEmbedding& k) {
    require_valid(k);
    const std::size_t n = k.vertices.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 u = k.vertices[i] - k.vertices[(i + n - 1) % n];
        const Vec3 w = k.vertices[(i + 1) % n] - k.vertices[i];
        total += std::atan2(norm(cross(u, w)), dot(u, w));
    }
    return total;
}

// Sum of the dihedral angle between consecutive osculating planes, taken as
// the angle between the planes themselves (not their oriented normals), so
// every planar polygon scores zero. Edges whose neighboring edges are
// collinear contribute zero.
inline double total_torsion(const KnotEmbedding& k) {
    require_valid(k);
    const std::size_t n = k.vertices.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 e0 = k.vertices[(i + 1) % n] - k.vertices[i];
        const Vec3 e1 = k.vertices[(i + 2) % n] - k.vertices[(i + 1) % n];
        const Vec3 e2 = k.vertices[(i + 3) % n] - k.vertices[(i + 2) % n];
        const Vec3 n1 = cross(e0, e1);
        const Vec3 n2 = cross(e1, e2);
        const double l1 = norm(n1), l2 = norm(n2);
        if (l1 <= kGeomTol || l2 <= kGeomTol) continue;
        const double s = dot(cross(n1, n2), e1) / norm(e1);
        total += std::atan2(std::fabs(s), std::fabs(dot(n1, n2)));
    }
    return total;
}

namespace detail {

inline double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1,
                               const Vec3& q2) {
    const Vec3 u = p2 - p1, v = q2 - q1, w = p1 - q1;
    const double a = norm2(u), b = dot(u, v), c = norm2(v);
    const double d = dot(u, w), e = dot(v, w);
    const double den = a * c - b * b;
    double s = den > 1e-18 ? std::clamp((b * e - c * d) / den, 0.0, 1.0) : 0.0;
    double t = c > 1e-18 ? std::clamp((b * s + e) / c, 0.0, 1.0) : 0.0;
    // re-clamp s for the chosen t
    s = a > 1e-18 ? std::clamp((b * t - d) / a, 0.0, 1.0) : 0.0;
    return dist(p1 + u * s, q1 + v * t);
}

inline double spherical_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = dot(a, cross(b, c));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

}  // namespace detail

// Solid angle swept by the chord directions between two segments: the area
// of the spherical quadrilateral of the four endpoint-to-endpoint
// directions. For straight segments the quad never folds over itself, so
// the magnitude of the oriented area is the geometric area. Throws if the
// segments touch.
inline double segment_pair_solid_angle(const Vec3& p1, const Vec3& p2,
                                       const Vec3& q1, const Vec3& q2) {
    if (detail::segment_distance(p1, p2, q1, q2) < 1e-9) {
        throw ValidationError("segments intersect; solid angle undefined");
    }
    const Vec3 u = p2 - p1, v = q2 - q1;
    const double coplanar = dot(q1 - p1, cross(u, v));
    const double scale = norm(u) * norm(v) * (norm(q1 - p1) + norm(q2 - p2));
    if (std::fabs(coplanar) <= 1e-12 * std::max(scale, 1e-300)) {
        // coplanar disjoint segments: the spherical quad degenerates to a
        // great-circle arc with zero area
        return 0.0;
    }
    const Vec3 a = normalized(q1 - p1);
    const Vec3 b = normalized(q2 - p1);
    const Vec3 c = normalized(q2 - p2);
    const Vec3 d = normalized(q1 - p2);
    return std::fabs(detail::spherical_triangle(a, b, c) +
                     detail::spherical_triangle(a, c, d));
}

// Average crossing number: expected crossings over all projection directions,
// computed exactly as (1/2pi) sum of solid angles over non-adjacent edge
// pairs.
inline double average_crossing_number(const KnotEmbedding& k) {
    require_valid(k);
    const std::size_t n = k.vertices.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent around the seam
            total += segment_pair_solid_angle(k.vertices[i],
                                              k.vertices[(i + 1) % n],
                                              k.vertices[j],
                                              k.vertices[(j + 1) % n]);
        }
    }
    return total / (2.0 * M_PI);
}

struct GeometryRecord {
    double rs_radius = 0.0;
    double rs_volume = 0.0;
    double hull_volume = 0.0;
    double rg = 0.0;
    double curvature = 0.0;
    double torsion = 0.0;
    double acn = 0.0;
};

inline GeometryRecord measure(const KnotEmbedding& k) {
    require_valid(k);
    GeometryRecord rec;
    const Sphere s = min_enclosing_sphere(k.vertices);
    rec.rs_radius = s.radius;
    rec.rs_volume = 4.0 / 3.0 * M_PI * s.radius * s.radius * s.radius;
    rec.hull_volume = convex_hull_volume(k.vertices);
    rec.rg = radius_of_gyration(k.vertices);
    rec.curvature = total_curvature(k);
    rec.torsion = total_torsion(k);
    rec.acn = average_crossing_number(k);
    return rec;
}

}  // namespace knotscope
