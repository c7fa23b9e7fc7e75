#pragma once

// Knot type identification. An embedding is projected along random directions
// to a crossing diagram; the diagram is shrunk by Reidemeister I/II moves on
// its Gauss code; the Alexander polynomial evaluated at t=-1 and t=3 is then
// matched against a table for knots up to six crossings. Several projections
// vote to protect against the rare degenerate-but-accepted projection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "common.hpp"
#include "knot.hpp"
#include "rng.hpp"
#include "vec3.hpp"

namespace knotscope {

using bigint = boost::multiprecision::cpp_int;

enum class KnotType {
    unknot,
    trefoil,
    figure_eight,
    cinquefoil,
    three_twist,
    stevedore,
    k6_2,
    k6_3,
    unknown,
};

inline std::string to_string(KnotType t) {
    switch (t) {
        case KnotType::unknot: return "0_1";
        case KnotType::trefoil: return "3_1";
        case KnotType::figure_eight: return "4_1";
        case KnotType::cinquefoil: return "5_1";
        case KnotType::three_twist: return "5_2";
        case KnotType::stevedore: return "6_1";
        case KnotType::k6_2: return "6_2";
        case KnotType::k6_3: return "6_3";
        case KnotType::unknown: return "unknown";
    }
    return "unknown";
}

inline KnotType knot_type_from_string(const std::string& s) {
    if (s == "0_1") return KnotType::unknot;
    if (s == "3_1") return KnotType::trefoil;
    if (s == "4_1") return KnotType::figure_eight;
    if (s == "5_1") return KnotType::cinquefoil;
    if (s == "5_2") return KnotType::three_twist;
    if (s == "6_1") return KnotType::stevedore;
    if (s == "6_2") return KnotType::k6_2;
    if (s == "6_3") return KnotType::k6_3;
    if (s == "unknown") return KnotType::unknown;
    throw DataError("unknown knot type name '" + s + "'");
}

struct GaussEntry {
    std::uint32_t crossing;
    bool over;
};

// Knot shadow with over/under data: the Gauss sequence visits each crossing
// exactly twice, once over and once under; signs[c] is the crossing sign.
struct Diagram {
    std::vector<GaussEntry> gauss;
    std::vector<std::int8_t> signs;

    std::size_t n_crossings() const { return signs.size(); }
};

namespace detail {

inline double cross2(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

}  // namespace detail

// Projects the polygon along `direction` and reads off the crossing diagram.
// Throws NonGenericProjection when the view is degenerate: an edge parallel
// to the direction, a crossing within 1e-9 of a vertex, two crossings within
// 1e-9 on one edge, or two edges within 1e-9 of each other in depth.
inline Diagram project(const KnotEmbedding& k, const Vec3& direction) {
    require_valid(k);
    const double dn = norm(direction);
    if (dn <= kGeomTol) throw DataError("projection direction must be nonzero");
    const Vec3 w = direction / dn;
    const auto [u, v] = orthonormal_basis(w);

    const std::size_t n = k.vertices.size();
    std::vector<double> px(n), py(n), pd(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = dot(k.vertices[i], u);
        py[i] = dot(k.vertices[i], v);
        pd[i] = dot(k.vertices[i], w);
    }
    auto ex = [&](std::size_t i) { return px[(i + 1) % n] - px[i]; };
    auto ey = [&](std::size_t i) { return py[(i + 1) % n] - py[i]; };

    for (std::size_t i = 0; i < n; ++i) {
        if (std::hypot(ex(i), ey(i)) <= kGeomTol) {
            throw NonGenericProjection("edge " + std::to_string(i) +
                                       " is parallel to the view direction");
        }
    }

    struct Hit {
        std::size_t under_edge, over_edge;
        double t_under, t_over;
        std::int8_t sign;
    };
    std::vector<Hit> hits;
    std::vector<std::vector<std::pair<double, std::uint32_t>>> per_edge(n);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            const double rx = ex(i), ry = ey(i);
            const double sx = ex(j), sy = ey(j);
            const double den = detail::cross2(rx, ry, sx, sy);
            const double qx = px[j] - px[i], qy = py[j] - py[i];
            if (std::fabs(den) <= 1e-12 * std::hypot(rx, ry) * std::hypot(sx, sy)) {
                // parallel in projection: reject only if they overlap
                const double off = detail::cross2(qx, qy, rx, ry);
                if (std::fabs(off) <= 1e-9 * std::hypot(rx, ry)) {
                    const double r2 = rx * rx + ry * ry;
                    const double t0 = (qx * rx + qy * ry) / r2;
                    const double t1 = t0 + (sx * rx + sy * ry) / r2;
                    if (std::max(std::min(t0, t1), 0.0) <= std::min(std::max(t0, t1), 1.0)) {
                        throw NonGenericProjection("edges " + std::to_string(i) + " and " +
                                                   std::to_string(j) +
                                                   " overlap in projection");
                    }
                }
                continue;
            }
            const double t = detail::cross2(qx, qy, sx, sy) / den;
            const double s = detail::cross2(qx, qy, rx, ry) / den;
            const bool near_t = std::fabs(t) < 1e-9 || std::fabs(t - 1.0) < 1e-9;
            const bool near_s = std::fabs(s) < 1e-9 || std::fabs(s - 1.0) < 1e-9;
            if (t > -1e-9 && t < 1.0 + 1e-9 && s > -1e-9 && s < 1.0 + 1e-9 &&
                (near_t || near_s)) {
                throw NonGenericProjection("edges " + std::to_string(i) + " and " +
                                           std::to_string(j) + " cross at a vertex");
            }
            if (t <= 0.0 || t >= 1.0 || s <= 0.0 || s >= 1.0) continue;
            const double di = pd[i] + t * (pd[(i + 1) % n] - pd[i]);
            const double dj = pd[j] + s * (pd[(j + 1) % n] - pd[j]);
            if (std::fabs(di - dj) < 1e-9) {
                throw NonGenericProjection("edges " + std::to_string(i) + " and " +
                                           std::to_string(j) +
                                           " are not separated in depth");
            }
            Hit h;
            if (di > dj) {
                h.over_edge = i; h.t_over = t;
                h.under_edge = j; h.t_under = s;
            } else {
                h.over_edge = j; h.t_over = s;
                h.under_edge = i; h.t_under = t;
            }
            const double ox = ex(h.over_edge), oy = ey(h.over_edge);
            const double ux2 = ex(h.under_edge), uy2 = ey(h.under_edge);
            h.sign = detail::cross2(ox, oy, ux2, uy2) > 0.0 ? 1 : -1;
            const auto id = static_cast<std::uint32_t>(hits.size());
            hits.push_back(h);
            per_edge[i].push_back({t, id});
            per_edge[j].push_back({s, id});
        }
    }

    Diagram d;
    d.signs.reserve(hits.size());
    for (const Hit& h : hits) d.signs.push_back(h.sign);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = per_edge[i];
        std::sort(row.begin(), row.end());
        for (std::size_t q = 0; q + 1 < row.size(); ++q) {
            if (row[q + 1].first - row[q].first < 1e-9) {
                throw NonGenericProjection("two crossings coincide on edge " +
                                           std::to_string(i));
            }
        }
        for (const auto& [t, id] : row) {
            d.gauss.push_back({id, hits[id].over_edge == i});
        }
    }
    return d;
}

namespace detail {

inline void remove_crossings(Diagram& d, std::uint32_t c1, std::uint32_t c2,
                             bool pair) {
    std::vector<GaussEntry> next;
    next.reserve(d.gauss.size());
    for (const GaussEntry& g : d.gauss) {
        if (g.crossing == c1 || (pair && g.crossing == c2)) continue;
        next.push_back(g);
    }
    std::vector<std::int8_t> signs;
    std::vector<std::uint32_t> remap(d.signs.size());
    for (std::uint32_t c = 0; c < d.signs.size(); ++c) {
        if (c == c1 || (pair && c == c2)) continue;
        remap[c] = static_cast<std::uint32_t>(signs.size());
        signs.push_back(d.signs[c]);
    }
    for (GaussEntry& g : next) g.crossing = remap[g.crossing];
    d.gauss = std::move(next);
    d.signs = std::move(signs);
}

}  // namespace detail

// Repeatedly applies Reidemeister I (a crossing visited twice in a row) and
// Reidemeister II (two crossings adjacent on both strands, passing fully over
// on one and fully under on the other, with opposite signs). Adjacency in the
// Gauss sequence means the eliminated loop or bigon has empty arcs, so each
// move preserves the knot type.
inline Diagram simplify(Diagram d) {
    bool changed = true;
    while (changed && d.n_crossings() > 0) {
        changed = false;
        const std::size_t m = d.gauss.size();
        for (std::size_t p = 0; p < m; ++p) {
            const GaussEntry& a = d.gauss[p];
            const GaussEntry& b = d.gauss[(p + 1) % m];
            if (a.crossing == b.crossing) {
                detail::remove_crossings(d, a.crossing, 0, false);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        for (std::size_t p = 0; p < m && !changed; ++p) {
            const GaussEntry& a = d.gauss[p];
            const GaussEntry& b = d.gauss[(p + 1) % m];
            if (a.crossing == b.crossing) continue;
            if (!a.over || !b.over) continue;
            if (d.signs[a.crossing] == d.signs[b.crossing]) continue;
            for (std::size_t q = 0; q < m; ++q) {
                const GaussEntry& c = d.gauss[q];
                const GaussEntry& e = d.gauss[(q + 1) % m];
                if (c.over || e.over) continue;
                if (!((c.crossing == a.crossing && e.crossing == b.crossing) ||
                      (c.crossing == b.crossing && e.crossing == a.crossing))) {
                    continue;
                }
                detail::remove_crossings(d, a.crossing, b.crossing, true);
                changed = true;
                break;
            }
        }
    }
    return d;
}

// Alexander polynomial magnitudes |D(-1)| and |D(3)| (the latter with all
// factors of 3 removed, since the polynomial is only defined up to ±t^k).
struct Fingerprint {
    bigint det = 0;
    bigint a3 = 0;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

namespace detail {

// Fraction-free Gaussian elimination; exact over the integers.
inline bigint bareiss_det(std::vector<std::vector<bigint>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    bigint prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && m[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

// Alexander matrix minor evaluated at integer t: one Wirtinger row per
// crossing (over arc 1-t, incoming t, outgoing -1 for positive crossings;
// over t-1, incoming 1, outgoing -t for negative), first row and column
// dropped.
inline bigint alexander_at(const Diagram& d, long t) {
    const std::size_t n = d.n_crossings();
    if (n == 0) return 1;
    const std::size_t m = d.gauss.size();
    std::vector<std::size_t> under_pos;
    under_pos.reserve(n);
    for (std::size_t p = 0; p < m; ++p) {
        if (!d.gauss[p].over) under_pos.push_back(p);
    }
    if (under_pos.size() != n) throw DataError("malformed diagram");
    auto arc_at = [&](std::size_t pos) {
        // arcs run between consecutive under-passes; arc k covers positions
        // (under_pos[k], under_pos[k+1]]
        const std::size_t before = static_cast<std::size_t>(
            std::lower_bound(under_pos.begin(), under_pos.end(), pos) -
            under_pos.begin());
        return (before + n - 1) % n;
    };
    std::vector<std::size_t> over_pos(n), under_of(n);
    for (std::size_t p = 0; p < m; ++p) {
        const GaussEntry& g = d.gauss[p];
        if (g.over) over_pos[g.crossing] = p;
        else under_of[g.crossing] = p;
    }
    std::vector<std::vector<bigint>> mat(n, std::vector<bigint>(n, 0));
    for (std::uint32_t c = 0; c < n; ++c) {
        const std::size_t up = under_of[c];
        const std::size_t k = static_cast<std::size_t>(
            std::lower_bound(under_pos.begin(), under_pos.end(), up) -
            under_pos.begin());
        const std::size_t in_arc = (k + n - 1) % n;
        const std::size_t out_arc = k;
        const std::size_t over_arc = arc_at(over_pos[c]);
        if (d.signs[c] > 0) {
            mat[c][over_arc] += 1 - t;
            mat[c][in_arc] += t;
            mat[c][out_arc] += -1;
        } else {
            mat[c][over_arc] += t - 1;
            mat[c][in_arc] += 1;
            mat[c][out_arc] += -t;
        }
    }
    std::vector<std::vector<bigint>> minor(n - 1, std::vector<bigint>(n - 1));
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) minor[i - 1][j - 1] = mat[i][j];
    }
    return bareiss_det(std::move(minor));
}

}  // namespace detail

inline Fingerprint alexander_fingerprint(const Diagram& d) {
    Fingerprint fp;
    fp.det = detail::alexander_at(d, -1);
    if (fp.det < 0) fp.det = -fp.det;
    fp.a3 = detail::alexander_at(d, 3);
    if (fp.a3 < 0) fp.a3 = -fp.a3;
    while (fp.a3 != 0 && fp.a3 % 3 == 0) fp.a3 /= 3;
    return fp;
}

inline KnotType fingerprint_lookup(const Fingerprint& fp) {
    static const std::map<std::pair<long, long>, KnotType> table{
        {{1, 1}, KnotType::unknot},        {{3, 7}, KnotType::trefoil},
        {{5, 1}, KnotType::figure_eight},  {{5, 61}, KnotType::cinquefoil},
        {{7, 11}, KnotType::three_twist},  {{9, 5}, KnotType::stevedore},
        {{11, 19}, KnotType::k6_2},        {{13, 37}, KnotType::k6_3},
    };
    for (const auto& [key, type] : table) {
        if (fp.det == key.first && fp.a3 == key.second) return type;
    }
    return KnotType::unknown;
}

// Classifies by majority over several projections, drawing directions from
// the seed. Non-generic directions are redrawn, up to 20 extra attempts.
inline KnotType classify(const KnotEmbedding& k, int n_projections = 3,
                         std::uint64_t seed = 0) {
    if (n_projections < 1) throw ValidationError("need at least one projection");
    Rng rng(mix_seed(seed, 0x70726f6aULL));
    std::vector<KnotType> votes;
    int failures = 0;
    while (votes.size() < static_cast<std::size_t>(n_projections)) {
        const Vec3 dir = rng.unit_vector();
        Diagram d;
        try {
            d = project(k, dir);
        } catch (const NonGenericProjection&) {
            if (++failures > 20) {
                throw DataError("no generic projection found for '" + k.id + "'");
            }
            continue;
        }
        votes.push_back(fingerprint_lookup(alexander_fingerprint(simplify(std::move(d)))));
    }
    std::map<KnotType, int> counts;
    for (KnotType t : votes) ++counts[t];
    KnotType best = KnotType::unknown;
    int best_count = 0;
    bool tie = false;
    for (const auto& [t, c] : counts) {
        if (c > best_count) {
            best = t;
            best_count = c;
            tie = false;
        } else if (c == best_count) {
            tie = true;
        }
    }
    return tie ? KnotType::unknown : best;
}

}  // namespace knotscope
