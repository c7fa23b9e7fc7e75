// Reference implementations used only by the tests. Everything in here is
// deliberately written the slow, obvious way so it can act as an independent
// check on the library: full boundary-matrix reduction instead of the tuned
// cohomology pass, exhaustive subset search instead of Welzl, facet
// enumeration instead of incremental hull, Monte Carlo instead of closed-form
// solid angles, and symbolic polynomials instead of two integer evaluations.
#ifndef KNOTSCOPE_TESTS_ORACLE_HPP
#define KNOTSCOPE_TESTS_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "knotscope/classify.hpp"
#include "knotscope/knot.hpp"
#include "knotscope/persistence.hpp"
#include "knotscope/vec3.hpp"

namespace oracle {

using knotscope::Bar;
using knotscope::Barcode;
using knotscope::DistanceMatrix;
using knotscope::KnotEmbedding;
using knotscope::Vec3;

// ---------------------------------------------------------------------------
// Persistent homology by textbook column reduction over Z/2.
//
// Builds every vertex, edge and triangle with diameter <= t_max, sorts them
// by (diameter, dimension, vertex tuple), and reduces the boundary matrix
// left to right. Quadratic-ish and memory hungry, so keep n small.

inline Barcode rips_reference(const DistanceMatrix& dm,
                              double t_max = std::numeric_limits<double>::infinity()) {
    const std::uint32_t n = static_cast<std::uint32_t>(dm.n);
    struct Simp {
        double diam;
        int dim;
        std::array<std::uint32_t, 3> v;  // unused slots zero
    };
    std::vector<Simp> simps;
    for (std::uint32_t i = 0; i < n; ++i) simps.push_back({0.0, 0, {i, 0, 0}});
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (dm(i, j) <= t_max) simps.push_back({dm(i, j), 1, {i, j, 0}});
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            for (std::uint32_t k = j + 1; k < n; ++k) {
                const double d = std::max({dm(i, j), dm(i, k), dm(j, k)});
                if (d <= t_max) simps.push_back({d, 2, {i, j, k}});
            }
        }
    }
    std::sort(simps.begin(), simps.end(), [](const Simp& a, const Simp& b) {
        if (a.diam != b.diam) return a.diam < b.diam;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.v < b.v;
    });

    // look up the filtration position of a vertex or edge
    std::vector<std::uint32_t> vert_pos(n);
    std::unordered_map<std::uint64_t, std::uint32_t> edge_pos;
    for (std::uint32_t p = 0; p < simps.size(); ++p) {
        if (simps[p].dim == 0) vert_pos[simps[p].v[0]] = p;
        if (simps[p].dim == 1) {
            edge_pos[(std::uint64_t(simps[p].v[0]) << 32) | simps[p].v[1]] = p;
        }
    }
    auto epos = [&](std::uint32_t a, std::uint32_t b) {
        return edge_pos.at((std::uint64_t(a) << 32) | b);
    };

    const std::size_t m = simps.size();
    std::vector<std::vector<std::uint32_t>> col(m);  // sorted row positions
    for (std::uint32_t p = 0; p < m; ++p) {
        const Simp& s = simps[p];
        if (s.dim == 1) {
            col[p] = {vert_pos[s.v[0]], vert_pos[s.v[1]]};
        } else if (s.dim == 2) {
            col[p] = {epos(s.v[0], s.v[1]), epos(s.v[0], s.v[2]),
                      epos(s.v[1], s.v[2])};
        }
        std::sort(col[p].begin(), col[p].end());
    }

    std::vector<std::int64_t> owner(m, -1);  // row -> column that owns it as pivot
    std::vector<std::uint32_t> scratch;
    for (std::uint32_t j = 0; j < m; ++j) {
        while (!col[j].empty() && owner[col[j].back()] >= 0) {
            const auto& other = col[static_cast<std::size_t>(owner[col[j].back()])];
            scratch.clear();
            std::set_symmetric_difference(col[j].begin(), col[j].end(),
                                          other.begin(), other.end(),
                                          std::back_inserter(scratch));
            col[j].swap(scratch);
        }
        if (!col[j].empty()) owner[col[j].back()] = j;
    }

    Barcode bc;
    std::vector<bool> paired_row(m, false);
    for (std::uint32_t j = 0; j < m; ++j) {
        if (col[j].empty()) continue;
        const std::uint32_t r = col[j].back();
        paired_row[r] = true;
        paired_row[j] = true;  // a death column never births anything
        const double birth = simps[r].diam;
        const double death = simps[j].diam;
        if (simps[r].dim == 0) {
            bc.dim0.push_back({birth, death});
        } else if (simps[r].dim == 1 && death > birth) {
            bc.dim1.push_back({birth, death});
        }
    }
    for (std::uint32_t j = 0; j < m; ++j) {
        if (paired_row[j] || !col[j].empty()) continue;
        if (simps[j].dim == 0) bc.dim0.push_back({0.0, std::numeric_limits<double>::infinity()});
        if (simps[j].dim == 1) bc.dim1.push_back({simps[j].diam, std::numeric_limits<double>::infinity()});
    }
    auto order = [](const Bar& a, const Bar& b) {
        return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
    };
    std::sort(bc.dim0.begin(), bc.dim0.end(), order);
    std::sort(bc.dim1.begin(), bc.dim1.end(), order);
    return bc;
}

// ---------------------------------------------------------------------------
// Monte Carlo crossing counts. Projects along random directions and counts
// proper segment intersections; the mean over directions estimates the
// average crossing number. Uses std::mt19937_64 on purpose, independent of
// the library generator.

namespace mc {

inline Vec3 random_direction(std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec3 d{g(gen), g(gen), g(gen)};
        const double nn = knotscope::norm(d);
        if (nn > 1e-6) return d / nn;
    }
}

inline bool segments_cross_2d(double ax, double ay, double bx, double by,
                              double cx, double cy, double dx, double dy) {
    auto orient = [](double px, double py, double qx, double qy, double rx,
                     double ry) {
        return (qx - px) * (ry - py) - (qy - py) * (rx - px);
    };
    const double d1 = orient(ax, ay, bx, by, cx, cy);
    const double d2 = orient(ax, ay, bx, by, dx, dy);
    const double d3 = orient(cx, cy, dx, dy, ax, ay);
    const double d4 = orient(cx, cy, dx, dy, bx, by);
    return d1 * d2 < 0.0 && d3 * d4 < 0.0;
}

inline std::size_t crossings_along(const std::vector<Vec3>& v, const Vec3& dir) {
    Vec3 ref = std::fabs(dir.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 u = knotscope::normalized(knotscope::cross(dir, ref));
    const Vec3 w = knotscope::cross(dir, u);
    const std::size_t n = v.size();
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = knotscope::dot(v[i], u);
        py[i] = knotscope::dot(v[i], w);
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i2 = (i + 1) % n;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            const std::size_t j2 = (j + 1) % n;
            if (segments_cross_2d(px[i], py[i], px[i2], py[i2], px[j], py[j],
                                  px[j2], py[j2]))
                ++count;
        }
    }
    return count;
}

}  // namespace mc

inline double acn_monte_carlo(const KnotEmbedding& k, std::size_t n_dirs,
                              std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    double total = 0.0;
    for (std::size_t s = 0; s < n_dirs; ++s) {
        total += static_cast<double>(mc::crossings_along(k.vertices, mc::random_direction(gen)));
    }
    return total / static_cast<double>(n_dirs);
}

// Per-edge dihedral sum computed from normalized plane normals and acos,
// folding antiparallel normals onto the same plane angle.
inline double total_torsion_reference(const KnotEmbedding& k) {
    const auto& v = k.vertices;
    const std::size_t n = v.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 a = v[(i + 1) % n] - v[i];
        const Vec3 b = v[(i + 2) % n] - v[(i + 1) % n];
        const Vec3 c = v[(i + 3) % n] - v[(i + 2) % n];
        const Vec3 n1 = knotscope::cross(a, b);
        const Vec3 n2 = knotscope::cross(b, c);
        if (knotscope::norm(n1) <= 1e-12 || knotscope::norm(n2) <= 1e-12) continue;
        const double cosang = std::fabs(knotscope::dot(knotscope::normalized(n1),
                                                       knotscope::normalized(n2)));
        total += std::acos(std::clamp(cosang, 0.0, 1.0));
    }
    return total;
}

// Fraction of directions in which one segment pair crosses, times 2*pi.
// Estimates the absolute solid angle the library computes in closed form.
inline double segment_pair_solid_angle_mc(const Vec3& p1, const Vec3& p2,
                                          const Vec3& q1, const Vec3& q2,
                                          std::size_t n_dirs, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n_dirs; ++s) {
        const Vec3 dir = mc::random_direction(gen);
        Vec3 ref = std::fabs(dir.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        const Vec3 u = knotscope::normalized(knotscope::cross(dir, ref));
        const Vec3 w = knotscope::cross(dir, u);
        auto X = [&](const Vec3& p) { return knotscope::dot(p, u); };
        auto Y = [&](const Vec3& p) { return knotscope::dot(p, w); };
        if (mc::segments_cross_2d(X(p1), Y(p1), X(p2), Y(p2), X(q1), Y(q1),
                                  X(q2), Y(q2)))
            ++hits;
    }
    return 2.0 * M_PI * static_cast<double>(hits) / static_cast<double>(n_dirs);
}

// ---------------------------------------------------------------------------
// Smallest enclosing sphere by trying every support subset of size <= 4.
// Each candidate sphere is solved with plain Gaussian elimination.

namespace lin {

inline std::optional<std::array<double, 3>> solve3(std::array<std::array<double, 3>, 3> a,
                                                   std::array<double, 3> b) {
    double scale = 0.0;
    for (const auto& row : a)
        for (double x : row) scale = std::max(scale, std::fabs(x));
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) <= 1e-12 * std::max(scale, 1.0)) return std::nullopt;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    return std::array<double, 3>{b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]};
}

}  // namespace lin

struct SphereRef {
    Vec3 center;
    double radius = -1.0;
};

inline double sphere_ref_slack(const SphereRef& s, std::span<const Vec3> pts) {
    double worst = 0.0;
    for (const Vec3& p : pts) worst = std::max(worst, knotscope::dist(p, s.center) - s.radius);
    return worst;
}

inline SphereRef min_sphere_reference(std::span<const Vec3> pts) {
    const std::size_t n = pts.size();
    if (n == 0) return {};
    auto row = [&](const Vec3& base, const Vec3& q) {
        return std::array<double, 3>{2.0 * (q.x - base.x), 2.0 * (q.y - base.y),
                                     2.0 * (q.z - base.z)};
    };
    auto rhs = [&](const Vec3& base, const Vec3& q) {
        return knotscope::norm2(q) - knotscope::norm2(base);
    };
    std::vector<SphereRef> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        candidates.push_back({pts[i], 0.0});
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 c = (pts[i] + pts[j]) * 0.5;
            candidates.push_back({c, knotscope::dist(c, pts[i])});
            for (std::size_t k = j + 1; k < n; ++k) {
                // circumcenter constrained to the triangle's plane
                const Vec3 nrm = knotscope::cross(pts[j] - pts[i], pts[k] - pts[i]);
                const auto sol = lin::solve3(
                    {row(pts[i], pts[j]), row(pts[i], pts[k]),
                     std::array<double, 3>{nrm.x, nrm.y, nrm.z}},
                    {rhs(pts[i], pts[j]), rhs(pts[i], pts[k]),
                     knotscope::dot(nrm, pts[i])});
                if (sol) {
                    const Vec3 c3{(*sol)[0], (*sol)[1], (*sol)[2]};
                    candidates.push_back({c3, knotscope::dist(c3, pts[i])});
                }
                for (std::size_t l = k + 1; l < n; ++l) {
                    const auto sol4 = lin::solve3(
                        {row(pts[i], pts[j]), row(pts[i], pts[k]), row(pts[i], pts[l])},
                        {rhs(pts[i], pts[j]), rhs(pts[i], pts[k]), rhs(pts[i], pts[l])});
                    if (sol4) {
                        const Vec3 c4{(*sol4)[0], (*sol4)[1], (*sol4)[2]};
                        candidates.push_back({c4, knotscope::dist(c4, pts[i])});
                    }
                }
            }
        }
    }
    SphereRef best;
    for (const SphereRef& s : candidates) {
        if (sphere_ref_slack(s, pts) > 1e-9) continue;
        if (best.radius < 0.0 || s.radius < best.radius) best = s;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Convex hull volume by brute-force facet enumeration. Assumes general
// position: every triple either has all remaining points strictly on one
// side or is not a facet. Do not feed it grids or boxes.

inline double hull_volume_reference(std::span<const Vec3> pts) {
    const std::size_t n = pts.size();
    double scale = 0.0;
    for (const Vec3& p : pts) scale = std::max(scale, knotscope::norm(p));
    const double eps = 1e-12 * std::max(scale, 1.0);
    double six_vol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Vec3 nrm = knotscope::cross(pts[j] - pts[i], pts[k] - pts[i]);
                if (knotscope::norm(nrm) <= eps) continue;
                bool any_pos = false, any_neg = false;
                for (std::size_t l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    const double side = knotscope::dot(nrm, pts[l] - pts[i]);
                    if (side > eps) any_pos = true;
                    if (side < -eps) any_neg = true;
                }
                if (any_pos && any_neg) continue;
                // orient the facet outward, then add its cone volume
                Vec3 a = pts[i], b = pts[j], c = pts[k];
                if (any_pos) std::swap(b, c);
                six_vol += knotscope::dot(a, knotscope::cross(b, c));
            }
        }
    }
    return six_vol / 6.0;
}

// ---------------------------------------------------------------------------
// Symbolic Alexander polynomial. Builds the crossing/arc matrix over Z[t],
// expands the minor determinant by cofactors, and normalizes the result up
// to units (sign and powers of t, plus the t -> 1/t symmetry).

using Poly = std::vector<long long>;  // coefficient of t^i at index i

namespace poly {

inline Poly trim(Poly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

inline Poly add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return trim(r);
}

inline Poly sub(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return trim(r);
}

inline Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return trim(r);
}

inline Poly det(std::vector<std::vector<Poly>> m) {
    const std::size_t n = m.size();
    if (n == 0) return {1};
    if (n == 1) return m[0][0];
    Poly result;
    for (std::size_t c = 0; c < n; ++c) {
        if (m[0][c].empty()) continue;
        std::vector<std::vector<Poly>> minor(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            for (std::size_t cc = 0; cc < n; ++cc) {
                if (cc == c) continue;
                minor[r - 1].push_back(m[r][cc]);
            }
        }
        const Poly term = mul(m[0][c], det(std::move(minor)));
        result = (c % 2 == 0) ? add(result, term) : sub(result, term);
    }
    return result;
}

}  // namespace poly

// Canonical form: no factor of t, positive leading coefficient, and the
// lexicographically smaller of the polynomial and its reverse (Alexander
// polynomials are only defined up to +-t^k and t <-> 1/t).
inline Poly canonical(Poly p) {
    std::size_t low = 0;
    while (low < p.size() && p[low] == 0) ++low;
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(low));
    p = poly::trim(std::move(p));
    if (p.empty()) return p;
    if (p.back() < 0)
        for (auto& c : p) c = -c;
    Poly rev(p.rbegin(), p.rend());
    if (rev.back() < 0)
        for (auto& c : rev) c = -c;
    return std::min(p, rev);
}

inline Poly alexander_poly(const knotscope::Diagram& d) {
    const std::size_t n = d.n_crossings();
    if (n == 0) return {1};
    const auto& g = d.gauss;
    std::vector<std::size_t> under_pos;
    for (std::size_t p = 0; p < g.size(); ++p)
        if (!g[p].over) under_pos.push_back(p);
    if (under_pos.size() != n) throw std::runtime_error("bad gauss sequence");

    // arc containing position p: the strand run ending at the next under-pass
    auto arc_of = [&](std::size_t p) -> std::size_t {
        std::size_t before = 0;
        for (std::size_t u : under_pos)
            if (u < p) ++before;
        return (before + n - 1) % n;
    };

    const Poly one{1}, t{0, 1}, one_minus_t{1, -1}, t_minus_one{-1, 1},
        minus_one{-1}, minus_t{0, -1};
    std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
    std::vector<std::size_t> over_at(n, g.size()), under_at(n, g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (g[p].over) over_at[g[p].crossing] = p;
        else under_at[g[p].crossing] = p;
    }
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t over_arc = arc_of(over_at[c]);
        const std::size_t in_arc = arc_of(under_at[c]);
        const std::size_t out_arc = (in_arc + 1) % n;
        if (d.signs[c] > 0) {
            m[c][over_arc] = poly::add(m[c][over_arc], one_minus_t);
            m[c][in_arc] = poly::add(m[c][in_arc], t);
            m[c][out_arc] = poly::add(m[c][out_arc], minus_one);
        } else {
            m[c][over_arc] = poly::add(m[c][over_arc], t_minus_one);
            m[c][in_arc] = poly::add(m[c][in_arc], one);
            m[c][out_arc] = poly::add(m[c][out_arc], minus_t);
        }
    }
    // drop the last row and column, not the first ones the library drops
    std::vector<std::vector<Poly>> minor(n - 1);
    for (std::size_t r = 0; r + 1 < n; ++r)
        for (std::size_t c = 0; c + 1 < n; ++c) minor[r].push_back(m[r][c]);
    return canonical(poly::det(std::move(minor)));
}

inline long long eval_abs(const Poly& p, long long t) {
    long long v = 0, tp = 1;
    for (long long c : p) {
        v += c * tp;
        tp *= t;
    }
    return std::llabs(v);
}

// ---------------------------------------------------------------------------
// Closure of a braid word as a crossing diagram. Letter g in 1..k-1 swaps
// strand lanes g-1 and g; positive letters put the left strand on top. The
// closure must be a single component or this throws.

inline knotscope::Diagram braid_closure(int strands, const std::vector<int>& word) {
    const std::size_t m = word.size();
    knotscope::Diagram d;
    d.signs.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        const int g = std::abs(word[t]);
        if (g < 1 || g >= strands) throw std::runtime_error("bad braid letter");
        d.signs[t] = word[t] > 0 ? 1 : -1;
    }
    int lane = 0;
    std::size_t steps = 0;
    do {
        for (std::size_t t = 0; t < m; ++t) {
            const int a = std::abs(word[t]) - 1;
            if (lane == a || lane == a + 1) {
                const bool over = (lane == a) == (word[t] > 0);
                d.gauss.push_back({static_cast<std::uint32_t>(t), over});
                lane = (lane == a) ? a + 1 : a;
            }
        }
        if (++steps > static_cast<std::size_t>(strands) + 1) break;
    } while (lane != 0);
    if (lane != 0 || d.gauss.size() != 2 * m) {
        throw std::runtime_error("braid closure is not a single component");
    }
    return d;
}

// ---------------------------------------------------------------------------
// Small deterministic point-set helpers shared by several test files.

inline std::vector<Vec3> random_box_points(std::size_t n, std::uint64_t seed,
                                           double side = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, side);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = {u(gen), u(gen), u(gen)};
    return pts;
}

inline std::vector<Vec3> random_sphere_points(std::size_t n, std::uint64_t seed,
                                              double radius = 1.0) {
    std::mt19937_64 gen(seed);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = mc::random_direction(gen) * radius;
    return pts;
}

}  // namespace oracle

#endif
