#pragma once

// Random equilateral polygons via crankshaft Monte Carlo, and equilateral
// trefoil embeddings inscribed in a parametric curve.
//
// Each sample runs an independent chain seeded from (seed, sample index), so
// output is reproducible regardless of batching or thread count. Crankshaft
// rotations preserve closure and edge lengths exactly in real arithmetic;
// accumulated floating-point drift is squeezed out every thousand moves by
// alternating projection onto the unit-edge and closed-polygon constraints.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "knot.hpp"
#include "rng.hpp"
#include "vec3.hpp"
#include "geometry.hpp"

namespace knotscope {

struct SamplerConfig {
    std::size_t length = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::size_t burn_in_moves = 0;          // 0: use 100 * length
    std::size_t moves_between_samples = 0;  // 0: use 10 * length
    std::string id_prefix = "L";
};

inline void validate_config(const SamplerConfig& cfg) {
    if (cfg.length < 6) {
        throw ValidationError("sampler length must be at least 6, got " +
                              std::to_string(cfg.length));
    }
    if (cfg.n_samples == 0) throw ValidationError("sampler needs n_samples >= 1");
}

// Unit-edge regular n-gon in the xy-plane, centered at the origin.
inline KnotEmbedding regular_polygon(std::size_t n) {
    if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
    const double R = 0.5 / std::sin(M_PI / static_cast<double>(n));
    KnotEmbedding k;
    k.vertices.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        k.vertices.push_back({R * std::cos(a), R * std::sin(a), 0.0});
    }
    return k;
}

namespace detail {

// Project edges onto unit length, then onto zero mean, until both hold to
// near machine precision; rebuild vertices from the first one.
inline void renormalize(std::vector<Vec3>& v) {
    const std::size_t n = v.size();
    std::vector<Vec3> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = v[(i + 1) % n] - v[i];
    for (int iter = 0; iter < 200; ++iter) {
        double worst = 0.0;
        for (Vec3& ei : e) {
            const double len = norm(ei);
            worst = std::max(worst, std::fabs(len - 1.0));
            ei /= len;
        }
        Vec3 mean{};
        for (const Vec3& ei : e) mean += ei;
        mean /= static_cast<double>(n);
        worst = std::max(worst, norm(mean));
        for (Vec3& ei : e) ei -= mean;
        if (worst < 1e-14) break;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) v[i + 1] = v[i] + e[i];
}

inline void crankshaft_inplace(std::vector<Vec3>& v, Rng& rng) {
    const std::size_t n = v.size();
    const std::size_t i = rng.below(n);
    const std::size_t j = rng.below(n);
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    if (i == j) return;
    const Vec3 a = v[i];
    const Vec3 chord = v[j] - a;
    const double len = norm(chord);
    if (len < 1e-12) return;
    const Vec3 axis = chord / len;
    for (std::size_t k = (i + 1) % n; k != j; k = (k + 1) % n) {
        v[k] = a + rotate_about(v[k] - a, axis, angle);
    }
}

}  // namespace detail

// One crankshaft rotation: a uniformly random arc of the polygon is rotated
// by a uniform angle about the chord connecting its ends.
inline KnotEmbedding crankshaft_move(const KnotEmbedding& k, Rng& rng) {
    KnotEmbedding out = k;
    detail::crankshaft_inplace(out.vertices, rng);
    return out;
}

// Sample number `index` of the configured batch; its chain depends only on
// (seed, index), never on the other samples.
inline KnotEmbedding sample_single(const SamplerConfig& cfg, std::size_t index) {
    validate_config(cfg);
    const std::size_t burn =
        cfg.burn_in_moves > 0 ? cfg.burn_in_moves : 100 * cfg.length;
    const std::size_t gap = cfg.moves_between_samples > 0
                                ? cfg.moves_between_samples
                                : 10 * cfg.length;
    Rng rng(mix_seed(cfg.seed, index));
    KnotEmbedding k = regular_polygon(cfg.length);
    for (std::size_t m = 1; m <= burn + gap; ++m) {
        detail::crankshaft_inplace(k.vertices, rng);
        if (m % 1000 == 0) detail::renormalize(k.vertices);
    }
    detail::renormalize(k.vertices);
    k.id = cfg.id_prefix + std::to_string(cfg.length) + "-" + std::to_string(index);
    k.seed = mix_seed(cfg.seed, index);
    require_valid(k);
    return k;
}

// Runs an independent chain per sample and feeds each resulting embedding to
// the sink in index order.
inline void sample_polygons(const SamplerConfig& cfg,
                            const std::function<void(KnotEmbedding&&)>& sink) {
    validate_config(cfg);
    for (std::size_t s = 0; s < cfg.n_samples; ++s) sink(sample_single(cfg, s));
}

inline std::vector<KnotEmbedding> sample_polygons(const SamplerConfig& cfg) {
    std::vector<KnotEmbedding> out;
    out.reserve(cfg.n_samples);
    sample_polygons(cfg, [&](KnotEmbedding&& k) { out.push_back(std::move(k)); });
    return out;
}

// Trefoil drawn on a torus of major radius R and tube radius r; z_scale
// flattens it toward the plane.
struct TrefoilParams {
    double R = 4.0;
    double r = 1.0;
    double z_scale = 1.0;
    std::size_t n_edges = 90;
};

// Named shapes: a plump compact embedding, a thin torus-wound one, and a
// nearly flat one.
inline TrefoilParams trefoil_preset(const std::string& name, std::size_t n_edges = 90) {
    TrefoilParams p;
    p.n_edges = n_edges;
    if (name == "tight") {
        p.R = 2.0;
        p.r = 0.8;
        p.z_scale = 1.0;
    } else if (name == "torus") {
        p.R = 4.0;
        p.r = 0.6;
        p.z_scale = 1.0;
    } else if (name == "flat") {
        p.R = 4.0;
        p.r = 1.0;
        p.z_scale = 0.15;
    } else {
        throw DataError("unknown trefoil preset '" + name + "'");
    }
    return p;
}

namespace detail {

inline Vec3 trefoil_point(const TrefoilParams& p, double s) {
    const double w = p.R + p.r * std::cos(3.0 * s);
    return {w * std::cos(2.0 * s), w * std::sin(2.0 * s),
            p.z_scale * p.r * std::sin(3.0 * s)};
}

// Marches n chords of length c along the curve from s=0; returns the final
// parameter (can pass 2*pi). Fills verts when requested.
inline double march_chords(const TrefoilParams& p, double c, std::vector<Vec3>* verts) {
    const double h = 2.0 * M_PI / 20000.0;
    double s = 0.0;
    Vec3 cur = trefoil_point(p, 0.0);
    if (verts) verts->assign(1, cur);
    for (std::size_t e = 0; e < p.n_edges; ++e) {
        double lo = s, hi = s;
        for (;;) {
            hi += h;
            if (dist(trefoil_point(p, hi), cur) >= c) break;
            lo = hi;
            if (hi > s + 4.0 * M_PI) {
                throw DataError("chord marching failed to advance");
            }
        }
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (dist(trefoil_point(p, mid), cur) < c) lo = mid;
            else hi = mid;
        }
        s = 0.5 * (lo + hi);
        cur = trefoil_point(p, s);
        if (verts && e + 1 < p.n_edges) verts->push_back(cur);
    }
    return s;
}

}  // namespace detail

// Equilateral closed polygon inscribed in the trefoil curve, rescaled to unit
// edges. Fails if the discretization self-intersects.
inline KnotEmbedding parametric_trefoil(const TrefoilParams& p, const std::string& id) {
    if (p.n_edges < 6) throw ValidationError("trefoil needs at least 6 edges");
    // total chord length per edge count brackets the equilateral chord
    double hi = 0.0;
    {
        const int fine = 20000;
        Vec3 prev = detail::trefoil_point(p, 0.0);
        for (int i = 1; i <= fine; ++i) {
            const Vec3 q = detail::trefoil_point(p, 2.0 * M_PI * i / fine);
            hi += dist(prev, q);
            prev = q;
        }
        hi /= static_cast<double>(p.n_edges);
    }
    double lo = hi;
    while (detail::march_chords(p, lo, nullptr) > 2.0 * M_PI) lo *= 0.95;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::march_chords(p, mid, nullptr) > 2.0 * M_PI) hi = mid;
        else lo = mid;
    }
    const double c = 0.5 * (lo + hi);
    std::vector<Vec3> verts;
    detail::march_chords(p, c, &verts);
    if (verts.size() != p.n_edges) {
        throw DataError("trefoil inscription produced wrong vertex count");
    }
    for (Vec3& v : verts) v /= c;
    detail::renormalize(verts);

    KnotEmbedding k;
    k.id = id;
    k.vertices = std::move(verts);
    require_valid(k);
    const std::size_t n = k.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            const double d = detail::segment_distance(
                k.vertices[i], k.vertices[(i + 1) % n], k.vertices[j],
                k.vertices[(j + 1) % n]);
            if (d < 1e-6) {
                throw ValidationError("trefoil discretization self-intersects near edge " +
                                      std::to_string(i));
            }
        }
    }
    return k;
}

}  // namespace knotscope
