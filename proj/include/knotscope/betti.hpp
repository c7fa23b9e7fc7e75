#pragma once

// Betti curves and the scalar features derived from barcodes: total bar mass,
// bar counts, the short-bar filter around the sample-spacing scale, and the
// tail-weighted excess statistic computed on the radius scale.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "persistence.hpp"

namespace knotscope {

enum class CurveScale { diameter, radius };

// Right-continuous step function: value is steps[k].second on
// [steps[k].first, steps[k+1].first), and 0 before the first breakpoint.
struct BettiCurve {
    CurveScale scale = CurveScale::diameter;
    std::vector<std::pair<double, double>> steps;

    double value_at(double t) const {
        if (steps.empty() || t < steps.front().first) return 0.0;
        auto it = std::upper_bound(
            steps.begin(), steps.end(), t,
            [](double v, const std::pair<double, double>& s) { return v < s.first; });
        return std::prev(it)->second;
    }
};

// Betti curve of the given dimension. Infinite bars contribute up to the
// largest finite endpoint and are still counted there, so the final recorded
// value may be nonzero for dim 0.
inline BettiCurve betti_curve(const Barcode& bc, int dim,
                              CurveScale scale = CurveScale::diameter) {
    const std::vector<Bar>* bars = nullptr;
    if (dim == 0) bars = &bc.dim0;
    else if (dim == 1) bars = &bc.dim1;
    else throw DataError("betti_curve: dimension must be 0 or 1");

    std::map<double, double> delta;
    std::size_t live_forever = 0;
    for (const Bar& b : *bars) {
        if (std::isinf(b.death)) {
            delta[b.birth] += 1.0;
            ++live_forever;
        } else if (b.death > b.birth) {
            delta[b.birth] += 1.0;
            delta[b.death] -= 1.0;
        }
    }
    BettiCurve curve;
    curve.scale = scale;
    const double f = scale == CurveScale::radius ? 0.5 : 1.0;
    double acc = 0.0;
    for (auto& [t, dv] : delta) {
        acc += dv;
        if (!curve.steps.empty() && curve.steps.back().second == acc) continue;
        curve.steps.push_back({t * f, acc});
    }
    (void)live_forever;
    return curve;
}

inline BettiCurve scale_curve(BettiCurve c, double factor) {
    for (auto& s : c.steps) s.second *= factor;
    return c;
}

inline BettiCurve sum_curves(std::span<const BettiCurve> curves) {
    if (curves.empty()) return {};
    const CurveScale scale = curves.front().scale;
    std::map<double, double> delta;
    for (const BettiCurve& c : curves) {
        if (c.scale != scale) throw DataError("sum_curves: mixed curve scales");
        double prev = 0.0;
        for (const auto& s : c.steps) {
            delta[s.first] += s.second - prev;
            prev = s.second;
        }
    }
    BettiCurve out;
    out.scale = scale;
    double acc = 0.0;
    for (auto& [t, dv] : delta) {
        acc += dv;
        if (!out.steps.empty() && out.steps.back().second == acc) continue;
        out.steps.push_back({t, acc});
    }
    return out;
}

inline BettiCurve average_curves(std::span<const BettiCurve> curves) {
    if (curves.empty()) throw DataError("average_curves: no curves");
    return scale_curve(sum_curves(curves), 1.0 / static_cast<double>(curves.size()));
}

inline double curve_integral(const BettiCurve& c) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < c.steps.size(); ++k) {
        total += c.steps[k].second * (c.steps[k + 1].first - c.steps[k].first);
    }
    // a trailing nonzero value would make the integral infinite; curves built
    // from finite bars always end at 0
    return total;
}

// Sum of finite dim-1 bar lengths. Equal to the integral of the dim-1 Betti
// curve on the same scale as the barcode.
inline double total_persistence(const Barcode& bc) {
    double total = 0.0;
    for (const Bar& b : bc.dim1) {
        if (!std::isinf(b.death)) total += b.death - b.birth;
    }
    return total;
}

struct BarStats {
    std::size_t n_bars = 0;
    double max_bar = 0.0;
};

inline BarStats bar_stats(const Barcode& bc) {
    BarStats s;
    s.n_bars = bc.dim1.size();
    for (const Bar& b : bc.dim1) {
        if (!std::isinf(b.death)) s.max_bar = std::max(s.max_bar, b.death - b.birth);
    }
    return s;
}

// Drops dim-1 bars born just past the sample spacing with persistence under
// the cutoff; these are artifacts of the discretization, not features of the
// curve. Windows are on the diameter scale.
inline Barcode filter_spike(Barcode bc, double window_start = 0.1,
                            double window_width = 0.02,
                            double max_persistence = 0.05) {
    auto is_spike = [&](const Bar& b) {
        return b.birth > window_start && b.birth <= window_start + window_width &&
               !std::isinf(b.death) && (b.death - b.birth) < max_persistence;
    };
    std::erase_if(bc.dim1, is_spike);
    return bc;
}

struct CurvePeaks {
    double max_value = 0.0;
    double max_at = 0.0;
    double second_value = 0.0;
    double second_at = 0.0;
};

// Global maximum plus the largest other local maximum of a step curve.
// Unless the barcode was spike-filtered, plateaus starting inside the spike
// window are not eligible as the second peak.
inline CurvePeaks curve_peaks(const BettiCurve& c, bool spike_filtered,
                              double window_start = 0.1, double window_width = 0.02) {
    CurvePeaks p;
    if (c.steps.empty()) return p;
    double wlo = window_start, whi = window_start + window_width;
    if (c.scale == CurveScale::radius) {
        wlo *= 0.5;
        whi *= 0.5;
    }
    // collapse to plateaus (t, value)
    std::vector<std::pair<double, double>> plat;
    for (const auto& s : c.steps) {
        if (plat.empty() || plat.back().second != s.second) plat.push_back(s);
    }
    std::size_t best = plat.size();
    for (std::size_t k = 0; k < plat.size(); ++k) {
        if (best == plat.size() || plat[k].second > plat[best].second) best = k;
    }
    p.max_value = plat[best].second;
    p.max_at = plat[best].first;
    for (std::size_t k = 0; k < plat.size(); ++k) {
        if (k == best) continue;
        const double left = k == 0 ? 0.0 : plat[k - 1].second;
        const double right = k + 1 < plat.size() ? plat[k + 1].second : 0.0;
        if (plat[k].second <= left || plat[k].second <= right) continue;  // not a local max
        if (!spike_filtered && plat[k].first > wlo && plat[k].first <= whi) continue;
        if (plat[k].second > p.second_value) {
            p.second_value = plat[k].second;
            p.second_at = plat[k].first;
        }
    }
    return p;
}

// Tail-weighted mean excess of a dim-1 Betti curve over 1, on the radius
// scale. S is the end of the curve support; the weight falls linearly from 1
// at t=0 to 0 at S-eps and stays 0 beyond. Returns 0 for a curve that never
// exceeds 1. eps must lie in (0, S).
inline double excess_statistic(const BettiCurve& c, double eps) {
    if (c.scale != CurveScale::radius) {
        throw DataError("excess_statistic expects a radius-scale curve");
    }
    if (c.steps.empty()) return 0.0;
    const double S = c.steps.back().first;
    if (!(S > 0.0)) return 0.0;
    if (!(eps > 0.0) || eps >= S) {
        throw DataError("excess_statistic: eps must be in (0, S)");
    }
    const double cut = S - eps;
    auto weight = [&](double t) { return t >= cut ? 0.0 : 1.0 - t / cut; };
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < c.steps.size(); ++k) {
        const double v = std::max(c.steps[k].second - 1.0, 0.0);
        if (v <= 0.0) continue;
        const double a = c.steps[k].first;
        const double b = std::min(c.steps[k + 1].first, cut);
        if (b <= a) continue;
        // weight is linear, integrate exactly via the midpoint value
        integral += v * (b - a) * weight(0.5 * (a + b));
    }
    return integral / S;
}

inline double default_excess_eps(const BettiCurve& c) {
    if (c.steps.empty()) return 0.0;
    return 0.05 * c.steps.back().first;
}

}  // namespace knotscope
