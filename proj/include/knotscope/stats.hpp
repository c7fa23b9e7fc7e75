#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "common.hpp"

namespace knotscope {

// Pearson correlation; nullopt when either variable has zero variance.
inline std::optional<double> pearson(std::span<const double> xs,
                                     std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DataError("pearson: length mismatch");
    const std::size_t n = xs.size();
    if (n < 2) throw DataError("pearson: need at least two samples");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

namespace detail {

// Ranks with ties sharing their average rank.
inline std::vector<double> ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t q = i; q <= j; ++q) r[order[q]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace detail

inline std::optional<double> spearman(std::span<const double> xs,
                                      std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DataError("spearman: length mismatch");
    const std::vector<double> rx = detail::ranks(xs);
    const std::vector<double> ry = detail::ranks(ys);
    return pearson(rx, ry);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least squares y = slope*x + intercept.
inline LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DataError("linear_fit: length mismatch");
    const std::size_t n = xs.size();
    if (n < 2) throw DataError("linear_fit: need at least two samples");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw DataError("linear_fit: x has zero variance");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(std::span<const double> xs) {
    MeanStderr m;
    m.n = xs.size();
    if (m.n == 0) throw DataError("mean_stderr: empty sample");
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m.n);
    if (m.n > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(acc / (static_cast<double>(m.n) - 1.0) /
                              static_cast<double>(m.n));
    }
    return m;
}

}  // namespace knotscope
