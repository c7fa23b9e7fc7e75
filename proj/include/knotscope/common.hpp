#pragma once

#include <stdexcept>
#include <string>

namespace knotscope {

// Absolute tolerance used for geometric invariants (edge lengths, closure,
// rigid-motion comparisons). Relative tolerances are stated at call sites.
inline constexpr double kGeomTol = 1e-9;

// Input data that violates a declared format or invariant.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Embedding fails the KnotEmbedding invariants.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Projection direction hit a degenerate configuration; caller retries.
struct NonGenericProjection : std::runtime_error {
    explicit NonGenericProjection(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace knotscope
