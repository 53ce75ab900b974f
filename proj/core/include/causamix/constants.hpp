#pragma once

namespace causamix {

// Entries at or below this magnitude count as structural zeros when a matrix
// is exact up to floating-point rounding.
inline constexpr double kExactZeroTol = 1e-8;

// Relative residual below which a vector counts as linearly dependent on a
// candidate set.
inline constexpr double kDependenceTol = 1e-9;

// Entry-wise tolerance for the mixing-matrix transpose correspondence.
inline constexpr double kTransposeTol = 1e-10;

// Default edge threshold on reconstructed coefficients from noisy estimates.
inline constexpr double kEdgeThresholdNoisy = 0.05;

// Condition-number level above which a reconstruction warns about its pivot
// submatrix.
inline constexpr double kCondWarn = 1e8;

// Default cap on enumerated equivalence-class members.
inline constexpr long long kClassCap = 1000000;

// Default cap on the subset sizes scanned by the linear-independence checks.
inline constexpr int kSubsetCap = 8;

// Node-count cap for the exhaustive bottleneck (vertex-cut) check.
inline constexpr int kBottleneckCap = 10;

}  // namespace causamix
