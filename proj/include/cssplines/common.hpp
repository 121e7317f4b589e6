#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace css {

/// Invalid user-supplied parameters (degree/regularity/smoothness ranges, bad flags).
struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or degenerate geometry input (malformed file, irregular patch, T-junction).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A piecewise polynomial that was expected to lie in a spline space but does not.
struct SmoothnessError : std::runtime_error {
    SmoothnessError(const std::string& msg, int knot, int order)
        : std::runtime_error(msg), worst_knot(knot), worst_order(order) {}
    int worst_knot = -1;   // index of the inner knot with the largest jump
    int worst_order = -1;  // derivative order of that jump
};

/// Linear-algebra level failures (singular systems, non-SPD mass matrix).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact for the small arguments used here (n <= ~60).
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= double(i);
    return r;
}

}  // namespace css
