#pragma once

#include <cmath>

namespace dtwist {

/// Fractional part in [0, 1). Exact for finite doubles.
inline double wrap01(double x) noexcept
{
    double f = x - std::floor(x);
    // x slightly negative can round up to exactly 1.0
    return f >= 1.0 ? 0.0 : f;
}

/// Representative of a circle difference in [-1/2, 1/2).
inline double circle_diff(double a, double b) noexcept
{
    double d = wrap01(a - b);
    return d >= 0.5 ? d - 1.0 : d;
}

inline double circle_dist(double a, double b) noexcept
{
    return std::abs(circle_diff(a, b));
}

/// Lift of a forward displacement into (0, 1).
inline double positive_turn(double d) noexcept
{
    double w = wrap01(d);
    return w == 0.0 ? 1.0 : w;
}

/// Lift of a backward displacement into (-1, 0).
inline double negative_turn(double d) noexcept
{
    return positive_turn(d) - 1.0;
}

} // namespace dtwist
