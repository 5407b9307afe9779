#pragma once

#include "dtwist/twist_map.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <vector>

namespace dtwist {

enum class SegmentKind { stable, unstable };

const char* to_string(SegmentKind kind);

/// Affine segment over J_k through the point (mu_k, mu_{k+1} - mu_k) of
/// Gamma with slope ell_{k+1}/ell_k - 1. Stable for k >= 1, unstable for
/// k <= 0.
struct ManifoldSegment {
    long k = 0;
    SegmentKind kind = SegmentKind::stable;
    double mu = 0.0;
    double base_r = 0.0;
    double slope = 0.0;
    double half_width = 0.0;   ///< ell_k / 8

    /// Height over a theta near mu (circle difference is taken).
    double height(double theta) const;
    AnnulusPoint at(double theta) const;
    /// Point at parameter s in [-1, 1]: theta = mu + s * half_width.
    AnnulusPoint param(double s) const;
};

/// Throws InvalidParameter for a stable k < 1, an unstable k > 0, or |k|
/// outside [0, M - 1].
ManifoldSegment manifold_segment(const TwistSystem& sys, long k, SegmentKind kind);

/// Endpoint and midpoint markers of an iterated segment.
struct MarkerTriple {
    long k = 0;
    SegmentKind kind = SegmentKind::stable;
    AnnulusPoint lo, mid, hi;
    double collinearity = 0.0;   ///< distance of mid from the chord lo-hi
    /// Every step so far evaluated phi inside a single J_j, so the triple
    /// is guaranteed collinear.
    bool in_linear_band = false;
};

/// Stable markers for k = 0, -1, ..., 1 - n (f^{-1} applied to S~_1) and
/// unstable markers for k = 1, ..., n (f applied to U~_0).
std::vector<MarkerTriple> extend_family(const TwistSystem& sys, long n);

struct IterateRow {
    long k = 0;
    SegmentKind kind = SegmentKind::stable;
    double deviation = 0.0;      ///< max |r' - height_{k+-1}(theta')| over 16 points
    double band_excess = 0.0;    ///< how far theta' leaves J_{k+-1} (0 when inside)
    double ratio = 0.0;          ///< theta-length of the image over theta-length
    double expected_ratio = 0.0;
    double base_error = 0.0;     ///< image of the base point against the next one
};

struct IterateReport {
    std::vector<IterateRow> rows;
    double max_deviation = 0.0;
    double max_ratio_error = 0.0;
    double max_base_error = 0.0;
    double max_band_excess = 0.0;
};

/// f(S~_k) against S~_{k+1} for k in [1, k_max] and f^{-1}(U~_k) against
/// U~_{k-1} for k in [1 - k_max, 0].
IterateReport manifold_iterate_check(const TwistSystem& sys, long k_max);

struct SideReport {
    double alpha1 = 0.0;
    double alpha0 = 0.0;
    double stable_error = 0.0;     ///< |Gamma - S~_1 - alpha_1 (x - mu_1)| on the off-curve half
    double unstable_error = 0.0;   ///< same for U~_0 with alpha_0
    double stable_min_gap = 0.0;   ///< signed gaps Gamma - segment, extremes
    double stable_max_gap = 0.0;
    double unstable_min_gap = 0.0;
    double unstable_max_gap = 0.0;
    double on_curve_error = 0.0;   ///< |Gamma - segment| on the halves lying on Gamma
    bool strict = false;           ///< every off-curve gap nonzero with one common sign
    bool zone_below = false;       ///< segments sit under Gamma
};

SideReport curve_side_check(const TwistSystem& sys, int samples = 64);

struct ConvergenceRow {
    long n = 0;
    double distance = 0.0;        ///< Euclidean, theta taken as a circle difference
    double theta_distance = 0.0;
    double ratio = 0.0;           ///< theta_distance / theta_distance at n = 0
    double expected_ratio = 0.0;  ///< ell_{n+1} / ell_1
};

struct ConvergenceReport {
    double s = 0.0;
    std::vector<ConvergenceRow> rows;
    double max_relative_error = 0.0;
};

/// Orbits of y = S~_1(s) and of the base point x_1, s in [-1, 1].
ConvergenceReport orbit_convergence_check(const TwistSystem& sys, double s, long n);

void to_json(nlohmann::json& j, const MarkerTriple& m);
void to_json(nlohmann::json& j, const IterateReport& r);
void to_json(nlohmann::json& j, const SideReport& r);
void to_json(nlohmann::json& j, const ConvergenceReport& r);

/// CSV kind,k,theta,r with `points` samples per segment for stable
/// k in [1, k_max] and unstable k in [1 - k_max, 0].
void write_segment_csv(std::ostream& os, const TwistSystem& sys, long k_max, int points);

} // namespace dtwist
