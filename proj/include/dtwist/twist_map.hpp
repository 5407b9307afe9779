#pragma once

#include "dtwist/circle_map.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace dtwist {

enum class PhiOrder { value, d1_left, d1_right, d2_left, d2_right };

/// Point of the annulus: theta in [0, 1), r unwrapped.
struct AnnulusPoint {
    double theta = 0.0;
    double r = 0.0;
};

/// f(theta, r) = (theta + r, r + phi(theta + r)) with
/// phi = g~ + g~^{-1} - 2 Id computed from the periodic displacements.
class TwistSystem {
public:
    explicit TwistSystem(const CircleMap& g) : g_(&g), denjoy_(dynamic_cast<const DenjoyMap*>(&g)) {}

    const CircleMap& circle() const { return *g_; }
    /// Throws InvalidParameter when built over a map without gap structure.
    const DenjoyMap& denjoy() const;
    bool has_gaps() const { return denjoy_ != nullptr; }

    double phi(double x, PhiOrder order = PhiOrder::value) const;
    /// Height of the invariant curve: g(theta) - theta lifted to (0, 1).
    double curve(double theta) const { return g_->displacement(wrap(theta)); }

    AnnulusPoint forward(AnnulusPoint p) const;
    AnnulusPoint backward(AnnulusPoint p) const;

private:
    static double wrap(double x);
    const CircleMap* g_;
    const DenjoyMap* denjoy_;
};

/// A named scalar check: measured against tolerance.
struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

Check make_check(std::string name, double measured, double tolerance);
void to_json(nlohmann::json& j, const Check& c);

struct InvarianceReport {
    long samples = 0;
    double max_residual = 0.0;             ///< on Gamma
    double max_translated_residual = 0.0;  ///< on Gamma + (0, 1)
    double max_projection_error = 0.0;     ///< theta' against g(theta)
    double worst_theta = 0.0;
};

/// Mixed samples: a third in gap interiors, a third at gap endpoints, a
/// third in the residual set (all gaps' interiors when there are no gaps).
InvarianceReport verify_invariant_curve(const TwistSystem& sys, long samples, std::uint64_t seed);

struct LinearityRow {
    long k;
    double slope;
    double expected_slope;
    double intercept;     ///< fitted phi(mu_k)
    double expected_intercept;
    double max_deviation; ///< of phi from the least-squares line on J_k
};

struct LinearityReport {
    std::vector<LinearityRow> rows;
    double max_deviation = 0.0;
    double max_slope_error = 0.0;
    double max_intercept_error = 0.0;
};

/// Fits phi on 64 points of J_k for every k in [-M+1, M-1]. Expected slope
/// m_k - 2, or m1_adjusted - 2 at k = 1; expected phi(mu_k) is the lifted
/// second difference mu_{k+1} + mu_{k-1} - 2 mu_k.
LinearityReport phi_linearity_check(const TwistSystem& sys, const GapSequences& g);

/// Rigid-rotation variant: phi must vanish, slope 0 on the given intervals.
LinearityReport phi_linearity_check(const TwistSystem& sys, const GapTable& t);

struct StructuralReport {
    double inverse_residual = 0.0;       ///< |f^{-1} f p - p| on random points
    double det_deviation = 0.0;          ///< |det Df - 1| by central differences
    double twist_deviation = 0.0;        ///< |d theta'/dr - 1|
    bool translation_exact = false;      ///< f(theta, r + 1) == f(theta, r) + (0, 1) bitwise
    double periodicity = 0.0;            ///< |phi(x + 1) - phi(x)|
    double phi_mean = 0.0;               ///< quadrature mean of phi
    double conjugacy = 0.0;              ///< |j g - R_w j| on gap midpoints (0 without gaps)
};

StructuralReport structural_checks(const TwistSystem& sys, std::uint64_t seed, long samples = 1000);

/// Gauss-Legendre mean of phi over [0, 1) split at every piece boundary.
double phi_mean(const TwistSystem& sys);

struct DiffusionReport {
    double theta0 = 0.0;
    double offset = 0.0;
    long steps = 0;
    double max_excursion = 0.0;
    double final_excursion = 0.0;
    std::vector<double> thresholds;
    std::vector<long> first_crossing;    ///< -1 if never crossed
    std::vector<std::pair<long, double>> series;  ///< (n, running max) at 100 checkpoints
};

DiffusionReport diffusion_probe(const TwistSystem& sys, double theta0, double offset, long steps,
                                std::vector<double> thresholds = {1e-3, 1e-2, 1e-1, 1.0});

void to_json(nlohmann::json& j, const InvarianceReport& r);
void to_json(nlohmann::json& j, const LinearityReport& r);
void to_json(nlohmann::json& j, const StructuralReport& r);
void to_json(nlohmann::json& j, const DiffusionReport& r);

/// Phase portrait rows orbit,n,theta,r. Orbit 0 samples Gamma.
void write_portrait_csv(std::ostream& os, const TwistSystem& sys, long orbits, long steps,
                        long curve_samples, double r_spread);

} // namespace dtwist
