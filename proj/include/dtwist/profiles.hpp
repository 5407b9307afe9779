#pragma once

#include <iosfwd>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

namespace dtwist {

/// C-infinity transition built from the exponential kernel exp(-1/s):
/// 0 for s <= 0, 1 for s >= 1, and sigma(s) + sigma(1 - s) = 1.
double smooth_step(double s);
double smooth_step_d1(double s);
double smooth_step_d2(double s);

enum class ProfileKind { eta, gamma_plus, gamma_minus };
enum class Order { value, d1, d2, antiderivative };

/// Which one-sided limit to take at a jump of the gamma profiles.
enum class Side { none, left, right };

std::string_view to_string(ProfileKind kind);

/// Antiderivative of a smooth function on [0, 1], tabulated on a uniform
/// grid and interpolated with quintic Hermite polynomials using the exact
/// integrand and its derivative at the nodes.
class AntiderivativeTable {
public:
    template <class F, class DF>
    AntiderivativeTable(F&& f, DF&& df, int intervals = 4096);

    /// Integral from 0 to v, v clamped to [0, 1].
    double operator()(double v) const;
    /// Derivative of the interpolant (recovers the integrand).
    double slope(double v) const;
    double total() const { return values_.back(); }

private:
    void fill(const std::vector<double>& f, const std::vector<double>& df,
              const std::vector<double>& cell_integrals);

    double h_ = 0.0;
    std::vector<double> values_;
    std::vector<double> f_;
    std::vector<double> df_;
};

/// One of the smooth bump profiles eta, gamma_plus, gamma_minus on [0, 1].
///
/// eta:         support [1/4, 3/4], equal to 1 on [3/8, 5/8], mirror
///              symmetric, unit integral.
/// gamma_plus:  zero on [0, 1/2], equal to 1 on (1/2, 5/8], a negative lobe
///              on (11/16, 31/32) calibrated to give zero integral.
/// gamma_minus: gamma_plus(1 - t).
///
/// Plateaus and zero regions evaluate to exact constants. The gamma
/// profiles are discontinuous at 1/2; value() there returns 0 (both
/// gamma_plus(1/2) and gamma_minus(1/2) vanish), derivatives need a side.
class Profile {
public:
    ProfileKind kind() const { return kind_; }
    double shoulder_coefficient() const { return coefficient_; }
    std::pair<double, double> plateau_bounds() const;
    std::pair<double, double> support_bounds() const;

    double value(double t, Side side = Side::none) const;
    double d1(double t, Side side = Side::none) const;
    double d2(double t, Side side = Side::none) const;
    double antiderivative(double t) const;
    /// Derivative of the tabulated antiderivative interpolant.
    double antiderivative_slope(double t) const;

    double eval(double t, Order order, Side side = Side::none) const;

    /// Sup norms of the value and first two derivatives, sampled densely
    /// at calibration time.
    double sup_abs(Order order) const;

private:
    friend class ProfileSet;
    struct Tables;

    Profile(ProfileKind kind, double coefficient, std::shared_ptr<const Tables> tables);
    void compute_sup_norms();

    double plus_value(double t, Side side) const;
    double plus_d1(double t, Side side) const;
    double plus_d2(double t, Side side) const;
    double plus_antiderivative(double t) const;

    ProfileKind kind_;
    double coefficient_;
    std::shared_ptr<const Tables> tables_;
    double sup_[3] = {0.0, 0.0, 0.0};
};

/// The three calibrated profiles. Immutable and shareable after construction.
class ProfileSet {
public:
    /// Calibrates shoulder coefficients by adaptive Gauss-Kronrod quadrature
    /// so the integral constraints hold to `quadrature_tolerance`. Throws
    /// CalibrationError when the quadrature does not converge.
    static ProfileSet calibrate(double quadrature_tolerance = 1e-13);

    const Profile& eta() const { return eta_; }
    const Profile& gamma_plus() const { return gamma_plus_; }
    const Profile& gamma_minus() const { return gamma_minus_; }
    const Profile& get(ProfileKind kind) const;

    double quadrature_tolerance() const { return tolerance_; }

private:
    ProfileSet(Profile eta, Profile gp, Profile gm, double tol)
        : eta_(std::move(eta)), gamma_plus_(std::move(gp)), gamma_minus_(std::move(gm)),
          tolerance_(tol) {}

    Profile eta_;
    Profile gamma_plus_;
    Profile gamma_minus_;
    double tolerance_;
};

inline ProfileSet calibrate_profiles(double quadrature_tolerance)
{
    return ProfileSet::calibrate(quadrature_tolerance);
}

/// CSV with columns profile,t,value,d1,d2,antiderivative on `samples`
/// uniform points of [0, 1]. One-sided points use the right limit.
void write_profile_csv(std::ostream& os, const ProfileSet& profiles, int samples);

} // namespace dtwist

#include "dtwist/detail/antiderivative_table.inl"
