#include "dtwist/profiles.hpp"

#include "dtwist/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dtwist {

namespace {

double kernel(double s)
{
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Shoulder bump on [0, 1]: smooth_step(2v) rising, smooth_step(2 - 2v)
// falling. Peak 1 at v = 1/2, integral exactly 1/2 by symmetry of sigma.
double bump(double v)
{
    if (v <= 0.0 || v >= 1.0) return 0.0;
    return v <= 0.5 ? smooth_step(2.0 * v) : smooth_step(2.0 - 2.0 * v);
}

double bump_d1(double v)
{
    if (v <= 0.0 || v >= 1.0) return 0.0;
    return v <= 0.5 ? 2.0 * smooth_step_d1(2.0 * v) : -2.0 * smooth_step_d1(2.0 - 2.0 * v);
}

double bump_d2(double v)
{
    if (v <= 0.0 || v >= 1.0) return 0.0;
    return v <= 0.5 ? 4.0 * smooth_step_d2(2.0 * v) : 4.0 * smooth_step_d2(2.0 - 2.0 * v);
}

constexpr double kEtaRiseLo = 0.25;
constexpr double kEtaPlateauLo = 0.375;
constexpr double kEtaPlateauHi = 0.625;
constexpr double kEtaFallHi = 0.75;
constexpr double kEtaWidth = 0.125;

constexpr double kGammaJump = 0.5;
constexpr double kGammaPlateauHi = 0.625;
constexpr double kGammaDescentHi = 0.6875;   // 11/16
constexpr double kGammaLobeHi = 0.96875;     // 31/32
constexpr double kGammaDescentWidth = 0.0625;
constexpr double kGammaLobeWidth = kGammaLobeHi - kGammaDescentHi;  // 9/32

Side flip(Side s)
{
    switch (s) {
    case Side::left: return Side::right;
    case Side::right: return Side::left;
    default: return Side::none;
    }
}

} // namespace

double smooth_step(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double a = kernel(s);
    double b = kernel(1.0 - s);
    return a / (a + b);
}

double smooth_step_d1(double s)
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    double q = 1.0 - s;
    double a = kernel(s);
    double b = kernel(q);
    double sum = a + b;
    return a * b * (1.0 / (s * s) + 1.0 / (q * q)) / (sum * sum);
}

double smooth_step_d2(double s)
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    double q = 1.0 - s;
    double a = kernel(s);
    double b = kernel(q);
    double sum = a + b;
    double p = 1.0 / (s * s) + 1.0 / (q * q);
    double dp = -2.0 / (s * s * s) + 2.0 / (q * q * q);
    double n = a * b * p;
    double dn = a * b * ((1.0 / (s * s) - 1.0 / (q * q)) * p + dp);
    double dsum = a / (s * s) - b / (q * q);
    return (dn * sum - 2.0 * n * dsum) / (sum * sum * sum);
}

std::string_view to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::eta: return "eta";
    case ProfileKind::gamma_plus: return "gamma_plus";
    case ProfileKind::gamma_minus: return "gamma_minus";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// AntiderivativeTable

void AntiderivativeTable::fill(const std::vector<double>& f, const std::vector<double>& df,
                               const std::vector<double>& cells)
{
    f_ = f;
    df_ = df;
    values_.assign(f.size(), 0.0);
    // Neumaier-compensated running sum
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        double t = sum + cells[i];
        if (std::abs(sum) >= std::abs(cells[i]))
            comp += (sum - t) + cells[i];
        else
            comp += (cells[i] - t) + sum;
        sum = t;
        values_[i + 1] = sum + comp;
    }
}

double AntiderivativeTable::operator()(double v) const
{
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return values_.back();
    const std::size_t n = values_.size() - 1;
    std::size_t i = std::min(static_cast<std::size_t>(v / h_), n - 1);
    double tau = (v - i * h_) / h_;
    double t2 = tau * tau;
    double t3 = t2 * tau;
    double t4 = t3 * tau;
    double t5 = t4 * tau;
    double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    double h1 = tau - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    double h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    return h0 * values_[i] + h_ * h1 * f_[i] + h_ * h_ * h2 * df_[i]
         + h3 * values_[i + 1] + h_ * h4 * f_[i + 1] + h_ * h_ * h5 * df_[i + 1];
}

double AntiderivativeTable::slope(double v) const
{
    if (v <= 0.0) return f_.front();
    if (v >= 1.0) return f_.back();
    const std::size_t n = values_.size() - 1;
    std::size_t i = std::min(static_cast<std::size_t>(v / h_), n - 1);
    double tau = (v - i * h_) / h_;
    double t2 = tau * tau;
    double t3 = t2 * tau;
    double t4 = t3 * tau;
    double d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    double d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    double d2 = 0.5 * (2.0 * tau - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    double d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    double d5 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    return (d0 * (values_[i] - values_[i + 1])) / h_ + d1 * f_[i] + h_ * d2 * df_[i]
         + d4 * f_[i + 1] + h_ * d5 * df_[i + 1];
}

// ---------------------------------------------------------------------------
// Profile

struct Profile::Tables {
    double eta_coefficient;
    double gamma_coefficient;
    AntiderivativeTable eta_rise;
    AntiderivativeTable gamma_descent;
    AntiderivativeTable gamma_lobe;
};

Profile::Profile(ProfileKind kind, double coefficient, std::shared_ptr<const Tables> tables)
    : kind_(kind), coefficient_(coefficient), tables_(std::move(tables))
{
    compute_sup_norms();
}

std::pair<double, double> Profile::plateau_bounds() const
{
    switch (kind_) {
    case ProfileKind::eta: return {kEtaPlateauLo, kEtaPlateauHi};
    case ProfileKind::gamma_plus: return {kGammaJump, kGammaPlateauHi};
    case ProfileKind::gamma_minus: return {1.0 - kGammaPlateauHi, kGammaJump};
    }
    return {0.0, 0.0};
}

std::pair<double, double> Profile::support_bounds() const
{
    switch (kind_) {
    case ProfileKind::eta: return {kEtaRiseLo, kEtaFallHi};
    case ProfileKind::gamma_plus: return {kGammaJump, kGammaLobeHi};
    case ProfileKind::gamma_minus: return {1.0 - kGammaLobeHi, kGammaJump};
    }
    return {0.0, 0.0};
}

namespace {

struct EtaPiece {
    double v;      // shoulder coordinate in [0, 1]
    double sign;   // +1 on the rising shoulder, -1 on the falling one
};

} // namespace

double Profile::value(double t, Side side) const
{
    switch (kind_) {
    case ProfileKind::eta: {
        if (t <= kEtaRiseLo || t >= kEtaFallHi) return 0.0;
        if (t >= kEtaPlateauLo && t <= kEtaPlateauHi) return 1.0;
        double c = tables_->eta_coefficient;
        double v = t < kEtaPlateauLo ? (t - kEtaRiseLo) / kEtaWidth : (kEtaFallHi - t) / kEtaWidth;
        return smooth_step(v) + c * bump(v);
    }
    case ProfileKind::gamma_plus: return plus_value(t, side);
    case ProfileKind::gamma_minus: return plus_value(1.0 - t, flip(side));
    }
    return 0.0;
}

double Profile::d1(double t, Side side) const
{
    switch (kind_) {
    case ProfileKind::eta: {
        if (t <= kEtaRiseLo || t >= kEtaFallHi) return 0.0;
        if (t >= kEtaPlateauLo && t <= kEtaPlateauHi) return 0.0;
        double c = tables_->eta_coefficient;
        EtaPiece p = t < kEtaPlateauLo ? EtaPiece{(t - kEtaRiseLo) / kEtaWidth, 1.0}
                                       : EtaPiece{(kEtaFallHi - t) / kEtaWidth, -1.0};
        return p.sign * (smooth_step_d1(p.v) + c * bump_d1(p.v)) / kEtaWidth;
    }
    case ProfileKind::gamma_plus: return plus_d1(t, side);
    case ProfileKind::gamma_minus: return -plus_d1(1.0 - t, flip(side));
    }
    return 0.0;
}

double Profile::d2(double t, Side side) const
{
    switch (kind_) {
    case ProfileKind::eta: {
        if (t <= kEtaRiseLo || t >= kEtaFallHi) return 0.0;
        if (t >= kEtaPlateauLo && t <= kEtaPlateauHi) return 0.0;
        double c = tables_->eta_coefficient;
        double v = t < kEtaPlateauLo ? (t - kEtaRiseLo) / kEtaWidth : (kEtaFallHi - t) / kEtaWidth;
        return (smooth_step_d2(v) + c * bump_d2(v)) / (kEtaWidth * kEtaWidth);
    }
    case ProfileKind::gamma_plus: return plus_d2(t, side);
    case ProfileKind::gamma_minus: return plus_d2(1.0 - t, flip(side));
    }
    return 0.0;
}

double Profile::antiderivative(double t) const
{
    switch (kind_) {
    case ProfileKind::eta: {
        if (t <= kEtaRiseLo) return 0.0;
        if (t >= kEtaFallHi) return 1.0;
        if (t >= kEtaPlateauLo && t <= kEtaPlateauHi) return t;
        const auto& table = tables_->eta_rise;
        if (t < kEtaPlateauLo) return kEtaWidth * table((t - kEtaRiseLo) / kEtaWidth);
        return 1.0 - kEtaWidth * table((kEtaFallHi - t) / kEtaWidth);
    }
    case ProfileKind::gamma_plus: return plus_antiderivative(t);
    case ProfileKind::gamma_minus:
        // integral over [0, t] of gamma_plus(1 - s) = G+(1) - G+(1 - t), G+(1) = 0
        return -plus_antiderivative(1.0 - t);
    }
    return 0.0;
}

double Profile::antiderivative_slope(double t) const
{
    switch (kind_) {
    case ProfileKind::eta: {
        if (t <= kEtaRiseLo || t >= kEtaFallHi) return 0.0;
        if (t >= kEtaPlateauLo && t <= kEtaPlateauHi) return 1.0;
        const auto& table = tables_->eta_rise;
        if (t < kEtaPlateauLo) return table.slope((t - kEtaRiseLo) / kEtaWidth);
        return table.slope((kEtaFallHi - t) / kEtaWidth);
    }
    case ProfileKind::gamma_plus:
    case ProfileKind::gamma_minus: {
        double s = kind_ == ProfileKind::gamma_plus ? t : 1.0 - t;
        if (s <= kGammaJump || s >= kGammaLobeHi) return 0.0;
        if (s <= kGammaPlateauHi) return 1.0;
        if (s < kGammaDescentHi)
            return tables_->gamma_descent.slope((s - kGammaPlateauHi) / kGammaDescentWidth);
        return -coefficient_
             * tables_->gamma_lobe.slope((s - kGammaDescentHi) / kGammaLobeWidth);
    }
    }
    return 0.0;
}

double Profile::eval(double t, Order order, Side side) const
{
    switch (order) {
    case Order::value: return value(t, side);
    case Order::d1: return d1(t, side);
    case Order::d2: return d2(t, side);
    case Order::antiderivative: return antiderivative(t);
    }
    return 0.0;
}

double Profile::sup_abs(Order order) const
{
    switch (order) {
    case Order::value: return sup_[0];
    case Order::d1: return sup_[1];
    case Order::d2: return sup_[2];
    case Order::antiderivative: break;
    }
    throw InvalidParameter("sup_abs: antiderivative norm not tracked");
}

double Profile::plus_value(double t, Side side) const
{
    if (t < kGammaJump) return 0.0;
    if (t == kGammaJump) return side == Side::right ? 1.0 : 0.0;
    if (t <= kGammaPlateauHi) return 1.0;
    if (t < kGammaDescentHi) return 1.0 - smooth_step((t - kGammaPlateauHi) / kGammaDescentWidth);
    if (t < kGammaLobeHi) return -coefficient_ * bump((t - kGammaDescentHi) / kGammaLobeWidth);
    return 0.0;
}

double Profile::plus_d1(double t, Side side) const
{
    if (t == kGammaJump && side == Side::none)
        throw OneSidedOnly("gamma profile derivative at 1/2 needs a side");
    if (t <= kGammaPlateauHi || t >= kGammaLobeHi) return 0.0;
    if (t < kGammaDescentHi)
        return -smooth_step_d1((t - kGammaPlateauHi) / kGammaDescentWidth) / kGammaDescentWidth;
    return -coefficient_ * bump_d1((t - kGammaDescentHi) / kGammaLobeWidth) / kGammaLobeWidth;
}

double Profile::plus_d2(double t, Side side) const
{
    if (t == kGammaJump && side == Side::none)
        throw OneSidedOnly("gamma profile derivative at 1/2 needs a side");
    if (t <= kGammaPlateauHi || t >= kGammaLobeHi) return 0.0;
    if (t < kGammaDescentHi)
        return -smooth_step_d2((t - kGammaPlateauHi) / kGammaDescentWidth)
             / (kGammaDescentWidth * kGammaDescentWidth);
    return -coefficient_ * bump_d2((t - kGammaDescentHi) / kGammaLobeWidth)
         / (kGammaLobeWidth * kGammaLobeWidth);
}

double Profile::plus_antiderivative(double t) const
{
    if (t <= kGammaJump || t >= kGammaLobeHi) return 0.0;
    if (t <= kGammaPlateauHi) return t - kGammaJump;
    const auto& descent = tables_->gamma_descent;
    double head = kGammaPlateauHi - kGammaJump;
    if (t < kGammaDescentHi)
        return head + kGammaDescentWidth * descent((t - kGammaPlateauHi) / kGammaDescentWidth);
    return head + kGammaDescentWidth * descent.total()
         - coefficient_ * kGammaLobeWidth
               * tables_->gamma_lobe((t - kGammaDescentHi) / kGammaLobeWidth);
}

void Profile::compute_sup_norms()
{
    constexpr int n = 1 << 15;
    sup_[0] = sup_[1] = sup_[2] = 0.0;
    for (int i = 0; i <= n; ++i) {
        double t = static_cast<double>(i) / n;
        sup_[0] = std::max(sup_[0], std::abs(value(t, Side::right)));
        sup_[1] = std::max(sup_[1], std::abs(d1(t, Side::right)));
        sup_[2] = std::max(sup_[2], std::abs(d2(t, Side::right)));
    }
}

// ---------------------------------------------------------------------------
// ProfileSet

ProfileSet ProfileSet::calibrate(double quadrature_tolerance)
{
    if (!(quadrature_tolerance > 0.0))
        throw InvalidParameter("calibrate_profiles: tolerance must be positive");

    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto integrate = [&](auto f) {
        double err = 0.0;
        double value = GK::integrate(f, 0.0, 1.0, 20, quadrature_tolerance, &err);
        if (!(err <= quadrature_tolerance)) {
            throw CalibrationError("profile calibration quadrature did not converge", err);
        }
        return value;
    };

    const double step_mass = integrate([](double v) { return smooth_step(v); });
    const double bump_mass = integrate([](double v) { return bump(v); });

    // eta: each shoulder of width 1/8 must carry (1 - 1/4)/2 = 3/8.
    const double eta_c = (3.0 - step_mass) / bump_mass;
    // gamma_plus: plateau 1/8 plus descent (1/16)(1 - step_mass) cancelled
    // by the negative lobe of width 9/32.
    const double gamma_c =
        (kGammaPlateauHi - kGammaJump + kGammaDescentWidth * (1.0 - step_mass))
        / (kGammaLobeWidth * bump_mass);

    auto rise = [eta_c](double v) { return smooth_step(v) + eta_c * bump(v); };
    auto rise_d = [eta_c](double v) { return smooth_step_d1(v) + eta_c * bump_d1(v); };
    auto descent = [](double v) { return 1.0 - smooth_step(v); };
    auto descent_d = [](double v) { return -smooth_step_d1(v); };

    auto tables = std::make_shared<const Profile::Tables>(Profile::Tables{
        eta_c, gamma_c,
        AntiderivativeTable(rise, rise_d),
        AntiderivativeTable(descent, descent_d),
        AntiderivativeTable([](double v) { return bump(v); }, [](double v) { return bump_d1(v); }),
    });

    return ProfileSet(Profile(ProfileKind::eta, eta_c, tables),
                      Profile(ProfileKind::gamma_plus, gamma_c, tables),
                      Profile(ProfileKind::gamma_minus, gamma_c, tables),
                      quadrature_tolerance);
}

const Profile& ProfileSet::get(ProfileKind kind) const
{
    switch (kind) {
    case ProfileKind::eta: return eta_;
    case ProfileKind::gamma_plus: return gamma_plus_;
    case ProfileKind::gamma_minus: return gamma_minus_;
    }
    return eta_;
}

void write_profile_csv(std::ostream& os, const ProfileSet& profiles, int samples)
{
    if (samples < 2) throw InvalidParameter("write_profile_csv: need at least 2 samples");
    os << "profile,t,value,d1,d2,antiderivative\n";
    os.precision(17);
    for (auto kind : {ProfileKind::eta, ProfileKind::gamma_plus, ProfileKind::gamma_minus}) {
        const Profile& p = profiles.get(kind);
        for (int i = 0; i < samples; ++i) {
            double t = static_cast<double>(i) / (samples - 1);
            os << to_string(kind) << ',' << t << ',' << p.value(t, Side::right) << ','
               << p.d1(t, Side::right) << ',' << p.d2(t, Side::right) << ','
               << p.antiderivative(t) << '\n';
        }
    }
}

} // namespace dtwist
