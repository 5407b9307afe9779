#include <doctest.h>

#include "dtwist/errors.hpp"
#include "dtwist/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace dtwist;

namespace {

const ProfileSet& profiles()
{
    static const ProfileSet set = ProfileSet::calibrate(1e-13);
    return set;
}

double integrate(const Profile& p, double a, double b)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    return GK::integrate([&](double t) { return p.value(t, Side::right); }, a, b, 15, 1e-14);
}

} // namespace

TEST_CASE("smooth step tails and symmetry")
{
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(2.5) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(smooth_step(0.3) + smooth_step(0.7) - 1.0) < 1e-14);
    // strictly increasing where sigma is representable: exp(-1/s) underflows
    // below s ~ 0.0014 and sigma rounds to 1 above s ~ 0.97
    double prev = 0.0;
    for (int i = 10; i < 950; ++i) {
        double s = smooth_step(i / 1000.0);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("smooth step derivatives against finite differences")
{
    const double h = 1e-5;
    for (double s = 0.05; s < 0.96; s += 0.01) {
        double fd1 = (smooth_step(s + h) - smooth_step(s - h)) / (2 * h);
        double fd2 = (smooth_step_d1(s + h) - smooth_step_d1(s - h)) / (2 * h);
        CHECK(smooth_step_d1(s) == doctest::Approx(fd1).epsilon(1e-5));
        CHECK(smooth_step_d2(s) == doctest::Approx(fd2).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("defining values of the profiles")
{
    const auto& P = profiles();
    CHECK(P.eta().value(0.5) == 1.0);
    CHECK(P.eta().value(0.375) == 1.0);
    CHECK(P.eta().value(0.625) == 1.0);
    CHECK(P.gamma_plus().value(0.55) == 1.0);
    CHECK(P.gamma_plus().value(0.625) == 1.0);
    CHECK(P.gamma_minus().value(0.4) == 1.0);
    CHECK(P.gamma_plus().value(0.3) == 0.0);
    CHECK(P.gamma_minus().value(0.7) == 0.0);
}

TEST_CASE("calibration constants")
{
    const auto& P = profiles();
    // sigma and the shoulder bump both integrate to 1/2, so the
    // coefficients are 5 and 10/9.
    CHECK(P.eta().shoulder_coefficient() > 0.0);
    CHECK(P.eta().shoulder_coefficient() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(P.gamma_plus().shoulder_coefficient() > 0.0);
    CHECK(P.gamma_plus().shoulder_coefficient() == doctest::Approx(10.0 / 9.0).epsilon(1e-12));

    ProfileSet coarse = ProfileSet::calibrate(1e-10);
    CHECK(std::abs(coarse.eta().shoulder_coefficient() - P.eta().shoulder_coefficient()) < 1e-10);
    CHECK(std::abs(coarse.gamma_plus().shoulder_coefficient()
                   - P.gamma_plus().shoulder_coefficient())
          < 1e-10);

    ProfileSet again = ProfileSet::calibrate(1e-13);
    CHECK(again.eta().shoulder_coefficient() == P.eta().shoulder_coefficient());
    CHECK(again.gamma_plus().antiderivative(0.8) == P.gamma_plus().antiderivative(0.8));

    CHECK_THROWS_AS(ProfileSet::calibrate(0.0), InvalidParameter);
}

TEST_CASE("integral constraints")
{
    const auto& P = profiles();
    CHECK(std::abs(P.eta().antiderivative(1.0) - 1.0) < 1e-12);
    CHECK(std::abs(P.gamma_plus().antiderivative(1.0)) < 1e-12);
    CHECK(std::abs(P.gamma_minus().antiderivative(1.0)) < 1e-12);

    // independent quadrature of the pointwise values
    double eta_mass = integrate(P.eta(), 0.25, 0.375) + 0.25 + integrate(P.eta(), 0.625, 0.75);
    CHECK(std::abs(eta_mass - 1.0) < 1e-12);
    double gp = 0.125 + integrate(P.gamma_plus(), 0.625, 0.6875)
              + integrate(P.gamma_plus(), 0.6875, 1.0);
    CHECK(std::abs(gp) < 1e-12);
}

TEST_CASE("gamma_plus has a negative lobe")
{
    const auto& P = profiles();
    double v = P.gamma_plus().value(0.95);
    CHECK(v < 0.0);
    // B((0.95 - 11/16) * 32/9) with the calibrated scale
    double u = (0.95 - 0.6875) * 32.0 / 9.0;
    double bump = u <= 0.5 ? smooth_step(2 * u) : smooth_step(2 - 2 * u);
    CHECK(v == doctest::Approx(-P.gamma_plus().shoulder_coefficient() * bump).epsilon(1e-14));
    auto [lo, hi] = P.gamma_plus().support_bounds();
    CHECK(lo == 0.5);
    CHECK(hi <= 1.0);
}

TEST_CASE("symmetries")
{
    const auto& P = profiles();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double t = U(rng);
        CHECK(std::abs(P.eta().value(t) - P.eta().value(1.0 - t)) <= 1e-14);
        if (t != 0.5) CHECK(P.gamma_minus().value(t) == P.gamma_plus().value(1.0 - t));
    }
    for (int i = 0; i <= 10000; ++i) {
        double t = i / 10000.0;
        CHECK(P.eta().value(t) >= 0.0);
        if (t <= 0.25 || t >= 0.75) CHECK(P.eta().value(t) == 0.0);
    }
}

TEST_CASE("one-sided derivatives at the jump")
{
    const auto& P = profiles();
    CHECK_THROWS_AS(P.gamma_plus().d1(0.5), OneSidedOnly);
    CHECK_THROWS_AS(P.gamma_minus().d2(0.5), OneSidedOnly);
    CHECK_NOTHROW(P.gamma_plus().d1(0.5, Side::left));
    CHECK(P.gamma_plus().value(0.5, Side::left) == 0.0);
    CHECK(P.gamma_plus().value(0.5, Side::right) == 1.0);
    CHECK(P.gamma_minus().value(0.5, Side::left) == 1.0);
    CHECK(P.gamma_minus().value(0.5, Side::right) == 0.0);
}

TEST_CASE("derivatives agree with finite differences on the smooth pieces")
{
    const auto& P = profiles();
    const double h = 1e-5;
    for (auto kind : {ProfileKind::eta, ProfileKind::gamma_plus, ProfileKind::gamma_minus}) {
        const Profile& p = P.get(kind);
        const double s1 = p.sup_abs(Order::d1);
        const double s2 = p.sup_abs(Order::d2);
        for (int i = 1; i < 1000; ++i) {
            double t = i / 1000.0;
            if (std::abs(t - 0.5) < 2 * h) continue;
            // Richardson-extrapolated central differences with step h and h/2
            auto central = [&](auto f, double step) { return (f(t + step) - f(t - step)) / (2 * step); };
            auto v = [&](double x) { return p.value(x); };
            auto d = [&](double x) { return p.d1(x); };
            double fd1 = (4 * central(v, h / 2) - central(v, h)) / 3;
            double fd2 = (4 * central(d, h / 2) - central(d, h)) / 3;
            // relative error; near the flat ends the scale is floored at 1% of the sup norm
            CHECK(std::abs(p.d1(t) - fd1) <= 1e-5 * std::max(std::abs(fd1), 1e-2 * s1));
            CHECK(std::abs(p.d2(t) - fd2) <= 1e-5 * std::max(std::abs(fd2), 1e-2 * s2));
        }
    }
}

TEST_CASE("antiderivative slope recovers the profile")
{
    const auto& P = profiles();
    for (auto kind : {ProfileKind::eta, ProfileKind::gamma_plus, ProfileKind::gamma_minus}) {
        const Profile& p = P.get(kind);
        for (int i = 0; i <= 4000; ++i) {
            double t = i / 4000.0 + 1.3e-5;
            if (t >= 1.0) break;
            CHECK(std::abs(p.antiderivative_slope(t) - p.value(t, Side::right)) < 1e-9);
        }
    }
}

TEST_CASE("antiderivative against independent quadrature")
{
    const auto& P = profiles();
    for (double t : {0.3, 0.34, 0.7, 0.73}) {
        double ref = t < 0.5 ? integrate(P.eta(), 0.25, t) : 1.0 - integrate(P.eta(), t, 0.75);
        CHECK(std::abs(P.eta().antiderivative(t) - ref) < 1e-12);
    }
    for (double t : {0.65, 0.68, 0.7, 0.8, 0.9, 0.95}) {
        double ref = 0.125 + integrate(P.gamma_plus(), 0.625, t);
        CHECK(std::abs(P.gamma_plus().antiderivative(t) - ref) < 1e-12);
    }
    CHECK(P.eta().antiderivative(0.5) == 0.5);
    CHECK(P.gamma_plus().antiderivative(0.6) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("profile csv")
{
    std::ostringstream os;
    write_profile_csv(os, profiles(), 11);
    std::string s = os.str();
    CHECK(s.rfind("profile,t,value,d1,d2,antiderivative\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 33);
}
