#include <doctest.h>

#include "dtwist/circle.hpp"
#include "dtwist/errors.hpp"
#include "dtwist/twist_map.hpp"
#include "fixture.hpp"

#include <cmath>
#include <sstream>

using namespace dtwist;

namespace {

// g^{-1}(x) by bisection on the monotone lift, carried in long double.
long double inverse_lift_bisect(const CircleMap& g, double x)
{
    long double lo = x - 1.0L, hi = x;
    for (int i = 0; i < 200 && hi - lo > 0; ++i) {
        long double mid = 0.5L * (lo + hi);
        if (static_cast<long double>(g.lift(static_cast<double>(mid))) < x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5L * (lo + hi);
}

} // namespace

TEST_CASE("phi against a bisection oracle in gap 7")
{
    const auto& b = fixture::defaults();
    TwistSystem sys(b.map);
    const GapTable& t = b.table;
    for (int i = 1; i < 32; ++i) {
        double x = t.lambda(7) + t.ell(7) * i / 32.0;
        long double oracle = static_cast<long double>(b.map.lift(x)) + inverse_lift_bisect(b.map, x) - 2.0L * x;
        CHECK(std::abs(sys.phi(x) - static_cast<double>(oracle)) < 1e-13);
    }
}

TEST_CASE("rigid rotation gives the integrable twist")
{
    RigidRotation rot(fixture::defaults().params.omega);
    TwistSystem sys(rot);
    CHECK_FALSE(sys.has_gaps());
    CHECK_THROWS_AS(sys.denjoy(), InvalidParameter);
    for (double x : {0.0, 0.1, 0.37, 0.999})
        CHECK(sys.phi(x) == 0.0);
    auto inv = verify_invariant_curve(sys, 300, 7);
    CHECK(inv.max_residual == 0.0);
    CHECK(sys.curve(0.3) == rot.displacement(0.3));

    auto lin = phi_linearity_check(sys, fixture::defaults().table);
    CHECK(lin.max_deviation == 0.0);
    CHECK(lin.max_slope_error == 0.0);
}

TEST_CASE("invariant curve")
{
    TwistSystem sys(fixture::defaults().map);
    auto r = verify_invariant_curve(sys, 3000, 11);
    CHECK(r.samples == 3000);
    CHECK(r.max_residual <= 1e-11);
    CHECK(r.max_translated_residual <= 1e-11);
    CHECK(r.max_projection_error <= 1e-11);
}

TEST_CASE("phi is affine on J_k")
{
    const auto& b = fixture::defaults();
    TwistSystem sys(b.map);
    auto r = phi_linearity_check(sys, b.seq);
    CHECK(r.rows.size() == static_cast<std::size_t>(2 * b.seq.M - 1));
    CHECK(r.max_deviation <= 1e-11);
    CHECK(r.max_slope_error <= 1e-10);
    for (const auto& row : r.rows) {
        if (row.k == 5) {
            CHECK(row.expected_slope == doctest::Approx(b.seq.m[5] - 2.0).epsilon(1e-15));
            CHECK(std::abs(row.slope - row.expected_slope) <= 1e-10);
        }
        if (row.k == 1)
            CHECK(row.expected_slope == doctest::Approx(*b.seq.m1_adjusted - 2.0).epsilon(1e-15));
    }

    // one-sided slopes at mu_k agree; k = 1 uses the adjusted m_1
    const GapTable& t = b.table;
    for (long k : {-7L, 0L, 1L, 2L, 40L}) {
        double expected = (k == 1 ? *b.seq.m1_adjusted : b.seq.m[k]) - 2.0;
        CHECK(sys.phi(t.mu(k), PhiOrder::d1_left) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(sys.phi(t.mu(k), PhiOrder::d1_right) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("structural properties")
{
    TwistSystem sys(fixture::defaults().map);
    auto s = structural_checks(sys, 5, 1000);
    CHECK(s.inverse_residual <= 1e-12);
    CHECK(s.det_deviation <= 1e-8);
    CHECK(s.twist_deviation <= 1e-8);
    CHECK(s.translation_exact);
    CHECK(s.periodicity <= 1e-12);
    CHECK(std::abs(s.phi_mean) <= 1e-10);
    CHECK(s.conjugacy <= 1e-10);

    AnnulusPoint p{0.3, 0.25};
    AnnulusPoint q = sys.forward(p);
    CHECK(q.theta == doctest::Approx(wrap01(0.55)));
    AnnulusPoint back = sys.backward(q);
    CHECK(back.theta == doctest::Approx(p.theta).epsilon(1e-14));
    CHECK(back.r == doctest::Approx(p.r).epsilon(1e-14));
}

TEST_CASE("diffusion probe records a monotone excursion series")
{
    const auto& b = fixture::defaults();
    TwistSystem sys(b.map);
    double theta0 = b.table.mu(1) + b.table.ell(1) / 16.0;
    auto d = diffusion_probe(sys, theta0, -1e-3, 20000);
    CHECK(d.steps == 20000);
    CHECK(d.max_excursion >= 1e-3);
    REQUIRE(d.series.size() >= 2);
    for (std::size_t i = 1; i < d.series.size(); ++i) {
        CHECK(d.series[i].first > d.series[i - 1].first);
        CHECK(d.series[i].second >= d.series[i - 1].second);
    }
    CHECK(d.first_crossing.size() == d.thresholds.size());
}

TEST_CASE("portrait csv")
{
    TwistSystem sys(fixture::defaults().map);
    std::ostringstream os;
    write_portrait_csv(os, sys, 3, 10, 50, 0.1);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "orbit,n,theta,r");
    long rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 50 + 3 * 11);
}
