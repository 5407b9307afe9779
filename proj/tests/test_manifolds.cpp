#include <doctest.h>

#include "dtwist/circle.hpp"
#include "dtwist/errors.hpp"
#include "dtwist/manifolds.hpp"
#include "fixture.hpp"

#include <cmath>
#include <sstream>

using namespace dtwist;

TEST_CASE("base segments")
{
    const auto& b = fixture::defaults();
    TwistSystem sys(b.map);
    const GapTable& t = b.table;
    ManifoldSegment s1 = manifold_segment(sys, 1, SegmentKind::stable);
    double w = t.ell(1) / 8.0;
    double slope = t.ell(2) / t.ell(1) - 1.0;
    double base = positive_turn(t.mu(2) - t.mu(1));
    AnnulusPoint lo = s1.param(-1.0), hi = s1.param(1.0);
    CHECK(lo.theta == doctest::Approx(t.mu(1) - w).epsilon(1e-15));
    CHECK(hi.theta == doctest::Approx(t.mu(1) + w).epsilon(1e-15));
    CHECK(lo.r == doctest::Approx(base - slope * w).epsilon(1e-15));
    CHECK(hi.r == doctest::Approx(base + slope * w).epsilon(1e-15));
    // base point lies on Gamma
    CHECK(std::abs(sys.curve(t.mu(1)) - s1.base_r) < 1e-15);

    // the half with x <= mu_1 lies on Gamma
    for (int i = 0; i <= 16; ++i) {
        double x = t.mu(1) - w * i / 16.0;
        CHECK(std::abs(sys.curve(x) - s1.height(x)) <= 1e-11);
    }
    CHECK_THROWS_AS(manifold_segment(sys, 0, SegmentKind::stable), InvalidParameter);
    CHECK_THROWS_AS(manifold_segment(sys, 1, SegmentKind::unstable), InvalidParameter);
    CHECK_THROWS_AS(manifold_segment(sys, b.seq.M, SegmentKind::stable), InvalidParameter);

    RigidRotation rot(b.params.omega);
    TwistSystem flat(rot);
    CHECK_THROWS_AS(manifold_segment(flat, 1, SegmentKind::stable), InvalidParameter);
}

TEST_CASE("extended family")
{
    TwistSystem sys(fixture::defaults().map);
    auto fam = extend_family(sys, 3);
    REQUIRE(fam.size() == 6);

    // k = 0 stable member is f^{-1} applied to the S~_1 markers
    ManifoldSegment s1 = manifold_segment(sys, 1, SegmentKind::stable);
    const MarkerTriple& m0 = fam[0];
    CHECK(m0.k == 0);
    CHECK(m0.kind == SegmentKind::stable);
    AnnulusPoint lo = sys.backward(s1.param(-1.0));
    AnnulusPoint hi = sys.backward(s1.param(1.0));
    CHECK(m0.lo.theta == lo.theta);
    CHECK(m0.hi.r == hi.r);
    CHECK(m0.in_linear_band);
    CHECK(m0.collinearity <= 1e-15);

    for (const auto& m : fam) {
        if (m.kind == SegmentKind::unstable && m.k == 1) CHECK(m.in_linear_band);
        if (m.in_linear_band) CHECK(m.collinearity <= 1e-15);
    }
    // the middle marker tracks the base point orbit
    const GapTable& t = fixture::defaults().table;
    CHECK(circle_dist(m0.mid.theta, t.mu(0)) < 1e-15);
    CHECK(circle_dist(fam[3].mid.theta, t.mu(1)) < 1e-15);
}

TEST_CASE("segments map onto segments")
{
    TwistSystem sys(fixture::defaults().map);
    auto r = manifold_iterate_check(sys, 50);
    CHECK(r.rows.size() == 100);
    CHECK(r.max_deviation <= 1e-10);
    CHECK(r.max_ratio_error <= 1e-10);
    CHECK(r.max_base_error <= 1e-15);
    CHECK(r.max_band_excess <= 1e-15);
    const GapTable& t = fixture::defaults().table;
    for (const auto& row : r.rows) {
        if (row.kind == SegmentKind::stable && row.k == 3)
            CHECK(std::abs(row.ratio - t.ell(4) / t.ell(3)) <= 1e-10);
        if (row.kind == SegmentKind::unstable && row.k == -2)
            CHECK(std::abs(row.ratio - t.ell(-3) / t.ell(-2)) <= 1e-10);
    }
    CHECK_THROWS_AS(manifold_iterate_check(sys, fixture::defaults().seq.M), InvalidParameter);
}

TEST_CASE("curve side")
{
    const auto& b = fixture::defaults();
    TwistSystem sys(b.map);
    auto r = curve_side_check(sys);
    CHECK(r.stable_error <= 1e-12);
    CHECK(r.unstable_error <= 1e-12);
    CHECK(r.on_curve_error <= 1e-11);
    CHECK(r.strict);
    CHECK(r.zone_below);
    CHECK(r.stable_min_gap > 0.0);

    const GapTable& t = b.table;
    ManifoldSegment s1 = manifold_segment(sys, 1, SegmentKind::stable);
    double x = t.mu(1) + t.ell(1) / 16.0;
    double gap = sys.curve(x) - s1.height(x);
    CHECK(gap == doctest::Approx(b.seq.alpha1 * t.ell(1) / 16.0).epsilon(1e-9));
    CHECK(std::abs(sys.curve(t.mu(1)) - s1.height(t.mu(1))) < 1e-15);
}

TEST_CASE("curve side with exchanged profiles")
{
    SeqParams p;
    p.swap_gamma = true;
    fixture::Built b(p);
    TwistSystem sys(b.map);
    auto r = curve_side_check(sys);
    CHECK(r.stable_error <= 1e-12);
    CHECK(r.unstable_error <= 1e-12);
    CHECK(r.strict);
    CHECK_FALSE(r.zone_below);
    CHECK(r.stable_max_gap < 0.0);
    CHECK(r.unstable_max_gap < 0.0);
}

TEST_CASE("orbit convergence")
{
    const auto& b = fixture::defaults();
    TwistSystem sys(b.map);
    auto r = orbit_convergence_check(sys, 0.7, 20);
    REQUIRE(r.rows.size() == 21);
    CHECK(r.rows[1].ratio == doctest::Approx(b.table.ell(2) / b.table.ell(1)).epsilon(1e-6));
    // telescoping product of ell_{j+1}/ell_j from j = 1 to 20
    double prod = 1.0;
    for (long j = 1; j <= 20; ++j) prod *= b.seq.ell[j + 1] / b.seq.ell[j];
    CHECK(r.rows[20].ratio == doctest::Approx(prod).epsilon(1e-6));
    CHECK(r.max_relative_error <= 1e-6);

    auto z = orbit_convergence_check(sys, 0.0, 10);
    for (const auto& row : z.rows) CHECK(row.distance == 0.0);
}

TEST_CASE("segment csv")
{
    TwistSystem sys(fixture::defaults().map);
    std::ostringstream os;
    write_segment_csv(os, sys, 3, 5);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "kind,k,theta,r");
    long rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 6 * 5);
}
