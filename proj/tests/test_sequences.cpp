#include <doctest.h>

#include "dtwist/errors.hpp"
#include "dtwist/profiles.hpp"
#include "dtwist/sequences.hpp"

#include <cmath>
#include <sstream>

using namespace dtwist;

namespace {

const GapSequences& defaults()
{
    static const GapSequences g = build_sequences(SeqParams{});
    return g;
}

// Brute force over |k| <= 10^7 with the midpoint-rule tail.
double oracle_normalizer(double C, double delta)
{
    const long N = 10000000;
    long double side = 0.0L;
    for (long k = N; k >= 1; --k) {
        double x = k + C;
        side += 1.0L / (x * std::pow(std::log(x), 1.0 + delta));
    }
    double mid = N + 0.5 + C;
    long double tail = 1.0 / (delta * std::pow(std::log(mid), delta));
    double x0 = C;
    long double center = 1.0 / (x0 * std::pow(std::log(x0), 1.0 + delta));
    return static_cast<double>(center + 2.0L * (side + tail));
}

} // namespace

TEST_CASE("gap lengths")
{
    const auto& g = defaults();
    CHECK(g.ell[5] == g.ell[-5]);
    const double C = 100.0;
    CHECK(g.ell[0] * C * std::pow(std::log(C), 1.5) / g.a_C == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.ell.contains(501));
    CHECK(g.ell.contains(-501));
    CHECK(g.residual_mass > 0.0);
    CHECK(g.residual_mass < 1.0);
    for (long k = 1; k <= g.M; ++k) CHECK(g.ell[k] < g.ell[k - 1]);
}

TEST_CASE("normalizer against brute-force summation")
{
    const auto& g = defaults();
    double S = oracle_normalizer(100.0, 0.5);
    CHECK(std::abs(g.normalizer_sum - S) / S < 1e-10);
    CHECK(std::abs(g.a_C * S - 1.0) < 1e-10);
    // recorded from the oracle
    CHECK(g.a_C == doctest::Approx(0.536493).epsilon(1e-5));
}

TEST_CASE("divergent series rejected")
{
    SeqParams p;
    p.delta = 0.0;
    CHECK_THROWS_AS(build_gap_lengths(p), InvalidParameter);
    p.delta = -0.5;
    CHECK_THROWS_AS(build_gap_lengths(p), InvalidParameter);
    SeqParams q;
    q.bigC = 5.0;
    CHECK_THROWS_AS(build_gap_lengths(q), InvalidParameter);
    SeqParams r;
    r.truncation_M = 4;
    CHECK_THROWS_AS(build_gap_lengths(r), InvalidParameter);
}

TEST_CASE("ratio sequences")
{
    const auto& g = defaults();
    for (long n = 1; n <= g.M; ++n) {
        CHECK(g.K[n] < 0.0);
        CHECK(g.K[-n] > 0.0);
        CHECK(g.K[n] == g.ell[n + 1] / g.ell[n] - 1.0);
    }
    GapSequences h = build_gap_lengths(SeqParams{});
    build_ratio_sequences(h);
    CHECK_FALSE(h.m1_adjusted.has_value());
    CHECK(h.m[3] == 1.0 + h.K[3] + 1.0 / (1.0 + h.K[2]));
}

TEST_CASE("m tends to 2 for large C")
{
    SeqParams p;
    p.bigC = 1e4;
    GapSequences g = build_gap_lengths(p);
    build_ratio_sequences(g);
    double dev = 0.0;
    double k2 = 0.0;
    for (long k = -g.M - 1; k <= g.M; ++k) {
        k2 = std::max(k2, g.K[k] * g.K[k]);
        if (k + 1 != 0) dev = std::max(dev, std::abs(g.m[k + 1] - 2.0));
    }
    CHECK(dev <= 10.0 * k2);
    // m_0 is the exception: symmetric lengths make m_0 - 2 = 2 K_0 exactly
    CHECK(std::abs(g.m[0] - 2.0 - 2.0 * g.K[0]) < 1e-15);
}

TEST_CASE("seeds")
{
    const auto& g = defaults();
    const double K0 = g.K[0];
    const double K1 = g.K[1];
    CHECK(g.alpha1 == doctest::Approx(0.5 * std::abs(K1)).epsilon(1e-15));
    CHECK(g.alpha0 < 0.0);
    CHECK(head_relation_alpha0(K0, 0.0) == 0.0);

    // bisection on 1/(1 + K0 + a) = 1/(1 + K0) + alpha1
    double lo = -0.5;
    double hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double r = 1.0 / (1.0 + K0 + mid) - 1.0 / (1.0 + K0) - g.alpha1;
        (r > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(g.alpha0 - 0.5 * (lo + hi)) < 1e-15);
    CHECK(*g.m1_adjusted == doctest::Approx(1.0 / (1.0 + K0) + 1.0 + K1 + g.alpha1).epsilon(1e-15));

    SeqParams p;
    p.alpha1_policy = Alpha1Policy::explicit_value;
    p.alpha1_value = 0.0;
    CHECK_THROWS_AS(build_sequences(p), InvalidParameter);
    p.alpha1_value = 1.0;
    CHECK_THROWS_AS(build_sequences(p), InvalidParameter);
    p.alpha1_value = 1e-3;
    CHECK_NOTHROW(build_sequences(p));
}

TEST_CASE("zero seed reproduces K")
{
    GapSequences g = build_gap_lengths(SeqParams{});
    build_ratio_sequences(g);
    AlphaSeeds zero{0.0, head_relation_alpha0(g.K[0], 0.0), 1.0 / (1.0 + g.K[0]) + 1.0 + g.K[1]};
    extend_alphas(g, zero);
    double worst = 0.0;
    for (long k = 1; k <= g.M; ++k) worst = std::max(worst, std::abs(g.beta[k] - g.K[k]));
    CHECK(worst <= 1e-12);
    for (long k = -g.M; k <= 0; ++k) CHECK(std::abs(g.beta[k] - g.K[k]) <= 1e-12);
}

TEST_CASE("recurrence and signs")
{
    const auto& g = defaults();
    CHECK(recurrence_residual(g) <= 1e-13);
    for (long n = 1; n <= g.M; ++n) CHECK(g.alpha[n] > 0.0);
    for (long n = 0; n <= g.M; ++n) CHECK(g.alpha[-n] < 0.0);
    for (long k = -g.M; k <= g.M; ++k) {
        CHECK(1.0 + g.beta[k] > 0.0);
        CHECK(g.beta[k] == doctest::Approx(g.K[k] + g.alpha[k]).epsilon(1e-12));
    }
    // independent forward iteration
    double b = g.K[1] + g.alpha1;
    for (long k = 1; k < 5; ++k) b = g.m[k + 1] - 1.0 / (1.0 + b) - 1.0;
    CHECK(g.beta[5] == b);
    // recorded regression value
    CHECK(g.beta[5] == doctest::Approx(-0.0054583836266697272).epsilon(1e-12));
}

TEST_CASE("backward sweep breakdown")
{
    // admissible seeds always give alpha_0 < 0, which keeps the backward
    // sweep inside its domain; force 1 + beta_0 > m_0 with a bad seed
    GapSequences g = build_gap_lengths(SeqParams{});
    build_ratio_sequences(g);
    try {
        extend_alphas(g, AlphaSeeds{0.01, 1.5, 2.0});
        FAIL("expected a construction failure");
    } catch (const ConstructionError& e) {
        CHECK(e.index == -1);
    }
}

TEST_CASE("estimate report")
{
    const auto& g = defaults();
    ProfileSet P = ProfileSet::calibrate(1e-13);
    EstimateReport r = verify_sequence_estimates(g, SeqParams{}, P);
    for (const auto& c : r.checks) {
        INFO(c.name << " measured " << c.measured << " bound " << c.bound);
        CHECK(c.pass);
    }
    CHECK(r.all_pass());
    const auto& ks = r.find("K_scaled_upper");
    CHECK(ks.measured >= 0.5);
    CHECK(ks.measured <= 5.0);
    CHECK(r.find("beta_upper").measured <= 10.0);
    CHECK(r.find("K2_over_ell_decay").measured < 1.0);
    CHECK(std::isfinite(r.A_constant));
    CHECK(r.positivity_margin > 0.0);

    nlohmann::json j = r;
    CHECK(j["pass"] == true);
    CHECK(j["checks"].size() == r.checks.size());
}

TEST_CASE("sequence csv")
{
    GapSequences g = build_sequences([] { SeqParams p; p.truncation_M = 8; return p; }());
    std::ostringstream os;
    write_sequence_csv(os, g);
    std::string s = os.str();
    CHECK(s.rfind("k,ell,K,m,alpha,beta\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 17);
}
