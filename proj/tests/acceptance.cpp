// Acceptance run at the default configuration. One PASS/FAIL line per
// criterion. Exit status is 0 when the failing set equals the set named by
// --expect-fail (comma separated), so a known failure stays visible without
// hiding new ones.

#include "dtwist/app.hpp"
#include "dtwist/manifolds.hpp"
#include "dtwist/regularity.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>
#include <string>

using namespace dtwist;

namespace {

std::set<int> failed;

void line(int id, bool ok, const std::string& text)
{
    std::printf("%s %2d %s\n", ok ? "PASS" : "FAIL", id, text.c_str());
    if (!ok) failed.insert(id);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> expected;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::strcmp(argv[i], "--expect-fail") == 0) {
            std::stringstream ss(argv[i + 1]);
            std::string item;
            while (std::getline(ss, item, ',')) expected.insert(std::stoi(item));
        }
    }

    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    BuiltSystem built(cfg);
    const auto& seq = built.sequences();
    const auto& g = built.denjoy();
    const auto& sys = built.twist();
    const auto& t = built.table();
    const double C = cfg.params.bigC;

    {
        auto r = verify_invariant_curve(sys, 10000, cfg.seed);
        line(1, r.max_residual <= 1e-10,
             fmt("invariance: max residual %.2e over 10^4 mixed samples (tol 1e-10)", r.max_residual));
    }
    {
        long n = 100000;
        double worst = 0.0;
        for (double x0 : {0.0, 1.0 / 3.0, 0.71})
            worst = std::max(worst, std::abs(rotation_number_estimate(g, x0, n) - cfg.params.omega));
        line(2, worst < 1.0 / n, fmt("rotation number: max |rho_n - omega| %.2e at n = 1e5, three starts (tol 1e-5)", worst));
    }
    {
        bool signs = true;
        for (long k = 1; k <= seq.M; ++k) signs = signs && seq.alpha[k] > 0.0;
        for (long k = 0; k <= seq.M; ++k) signs = signs && seq.alpha[-k] < 0.0;
        double bmax = 0.0;
        for (long k = 1; k <= seq.M; ++k) bmax = std::max(bmax, seq.beta[k] * (k + C));
        double res = recurrence_residual(seq);
        line(3, signs && bmax <= 10.0 && res <= 1e-13,
             std::string("alpha signs ") + (signs ? "ok" : "BAD") +
                 fmt("; max beta_n (n + C) %.3f (<= 10); recurrence residual %.2e (tol 1e-13)", bmax, res));
    }
    {
        double z = zero_seed_deviation(seq);
        line(4, z <= 1e-12, fmt("zero seed: max |beta_k - K_k| %.2e (tol 1e-12)", z));
    }
    {
        auto r = phi_linearity_check(sys, seq);
        line(5, r.max_deviation <= 1e-11 && r.max_slope_error <= 1e-10,
             fmt("phi on J_k: affine deviation %.2e (tol 1e-11), slope error %.2e (tol 1e-10)", r.max_deviation,
                 r.max_slope_error));
    }
    {
        auto it = manifold_iterate_check(sys, 50);
        auto side = curve_side_check(sys);
        bool ok = it.max_deviation <= 1e-10 && it.max_ratio_error <= 1e-10 && side.stable_error <= 1e-12 &&
                  side.strict && side.zone_below && side.stable_min_gap > 0.0;
        line(6, ok,
             fmt("segments: deviation %.2e, ratio error %.2e (tol 1e-10); side error %.2e (tol 1e-12), min gap %.2e > 0",
                 it.max_deviation, it.max_ratio_error, side.stable_error, side.stable_min_gap));
    }
    {
        auto base = second_derivative_scan(g);
        RunConfig big = cfg;
        big.params.bigC = 1e4;
        BuiltSystem other(big);
        auto r2 = second_derivative_scan(other.denjoy());
        double ratio = base.global_sup / r2.global_sup;
        double bulk = base.bulk_sup / r2.bulk_sup;
        bool ok = base.decays() && base.max_fd_error <= 1e-6 && base.max_term_sum_error <= 1e-6 && ratio >= 5.0;
        line(7, ok,
             fmt("regularity: outer/inner sup %.3g, term-sum vs FD %.2e (tol 1e-6), C=1e4 global sup ratio %.3f (need >= 5)",
                 base.outer_max / base.inner_max, base.max_fd_error, ratio) +
                 fmt("; head gaps 0,1 sup %.3g -> %.3g, bulk ratio %.1f", base.head_sup, r2.head_sup, bulk));
    }
    {
        auto scan = derivative_jump_table(g, 10000);
        double err = 0.0;
        for (const auto& row : scan.midpoints) err = std::max(err, std::abs(row.jump - g.diffeo(row.k).midpoint_jump()));
        bool ok = err <= 1e-14 && scan.max_offmidpoint_jump <= 1e-8 && scan.max_endpoint_slope_error <= 1e-8;
        line(8, ok,
             fmt("derivative jumps: midpoint error %.2e (tol 1e-14); off-midpoint jump %.2e, endpoint slope error %.2e on 10^4 points",
                 err, scan.max_offmidpoint_jump, scan.max_endpoint_slope_error));
    }
    {
        auto s = structural_checks(sys, cfg.seed, 1000);
        bool ok = s.inverse_residual <= 1e-12 && s.det_deviation <= 1e-9 && s.translation_exact && s.conjugacy <= 1e-10;
        line(9, ok,
             fmt("structural: inverse %.2e (1e-12), |det - 1| %.2e (1e-9), conjugacy %.2e (1e-10)", s.inverse_residual,
                 s.det_deviation, s.conjugacy) +
                 (s.translation_exact ? ", vertical translation exact" : ", vertical translation NOT exact"));
    }
    {
        auto a = run_command(Command::verify, cfg, false);
        auto b = run_command(Command::verify, cfg, false);
        bool same = canonical_report(a.report) == canonical_report(b.report);
        line(10, same && a.exit_code == 0,
             std::string("determinism: two verify runs ") + (same ? "identical" : "DIFFER") +
                 ", exit code " + std::to_string(a.exit_code));
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%zu of 10 criteria pass, %.1f s\n", 10 - failed.size(), secs);
    if (!expected.empty()) std::printf("expected failures: %zu listed\n", expected.size());
    return failed == expected ? 0 : 1;
}
