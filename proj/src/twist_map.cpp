#include "dtwist/twist_map.hpp"

#include "dtwist/circle.hpp"
#include "dtwist/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace dtwist {

double TwistSystem::wrap(double x)
{
    return wrap01(x);
}

const DenjoyMap& TwistSystem::denjoy() const
{
    if (!denjoy_) throw InvalidParameter("operation needs the gap structure of a Denjoy map");
    return *denjoy_;
}

double TwistSystem::phi(double x, PhiOrder order) const
{
    x = wrap01(x);
    switch (order) {
    case PhiOrder::value: return g_->displacement(x) + g_->inverse_displacement(x);
    case PhiOrder::d1_left:
        return g_->derivative(x, Side::left) + g_->inverse_derivative(x, Side::left) - 2.0;
    case PhiOrder::d1_right:
        return g_->derivative(x, Side::right) + g_->inverse_derivative(x, Side::right) - 2.0;
    case PhiOrder::d2_left:
        return g_->second_derivative(x, Side::left) + g_->inverse_second_derivative(x, Side::left);
    case PhiOrder::d2_right:
        return g_->second_derivative(x, Side::right) + g_->inverse_second_derivative(x, Side::right);
    }
    return 0.0;
}

// r is split into integer and fractional parts so that integer vertical
// translations commute with f exactly.
AnnulusPoint TwistSystem::forward(AnnulusPoint p) const
{
    double base = std::floor(p.r);
    double frac = p.r - base;
    double theta = wrap01(p.theta + frac);
    return {theta, base + (frac + phi(theta))};
}

AnnulusPoint TwistSystem::backward(AnnulusPoint p) const
{
    double base = std::floor(p.r);
    double frac = p.r - base;
    double ph = phi(p.theta);
    return {wrap01(p.theta - frac + ph), base + (frac - ph)};
}

Check make_check(std::string name, double measured, double tolerance)
{
    return {std::move(name), measured, tolerance, measured <= tolerance};
}

void to_json(nlohmann::json& j, const Check& c)
{
    j = nlohmann::json{{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance},
                       {"pass", c.pass}};
}

// ---------------------------------------------------------------------------
// Invariance

InvarianceReport verify_invariant_curve(const TwistSystem& sys, long samples, std::uint64_t seed)
{
    if (samples < 1) throw InvalidParameter("verify_invariant_curve: need at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> thetas;
    thetas.reserve(static_cast<std::size_t>(samples));
    if (sys.has_gaps()) {
        const DenjoyMap& g = sys.denjoy();
        const GapTable& t = g.table();
        const long M = t.M();
        std::uniform_int_distribution<long> gap(-M, M);
        for (long i = 0; i < samples; ++i) {
            long k = gap(rng);
            switch (i % 3) {
            case 0: thetas.push_back(t.lambda(k) + U(rng) * t.ell(k)); break;
            case 1: thetas.push_back(U(rng) < 0.5 ? t.lambda(k) : t.right(k)); break;
            default: {
                // residual stretch following gap k
                long next = t.sorted()[(t.rank(k) + 1) % t.sorted().size()];
                double a = t.right(k);
                double b = t.lambda(next) + (next == t.sorted().front() ? 1.0 : 0.0);
                thetas.push_back(wrap01(a + U(rng) * (b - a)));
            }
            }
        }
    } else {
        for (long i = 0; i < samples; ++i) thetas.push_back(U(rng));
    }

    InvarianceReport r;
    r.samples = samples;
    for (double theta : thetas) {
        theta = wrap01(theta);
        double gt = sys.circle().forward(theta);
        double expected_r = sys.curve(gt);
        for (double shift : {0.0, 1.0}) {
            AnnulusPoint q = sys.forward({theta, sys.curve(theta) + shift});
            double res = std::max(circle_dist(q.theta, gt), std::abs(q.r - (expected_r + shift)));
            if (shift == 0.0) {
                if (res > r.max_residual) {
                    r.max_residual = res;
                    r.worst_theta = theta;
                }
                r.max_projection_error = std::max(r.max_projection_error, circle_dist(q.theta, gt));
            } else {
                r.max_translated_residual = std::max(r.max_translated_residual, res);
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Linearity on J_k

namespace {

struct Fit {
    double slope;
    double intercept;
    double max_deviation;
};

// Least-squares line through (x_i, y_i), x centred at 0.
Fit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n;
    double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.max_deviation = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        f.max_deviation = std::max(f.max_deviation, std::abs(y[i] - (f.intercept + f.slope * x[i])));
    return f;
}

constexpr int kLinearityPoints = 64;

LinearityRow fit_on_J(const TwistSystem& sys, const GapTable& t, long k)
{
    std::vector<double> xs(kLinearityPoints);
    std::vector<double> ys(kLinearityPoints);
    const double half = t.ell(k) / 8.0;
    for (int i = 0; i < kLinearityPoints; ++i) {
        double off = -half + 2.0 * half * i / (kLinearityPoints - 1);
        xs[static_cast<std::size_t>(i)] = off;
        ys[static_cast<std::size_t>(i)] = sys.phi(t.mu(k) + off);
    }
    Fit f = fit_line(xs, ys);
    return {k, f.slope, 0.0, f.intercept, 0.0, f.max_deviation};
}

void summarize(LinearityReport& r)
{
    for (const auto& row : r.rows) {
        r.max_deviation = std::max(r.max_deviation, row.max_deviation);
        r.max_slope_error = std::max(r.max_slope_error, std::abs(row.slope - row.expected_slope));
        r.max_intercept_error =
            std::max(r.max_intercept_error, std::abs(row.intercept - row.expected_intercept));
    }
}

} // namespace

LinearityReport phi_linearity_check(const TwistSystem& sys, const GapSequences& g)
{
    const GapTable& t = sys.denjoy().table();
    LinearityReport r;
    for (long k = -g.M + 1; k <= g.M - 1; ++k) {
        LinearityRow row = fit_on_J(sys, t, k);
        row.expected_slope = (k == 1 ? *g.m1_adjusted : g.m[k]) - 2.0;
        row.expected_intercept = circle_diff(t.mu(k + 1), t.mu(k)) + circle_diff(t.mu(k - 1), t.mu(k));
        r.rows.push_back(row);
    }
    summarize(r);
    return r;
}

LinearityReport phi_linearity_check(const TwistSystem& sys, const GapTable& t)
{
    LinearityReport r;
    for (long k = -t.M() + 1; k <= t.M() - 1; ++k) r.rows.push_back(fit_on_J(sys, t, k));
    summarize(r);
    return r;
}

// ---------------------------------------------------------------------------
// Structural checks

double phi_mean(const TwistSystem& sys)
{
    std::vector<double> cuts{0.0, 1.0};
    if (sys.has_gaps()) {
        const DenjoyMap& g = sys.denjoy();
        const GapTable& t = g.table();
        for (long k = -t.M(); k <= t.M(); ++k) {
            cuts.push_back(t.lambda(k));
            cuts.push_back(t.mu(k));
            cuts.push_back(wrap01(t.right(k)));
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    using Rule = boost::math::quadrature::gauss<double, 10>;
    long double total = 0.0L;
    auto f = [&](double x) { return sys.phi(x); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) total += Rule::integrate(f, cuts[i], cuts[i + 1]);
    }
    return static_cast<double>(total);
}

StructuralReport structural_checks(const TwistSystem& sys, std::uint64_t seed, long samples)
{
    StructuralReport s;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    for (long i = 0; i < samples; ++i) {
        AnnulusPoint p{U(rng), 4.0 * U(rng) - 2.0};
        AnnulusPoint q = sys.backward(sys.forward(p));
        s.inverse_residual = std::max({s.inverse_residual, circle_dist(q.theta, p.theta), std::abs(q.r - p.r)});
        AnnulusPoint q2 = sys.forward(sys.backward(p));
        s.inverse_residual = std::max({s.inverse_residual, circle_dist(q2.theta, p.theta), std::abs(q2.r - p.r)});
    }

    const double h = 1e-6;
    for (long i = 0; i < samples; ++i) {
        AnnulusPoint p{U(rng), U(rng)};
        AnnulusPoint tp = sys.forward({p.theta + h, p.r});
        AnnulusPoint tm = sys.forward({p.theta - h, p.r});
        AnnulusPoint rp = sys.forward({p.theta, p.r + h});
        AnnulusPoint rm = sys.forward({p.theta, p.r - h});
        double a = circle_diff(tp.theta, tm.theta) / (2 * h);
        double b = circle_diff(rp.theta, rm.theta) / (2 * h);
        double c = (tp.r - tm.r) / (2 * h);
        double d = (rp.r - rm.r) / (2 * h);
        s.det_deviation = std::max(s.det_deviation, std::abs(a * d - b * c - 1.0));
        if (i < 100) s.twist_deviation = std::max(s.twist_deviation, std::abs(b - 1.0));
    }

    s.translation_exact = true;
    for (long i = 0; i < samples; ++i) {
        // r on a dyadic grid so that r + 1 is exact
        double r = std::ldexp(std::floor(U(rng) * 1048576.0), -20);
        AnnulusPoint p{U(rng), r};
        AnnulusPoint a = sys.forward(p);
        AnnulusPoint b = sys.forward({p.theta, p.r + 1.0});
        s.translation_exact = s.translation_exact && a.theta == b.theta && a.r + 1.0 == b.r;
    }

    for (long i = 0; i < samples; ++i) {
        double x = U(rng);
        s.periodicity = std::max(s.periodicity, std::abs(sys.phi(x + 1.0) - sys.phi(x)));
    }

    s.phi_mean = phi_mean(sys);

    if (sys.has_gaps()) {
        const DenjoyMap& g = sys.denjoy();
        const GapTable& t = g.table();
        SemiConjugacy j(t);
        for (long k = -t.M(); k <= t.M() - 1; ++k) {
            s.conjugacy = std::max(s.conjugacy, circle_dist(j(g.forward(t.mu(k))), j(t.mu(k)) + t.omega()));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Diffusion probe

DiffusionReport diffusion_probe(const TwistSystem& sys, double theta0, double offset, long steps,
                                std::vector<double> thresholds)
{
    if (steps < 1) throw InvalidParameter("diffusion_probe: steps must be positive");
    DiffusionReport r;
    r.theta0 = wrap01(theta0);
    r.offset = offset;
    r.steps = steps;
    r.thresholds = std::move(thresholds);
    r.first_crossing.assign(r.thresholds.size(), -1);

    AnnulusPoint p{r.theta0, sys.curve(r.theta0) + offset};
    const long stride = std::max(1L, steps / 100);
    for (long n = 1; n <= steps; ++n) {
        p = sys.forward(p);
        double ex = std::abs(p.r - sys.curve(p.theta));
        r.max_excursion = std::max(r.max_excursion, ex);
        for (std::size_t i = 0; i < r.thresholds.size(); ++i)
            if (r.first_crossing[i] < 0 && ex > r.thresholds[i]) r.first_crossing[i] = n;
        if (n % stride == 0 || n == steps) r.series.emplace_back(n, r.max_excursion);
        if (n == steps) r.final_excursion = ex;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Output

void to_json(nlohmann::json& j, const InvarianceReport& r)
{
    j = nlohmann::json{{"samples", r.samples},
                       {"max_residual", r.max_residual},
                       {"max_translated_residual", r.max_translated_residual},
                       {"max_projection_error", r.max_projection_error},
                       {"worst_theta", r.worst_theta}};
}

void to_json(nlohmann::json& j, const LinearityReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"k", row.k},
                        {"slope", row.slope},
                        {"expected_slope", row.expected_slope},
                        {"intercept", row.intercept},
                        {"expected_intercept", row.expected_intercept},
                        {"max_deviation", row.max_deviation}});
    }
    j = nlohmann::json{{"max_deviation", r.max_deviation},
                       {"max_slope_error", r.max_slope_error},
                       {"max_intercept_error", r.max_intercept_error},
                       {"rows", rows}};
}

void to_json(nlohmann::json& j, const StructuralReport& r)
{
    j = nlohmann::json{{"inverse_residual", r.inverse_residual},
                       {"det_deviation", r.det_deviation},
                       {"twist_deviation", r.twist_deviation},
                       {"translation_exact", r.translation_exact},
                       {"periodicity", r.periodicity},
                       {"phi_mean", r.phi_mean},
                       {"conjugacy", r.conjugacy}};
}

void to_json(nlohmann::json& j, const DiffusionReport& r)
{
    nlohmann::json series = nlohmann::json::array();
    for (const auto& [n, v] : r.series) series.push_back({n, v});
    j = nlohmann::json{{"theta0", r.theta0},
                       {"offset", r.offset},
                       {"steps", r.steps},
                       {"max_excursion", r.max_excursion},
                       {"final_excursion", r.final_excursion},
                       {"thresholds", r.thresholds},
                       {"first_crossing", r.first_crossing},
                       {"series", series}};
}

void write_portrait_csv(std::ostream& os, const TwistSystem& sys, long orbits, long steps,
                        long curve_samples, double r_spread)
{
    os << "orbit,n,theta,r\n";
    os.precision(17);
    for (long i = 0; i < curve_samples; ++i) {
        double theta = static_cast<double>(i) / static_cast<double>(curve_samples);
        os << 0 << ',' << i << ',' << theta << ',' << sys.curve(theta) << '\n';
    }
    for (long o = 1; o <= orbits; ++o) {
        // initial conditions spread vertically around Gamma at evenly spaced angles
        double theta = (static_cast<double>(o) - 0.5) / static_cast<double>(orbits);
        double lift = orbits > 1 ? -r_spread + 2.0 * r_spread * (o - 1) / (orbits - 1) : 0.0;
        AnnulusPoint p{theta, sys.curve(theta) + lift};
        for (long n = 0; n <= steps; ++n) {
            os << o << ',' << n << ',' << p.theta << ',' << p.r << '\n';
            if (n < steps) p = sys.forward(p);
        }
    }
}

} // namespace dtwist
