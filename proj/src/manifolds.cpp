#include "dtwist/manifolds.hpp"

#include "dtwist/circle.hpp"
#include "dtwist/errors.hpp"
#include "dtwist/layout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace dtwist {

const char* to_string(SegmentKind kind)
{
    return kind == SegmentKind::stable ? "stable" : "unstable";
}

double ManifoldSegment::height(double theta) const
{
    return base_r + slope * circle_diff(theta, mu);
}

AnnulusPoint ManifoldSegment::at(double theta) const
{
    return {wrap01(theta), height(theta)};
}

AnnulusPoint ManifoldSegment::param(double s) const
{
    double d = s * half_width;
    return {wrap01(mu + d), base_r + slope * d};
}

ManifoldSegment manifold_segment(const TwistSystem& sys, long k, SegmentKind kind)
{
    const DenjoyMap& g = sys.denjoy();
    if (kind == SegmentKind::stable && k < 1)
        throw InvalidParameter("stable segments are indexed by k >= 1");
    if (kind == SegmentKind::unstable && k > 0)
        throw InvalidParameter("unstable segments are indexed by k <= 0");
    if (std::labs(k) > g.M() - 1) throw InvalidParameter("segment index outside the stored range");
    const GapTable& t = g.table();
    ManifoldSegment s;
    s.k = k;
    s.kind = kind;
    s.mu = t.mu(k);
    s.base_r = positive_turn(t.mu(k + 1) - t.mu(k));
    s.slope = t.ell(k + 1) / t.ell(k) - 1.0;
    s.half_width = t.ell(k) / 8.0;
    return s;
}

namespace {

double chord_distance(AnnulusPoint a, AnnulusPoint m, AnnulusPoint b)
{
    double bx = circle_diff(b.theta, a.theta), by = b.r - a.r;
    double mx = circle_diff(m.theta, a.theta), my = m.r - a.r;
    double len = std::hypot(bx, by);
    if (len == 0.0) return std::hypot(mx, my);
    return std::abs(bx * my - by * mx) / len;
}

bool inside_one_band(const GapTable& t, const std::array<double, 3>& thetas)
{
    long gap = 0;
    bool first = true;
    for (double th : thetas) {
        Location loc = locate(th, t);
        if (!loc.in_gap || std::labs(loc.gap) > t.M() - 1) return false;
        if (first) gap = loc.gap;
        if (loc.gap != gap) return false;
        first = false;
        double u = loc.u - 0.5 * t.ell(gap);
        if (std::abs(u) > t.ell(gap) / 8.0 * (1.0 + 1e-12)) return false;
    }
    return true;
}

// `band` holds the thetas at which phi is evaluated for this step.
MarkerTriple markers(const TwistSystem& sys, long k, SegmentKind kind, AnnulusPoint lo, AnnulusPoint mid,
                     AnnulusPoint hi, const std::array<double, 3>& band, bool source_straight)
{
    MarkerTriple m;
    m.k = k;
    m.kind = kind;
    m.lo = lo;
    m.mid = mid;
    m.hi = hi;
    m.collinearity = chord_distance(lo, mid, hi);
    m.in_linear_band = source_straight && inside_one_band(sys.denjoy().table(), band);
    return m;
}

// How far theta lies outside [mu - w, mu + w].
double band_excess(double theta, const ManifoldSegment& s)
{
    return std::max(0.0, std::abs(circle_diff(theta, s.mu)) - s.half_width);
}

} // namespace

std::vector<MarkerTriple> extend_family(const TwistSystem& sys, long n)
{
    if (n < 0) throw InvalidParameter("extend_family: n must be nonnegative");
    std::vector<MarkerTriple> out;
    ManifoldSegment s1 = manifold_segment(sys, 1, SegmentKind::stable);
    AnnulusPoint lo = s1.param(-1.0), mid = s1.param(0.0), hi = s1.param(1.0);
    bool straight = true;
    for (long k = 0; k > -n; --k) {
        // f^{-1} evaluates phi at the source theta
        std::array<double, 3> band = {lo.theta, mid.theta, hi.theta};
        bool src = straight;
        AnnulusPoint a = sys.backward(lo), b = sys.backward(mid), c = sys.backward(hi);
        out.push_back(markers(sys, k, SegmentKind::stable, a, b, c, band, src));
        straight = out.back().in_linear_band;
        lo = a;
        mid = b;
        hi = c;
    }
    ManifoldSegment u0 = manifold_segment(sys, 0, SegmentKind::unstable);
    lo = u0.param(-1.0);
    mid = u0.param(0.0);
    hi = u0.param(1.0);
    straight = true;
    for (long k = 1; k <= n; ++k) {
        // f evaluates phi at the image theta
        lo = sys.forward(lo);
        mid = sys.forward(mid);
        hi = sys.forward(hi);
        out.push_back(markers(sys, k, SegmentKind::unstable, lo, mid, hi, {{lo.theta, mid.theta, hi.theta}},
                              straight));
        straight = out.back().in_linear_band;
    }
    return out;
}

IterateReport manifold_iterate_check(const TwistSystem& sys, long k_max)
{
    const DenjoyMap& g = sys.denjoy();
    if (k_max < 1 || k_max + 1 > g.M() - 1)
        throw InvalidParameter("manifold_iterate_check: k_max + 1 must lie within the stored range");
    const GapTable& t = g.table();
    constexpr int points = 16;
    IterateReport rep;

    auto run = [&](long k, SegmentKind kind) {
        bool stable = kind == SegmentKind::stable;
        long next = stable ? k + 1 : k - 1;
        ManifoldSegment s = manifold_segment(sys, k, kind);
        ManifoldSegment sn = manifold_segment(sys, next, kind);
        IterateRow row;
        row.k = k;
        row.kind = kind;
        row.expected_ratio = t.ell(next) / t.ell(k);
        AnnulusPoint first{}, last{};
        for (int i = 0; i < points; ++i) {
            double par = -1.0 + 2.0 * i / (points - 1);
            AnnulusPoint p = s.param(par);
            AnnulusPoint q = stable ? sys.forward(p) : sys.backward(p);
            row.deviation = std::max(row.deviation, std::abs(q.r - sn.height(q.theta)));
            row.band_excess = std::max(row.band_excess, band_excess(q.theta, sn));
            if (i == 0) first = q;
            if (i == points - 1) last = q;
        }
        row.ratio = std::abs(circle_diff(last.theta, first.theta)) / (2.0 * s.half_width);
        AnnulusPoint b = s.param(0.0);
        AnnulusPoint bi = stable ? sys.forward(b) : sys.backward(b);
        row.base_error = std::max(circle_dist(bi.theta, sn.mu), std::abs(bi.r - sn.base_r));
        rep.max_deviation = std::max(rep.max_deviation, row.deviation);
        rep.max_ratio_error = std::max(rep.max_ratio_error, std::abs(row.ratio - row.expected_ratio));
        rep.max_base_error = std::max(rep.max_base_error, row.base_error);
        rep.max_band_excess = std::max(rep.max_band_excess, row.band_excess);
        rep.rows.push_back(row);
    };
    for (long k = 1; k <= k_max; ++k) run(k, SegmentKind::stable);
    for (long k = 0; k >= 1 - k_max; --k) run(k, SegmentKind::unstable);
    return rep;
}

SideReport curve_side_check(const TwistSystem& sys, int samples)
{
    const DenjoyMap& g = sys.denjoy();
    if (samples < 2) throw InvalidParameter("curve_side_check: need at least two samples");
    SideReport rep;
    rep.alpha1 = g.diffeo(1).alpha();
    rep.alpha0 = g.diffeo(0).alpha();
    if (rep.alpha1 == 0.0) throw InvalidParameter("curve_side_check: alpha_1 vanishes");

    double sign = 0.0;
    bool strict = true;
    auto side = [&](long k, SegmentKind kind, double& err, double& lo, double& hi) {
        ManifoldSegment s = manifold_segment(sys, k, kind);
        const LocalDiffeo& h = g.diffeo(k);
        // the profile plateau half carries the extra alpha slope
        double dir = h.plateau_right() ? 1.0 : -1.0;
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (int i = 1; i < samples; ++i) {
            double d = dir * s.half_width * i / samples;
            double x = s.mu + d;
            double gap = sys.curve(x) - s.height(x);
            err = std::max(err, std::abs(gap - h.alpha() * d));
            lo = std::min(lo, gap);
            hi = std::max(hi, gap);
            if (gap == 0.0) strict = false;
            if (sign == 0.0) sign = std::copysign(1.0, gap);
            if (std::copysign(1.0, gap) != sign) strict = false;
            double on = sys.curve(s.mu - d) - s.height(s.mu - d);
            rep.on_curve_error = std::max(rep.on_curve_error, std::abs(on));
        }
    };
    side(1, SegmentKind::stable, rep.stable_error, rep.stable_min_gap, rep.stable_max_gap);
    side(0, SegmentKind::unstable, rep.unstable_error, rep.unstable_min_gap, rep.unstable_max_gap);
    rep.strict = strict;
    rep.zone_below = sign > 0.0;
    return rep;
}

ConvergenceReport orbit_convergence_check(const TwistSystem& sys, double s, long n)
{
    const DenjoyMap& g = sys.denjoy();
    if (s < -1.0 || s > 1.0) throw InvalidParameter("orbit_convergence_check: s must lie in [-1, 1]");
    if (n < 0 || n + 1 > g.M()) throw InvalidParameter("orbit_convergence_check: n + 1 outside the stored range");
    const GapTable& t = g.table();
    ManifoldSegment s1 = manifold_segment(sys, 1, SegmentKind::stable);
    AnnulusPoint y = s1.param(s);
    AnnulusPoint x = s1.param(0.0);
    ConvergenceReport rep;
    rep.s = s;
    double d0 = 0.0;
    for (long j = 0; j <= n; ++j) {
        ConvergenceRow row;
        row.n = j;
        row.theta_distance = circle_dist(y.theta, x.theta);
        row.distance = std::hypot(row.theta_distance, y.r - x.r);
        if (j == 0) d0 = row.theta_distance;
        row.expected_ratio = t.ell(j + 1) / t.ell(1);
        row.ratio = d0 > 0.0 ? row.theta_distance / d0 : 0.0;
        if (d0 > 0.0)
            rep.max_relative_error =
                std::max(rep.max_relative_error, std::abs(row.ratio / row.expected_ratio - 1.0));
        rep.rows.push_back(row);
        y = sys.forward(y);
        x = sys.forward(x);
    }
    return rep;
}

namespace {

nlohmann::json point_json(AnnulusPoint p)
{
    return nlohmann::json::array({p.theta, p.r});
}

} // namespace

void to_json(nlohmann::json& j, const MarkerTriple& m)
{
    j = nlohmann::json{{"k", m.k},
                       {"kind", to_string(m.kind)},
                       {"lo", point_json(m.lo)},
                       {"mid", point_json(m.mid)},
                       {"hi", point_json(m.hi)},
                       {"collinearity", m.collinearity},
                       {"in_linear_band", m.in_linear_band}};
}

void to_json(nlohmann::json& j, const IterateReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"k", row.k},
                        {"kind", to_string(row.kind)},
                        {"deviation", row.deviation},
                        {"band_excess", row.band_excess},
                        {"ratio", row.ratio},
                        {"expected_ratio", row.expected_ratio},
                        {"base_error", row.base_error}});
    }
    j = nlohmann::json{{"max_deviation", r.max_deviation},
                       {"max_ratio_error", r.max_ratio_error},
                       {"max_base_error", r.max_base_error},
                       {"max_band_excess", r.max_band_excess},
                       {"rows", rows}};
}

void to_json(nlohmann::json& j, const SideReport& r)
{
    j = nlohmann::json{{"alpha1", r.alpha1},
                       {"alpha0", r.alpha0},
                       {"stable_error", r.stable_error},
                       {"unstable_error", r.unstable_error},
                       {"stable_gap", {r.stable_min_gap, r.stable_max_gap}},
                       {"unstable_gap", {r.unstable_min_gap, r.unstable_max_gap}},
                       {"on_curve_error", r.on_curve_error},
                       {"strict", r.strict},
                       {"zone", r.zone_below ? "below" : "above"}};
}

void to_json(nlohmann::json& j, const ConvergenceReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"distance", row.distance},
                        {"theta_distance", row.theta_distance},
                        {"ratio", row.ratio},
                        {"expected_ratio", row.expected_ratio}});
    }
    j = nlohmann::json{{"s", r.s}, {"max_relative_error", r.max_relative_error}, {"rows", rows}};
}

void write_segment_csv(std::ostream& os, const TwistSystem& sys, long k_max, int points)
{
    if (points < 2) throw InvalidParameter("write_segment_csv: need at least two points");
    os << "kind,k,theta,r\n";
    os.precision(17);
    auto emit = [&](const ManifoldSegment& s) {
        for (int i = 0; i < points; ++i) {
            AnnulusPoint p = s.param(-1.0 + 2.0 * i / (points - 1));
            os << to_string(s.kind) << ',' << s.k << ',' << p.theta << ',' << p.r << '\n';
        }
    };
    for (long k = 1; k <= k_max; ++k) emit(manifold_segment(sys, k, SegmentKind::stable));
    for (long k = 0; k >= 1 - k_max; --k) emit(manifold_segment(sys, k, SegmentKind::unstable));
}

} // namespace dtwist
