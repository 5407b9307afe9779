#include "dtwist/circle_map.hpp"

#include "dtwist/circle.hpp"
#include "dtwist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace dtwist {

namespace {

constexpr int kMaxRootIterations = 200;

// Root of the increasing function f(u) = target on [a, b]: Newton steps,
// falling back to bisection whenever a step leaves the bracket.
template <class F, class DF>
double solve_increasing(F f, DF df, double a, double b, double target, double tol)
{
    double lo = a;
    double hi = b;
    double u = 0.5 * (a + b);
    for (int it = 0; it < kMaxRootIterations; ++it) {
        double r = f(u) - target;
        if (std::abs(r) <= tol) return u;
        if (r > 0.0)
            hi = u;
        else
            lo = u;
        if (std::nextafter(lo, hi) >= hi) {
            // bracket exhausted at double resolution
            return std::abs(f(lo) - target) < std::abs(f(hi) - target) ? lo : hi;
        }
        double slope = df(u);
        double next = slope > 0.0 ? u - r / slope : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        u = next;
    }
    throw InternalError("monotone inversion did not converge within the iteration cap");
}

} // namespace

// ---------------------------------------------------------------------------
// LocalDiffeo

LocalDiffeo::LocalDiffeo(long k, double ell, double ell_next, double K, double alpha,
                         const Profile& eta, const Profile& gamma)
    : k_(k), ell_(ell), ell_next_(ell_next), K_(K), alpha_(alpha), eta_(&eta), gamma_(&gamma),
      plateau_right_(gamma.kind() == ProfileKind::gamma_plus)
{
    if (eta.kind() != ProfileKind::eta || gamma.kind() == ProfileKind::eta)
        throw InvalidParameter("LocalDiffeo: expected eta and a gamma profile");
}

double LocalDiffeo::eval(double u) const
{
    if (u <= 0.0) return 0.0;
    const double lo = 0.375 * ell_;
    const double hi = 0.625 * ell_;
    if (u >= lo && u <= hi) {
        const double half = 0.5 * ell_;
        double v = (1.0 + K_) * u;
        if (plateau_right_ ? u >= half : u <= half) v += alpha_ * (u - half);
        return v;
    }
    const double t = u / ell_;
    return u + K_ * ell_ * eta_->antiderivative(t) + alpha_ * ell_ * gamma_->antiderivative(t);
}

double LocalDiffeo::d1(double u, Side side) const
{
    const double t = u / ell_;
    if (t == 0.5 && side == Side::none)
        throw OneSidedOnly("h_k' at the midpoint needs a side");
    return 1.0 + K_ * eta_->value(t) + alpha_ * gamma_->value(t, side);
}

double LocalDiffeo::d2(double u, Side side) const
{
    const double t = u / ell_;
    return (K_ * eta_->d1(t) + alpha_ * gamma_->d1(t, side)) / ell_;
}

double LocalDiffeo::invert(double v) const
{
    const double scale = ell_next_;
    if (v < -1e-15 * scale || v > ell_next_ * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "h_" << k_ << " inverse: " << v << " outside [0, " << ell_next_ << "]";
        throw DomainError(msg.str());
    }
    if (v <= 0.0) return 0.0;
    const double half = 0.5 * ell_;
    const double lo = 0.375 * ell_;
    const double hi = 0.625 * ell_;
    const double v_lo = eval(lo);
    const double v_hi = eval(hi);
    if (v >= v_lo && v <= v_hi) {
        const double v_mid = (1.0 + K_) * half;
        bool steep = plateau_right_ ? v >= v_mid : v <= v_mid;
        return steep ? (v + alpha_ * half) / (1.0 + K_ + alpha_) : v / (1.0 + K_);
    }
    auto f = [this](double u) { return eval(u); };
    auto df = [this](double u) { return d1(u, Side::right); };
    const double tol = 1e-14 * scale;
    if (v < v_lo) return solve_increasing(f, df, 0.0, lo, v, tol);
    return solve_increasing(f, df, hi, ell_, v, tol);
}

double local_diffeo_eval(const LocalDiffeo& h, double u, DiffOrder order)
{
    switch (order) {
    case DiffOrder::value: return h.eval(u);
    case DiffOrder::d1_left: return h.d1(u, Side::left);
    case DiffOrder::d1_right: return h.d1(u, Side::right);
    case DiffOrder::d2: return h.d2(u);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// CircleMap

double CircleMap::forward(double x) const
{
    double f = wrap01(x);
    return wrap01(f + displacement(f));
}

double CircleMap::inverse(double y) const
{
    double f = wrap01(y);
    return wrap01(f + inverse_displacement(f));
}

double CircleMap::lift(double x) const
{
    double base = std::floor(x);
    double f = x - base;
    if (f >= 1.0) {
        base += 1.0;
        f = 0.0;
    }
    return base + (f + displacement(f));
}

double CircleMap::inverse_lift(double y) const
{
    double base = std::floor(y);
    double f = y - base;
    if (f >= 1.0) {
        base += 1.0;
        f = 0.0;
    }
    return base + (f + inverse_displacement(f));
}

double CircleMap::inverse_derivative(double y, Side side) const
{
    return 1.0 / derivative(inverse(y), side);
}

double CircleMap::inverse_second_derivative(double y, Side side) const
{
    double x = inverse(y);
    double d = derivative(x, side);
    return -second_derivative(x, side) / (d * d * d);
}

// ---------------------------------------------------------------------------
// DenjoyMap

DenjoyMap::DenjoyMap(const GapSequences& g, const GapTable& table, const ProfileSet& profiles,
                     bool swap_gamma)
    : M_(g.M), table_(&table)
{
    if (!g.has_alphas()) throw InvalidParameter("DenjoyMap: sequences without alphas");
    if (table.M() != g.M) throw InvalidParameter("DenjoyMap: table and sequences disagree on M");

    const Profile& gp = swap_gamma ? profiles.gamma_minus() : profiles.gamma_plus();
    const Profile& gm = swap_gamma ? profiles.gamma_plus() : profiles.gamma_minus();
    diffeos_.reserve(static_cast<std::size_t>(2 * M_));
    turns_.reserve(static_cast<std::size_t>(2 * M_));
    for (long k = -M_; k <= M_ - 1; ++k) {
        diffeos_.emplace_back(k, g.ell[k], g.ell[k + 1], g.K[k], g.alpha[k], profiles.eta(),
                              k >= 1 ? gp : gm);
        turns_.push_back(positive_turn(table.lambda(k + 1) - table.lambda(k)));
    }

    // domain gaps in circular order
    std::vector<long> order;
    for (long k : table.sorted())
        if (k != M_) order.push_back(k);

    const std::size_t n = order.size();
    for (std::size_t i = 0; i < n; ++i) {
        long a = order[i];
        long b = order[(i + 1) % n];
        Cell c;
        c.left_gap = a;
        c.right_gap = b;
        c.x0 = table.right(a);
        double x1 = table.lambda(b) + (i + 1 == n ? 1.0 : 0.0);
        c.L = x1 - c.x0;
        c.y0 = wrap01(table.right(a + 1));
        double y1 = table.lambda(b + 1);
        c.L_image = wrap01(y1 - c.y0);
        if (!(c.L > 0.0) || !(c.L_image > 0.0)) {
            std::ostringstream msg;
            msg << "degenerate residual cell after gap " << a;
            throw ConstructionError(msg.str(), a);
        }
        c.slope = c.L_image / c.L;
        c.linear = std::abs(c.slope - 1.0) < 1e-12;
        if (!c.linear && !(c.slope > 0.5 && c.slope < 1.5)) {
            std::ostringstream msg;
            msg << "residual cell after gap " << a << " has slope " << c.slope
                << " outside (1/2, 3/2)";
            throw ConstructionError(msg.str(), a);
        }
        c.turn = positive_turn(c.y0 - c.x0);
        cells_.push_back(c);
    }

    for (std::size_t i = 0; i < n; ++i) {
        long a = order[i];
        domain_.push_back({table.lambda(a), true, a});
        domain_.push_back({cells_[i].x0, false, static_cast<long>(i)});
        image_.push_back({table.lambda(a + 1), true, a + 1});
        image_.push_back({cells_[i].y0, false, static_cast<long>(i)});
    }
    auto by_start = [](const Start& l, const Start& r) { return l.at < r.at; };
    std::sort(domain_.begin(), domain_.end(), by_start);
    std::sort(image_.begin(), image_.end(), by_start);
    if (domain_.front().at != 0.0 || image_.front().at != 0.0)
        throw InternalError("DenjoyMap: pieces do not start at 0");
}

const LocalDiffeo& DenjoyMap::diffeo(long k) const
{
    if (k < -M_ || k > M_ - 1) {
        std::ostringstream msg;
        msg << "no local diffeo for gap " << k;
        throw std::out_of_range(msg.str());
    }
    return diffeos_[static_cast<std::size_t>(k + M_)];
}

namespace {

template <class Starts>
std::size_t piece_slot(const Starts& starts, double x)
{
    auto it = std::upper_bound(starts.begin(), starts.end(), x,
                               [](double v, const auto& s) { return v < s.at; });
    return it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin()) - 1;
}

} // namespace

namespace {

void settle_gap_offset(DenjoyMap::Piece& p, double x, double ell)
{
    p.offset = std::min(p.offset, ell);
    const double half = 0.5 * ell;
    const double slack = 4.0 * (std::nextafter(x, 2.0) - x);
    if (std::abs(p.offset - half) <= slack) p.offset = half;
}

} // namespace

DenjoyMap::Piece DenjoyMap::domain_piece(double x) const
{
    x = wrap01(x);
    const Start& s = domain_[piece_slot(domain_, x)];
    Piece p{s.gap, s.index, x - s.at};
    if (p.gap) settle_gap_offset(p, x, table_->ell(p.index));
    return p;
}

DenjoyMap::Piece DenjoyMap::image_piece(double y) const
{
    y = wrap01(y);
    const Start& s = image_[piece_slot(image_, y)];
    Piece p{s.gap, s.index, y - s.at};
    if (p.gap) settle_gap_offset(p, y, table_->ell(p.index));
    return p;
}

double DenjoyMap::cell_forward(const Cell& c, double d) const
{
    if (c.linear) return c.slope * d;
    const double w = 2.0 * std::numbers::pi / c.L;
    return c.slope * d + (1.0 - c.slope) * std::sin(w * d) / w;
}

double DenjoyMap::cell_inverse(const Cell& c, double e) const
{
    if (c.linear) return e / c.slope;
    if (e <= 0.0) return 0.0;
    if (e >= c.L_image) return c.L;
    const double w = 2.0 * std::numbers::pi / c.L;
    auto f = [&](double d) { return cell_forward(c, d); };
    auto df = [&](double d) { return c.slope + (1.0 - c.slope) * std::cos(w * d); };
    return solve_increasing(f, df, 0.0, c.L, e, 1e-14 * c.L_image);
}

double DenjoyMap::displacement(double x) const
{
    Piece p = domain_piece(x);
    if (p.gap) {
        const LocalDiffeo& h = diffeo(p.index);
        return gap_turn(p.index) + (h.eval(p.offset) - p.offset);
    }
    const Cell& c = cells_[static_cast<std::size_t>(p.index)];
    return c.turn + (cell_forward(c, p.offset) - p.offset);
}

double DenjoyMap::inverse_displacement(double y) const
{
    Piece p = image_piece(y);
    if (p.gap) {
        const LocalDiffeo& h = diffeo(p.index - 1);
        double v = std::min(p.offset, h.ell_next());
        return -gap_turn(p.index - 1) + (h.invert(v) - p.offset);
    }
    const Cell& c = cells_[static_cast<std::size_t>(p.index)];
    return -c.turn + (cell_inverse(c, p.offset) - p.offset);
}

double DenjoyMap::derivative(double x, Side side) const
{
    Piece p = domain_piece(x);
    if (p.gap) {
        const LocalDiffeo& h = diffeo(p.index);
        return h.d1(p.offset, side);
    }
    const Cell& c = cells_[static_cast<std::size_t>(p.index)];
    if (c.linear) return c.slope;
    return c.slope + (1.0 - c.slope) * std::cos(2.0 * std::numbers::pi * p.offset / c.L);
}

double DenjoyMap::second_derivative(double x, Side side) const
{
    Piece p = domain_piece(x);
    if (p.gap) return diffeo(p.index).d2(p.offset, side);
    const Cell& c = cells_[static_cast<std::size_t>(p.index)];
    if (c.linear) return 0.0;
    const double w = 2.0 * std::numbers::pi / c.L;
    return -(1.0 - c.slope) * w * std::sin(w * p.offset);
}

double DenjoyMap::inverse_derivative(double y, Side side) const
{
    Piece p = image_piece(y);
    if (p.gap) {
        const LocalDiffeo& h = diffeo(p.index - 1);
        double u = p.offset == 0.5 * h.ell_next() ? 0.5 * h.ell() : h.invert(std::min(p.offset, h.ell_next()));
        return 1.0 / h.d1(u, side);
    }
    const Cell& c = cells_[static_cast<std::size_t>(p.index)];
    if (c.linear) return 1.0 / c.slope;
    double d = cell_inverse(c, p.offset);
    return 1.0 / (c.slope + (1.0 - c.slope) * std::cos(2.0 * std::numbers::pi * d / c.L));
}

double DenjoyMap::inverse_second_derivative(double y, Side side) const
{
    Piece p = image_piece(y);
    double d1 = 0.0;
    double d2 = 0.0;
    if (p.gap) {
        const LocalDiffeo& h = diffeo(p.index - 1);
        double u = p.offset == 0.5 * h.ell_next() ? 0.5 * h.ell() : h.invert(std::min(p.offset, h.ell_next()));
        d1 = h.d1(u, side);
        d2 = h.d2(u, side);
    } else {
        const Cell& c = cells_[static_cast<std::size_t>(p.index)];
        if (c.linear) return 0.0;
        const double w = 2.0 * std::numbers::pi / c.L;
        double d = cell_inverse(c, p.offset);
        d1 = c.slope + (1.0 - c.slope) * std::cos(w * d);
        d2 = -(1.0 - c.slope) * w * std::sin(w * d);
    }
    return -d2 / (d1 * d1 * d1);
}

// ---------------------------------------------------------------------------
// Orbit diagnostics

double rotation_number_estimate(const CircleMap& g, double x0, long n)
{
    if (n < 1) throw InvalidParameter("rotation_number_estimate: n must be positive");
    double start = wrap01(x0);
    double x = start;
    long windings = 0;
    for (long i = 0; i < n; ++i) {
        double y = x + g.displacement(x);
        double w = std::floor(y);
        windings += static_cast<long>(w);
        x = y - w;
        if (x >= 1.0) {
            x -= 1.0;
            ++windings;
        }
    }
    return (static_cast<double>(windings) + (x - start)) / static_cast<double>(n);
}

bool WanderingReport::pass() const
{
    return lengths_decrease && forward_max_deviation <= tolerance
        && backward_max_deviation <= tolerance;
}

WanderingReport wandering_interval_check(const DenjoyMap& g, long n_max)
{
    if (n_max < 0 || n_max > g.M())
        throw InvalidParameter("wandering_interval_check: need 0 <= n_max <= M");
    const GapTable& t = g.table();
    WanderingReport r;
    r.n_max = n_max;

    double a = t.lambda(0);
    double b = t.right(0);
    for (long n = 1; n <= n_max; ++n) {
        a = g.forward(a);
        b = g.forward(b);
        r.forward_max_deviation = std::max(
            {r.forward_max_deviation, circle_dist(a, t.lambda(n)), circle_dist(b, t.right(n))});
    }
    a = t.lambda(0);
    b = t.right(0);
    for (long n = 1; n <= n_max; ++n) {
        a = g.inverse(a);
        b = g.inverse(b);
        r.backward_max_deviation = std::max(
            {r.backward_max_deviation, circle_dist(a, t.lambda(-n)), circle_dist(b, t.right(-n))});
    }
    r.lengths_decrease = true;
    for (long n = 1; n <= n_max; ++n)
        r.lengths_decrease = r.lengths_decrease && t.ell(n) < t.ell(n - 1) && t.ell(-n) < t.ell(-n + 1);
    return r;
}

JumpScan derivative_jump_table(const DenjoyMap& g, long samples)
{
    JumpScan scan;
    scan.samples = samples;
    for (long k = -g.M(); k <= g.M() - 1; ++k) {
        const LocalDiffeo& h = g.diffeo(k);
        double half = 0.5 * h.ell();
        double l = h.d1(half, Side::left);
        double r = h.d1(half, Side::right);
        scan.midpoints.push_back({k, l, r, r - l});

        // endpoints from the gap side and from the neighbouring cells
        const GapTable& t = g.table();
        double e = std::max({std::abs(h.d1(0.0, Side::right) - 1.0),
                             std::abs(h.d1(h.ell(), Side::left) - 1.0),
                             std::abs(g.derivative(t.right(k), Side::right) - 1.0),
                             std::abs(g.derivative(std::nextafter(t.lambda(k), -1.0)) - 1.0)});
        scan.max_endpoint_slope_error = std::max(scan.max_endpoint_slope_error, e);
    }

    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<long> pick(-g.M(), g.M() - 1);
    std::uniform_real_distribution<double> where(0.02, 0.98);
    for (long i = 0; i < samples; ++i) {
        const LocalDiffeo& h = g.diffeo(pick(rng));
        double t = where(rng);
        if (std::abs(t - 0.5) < 0.01) t += 0.03;
        double u = t * h.ell();
        double step = 1e-5 * h.ell();
        double fwd = (-3.0 * h.eval(u) + 4.0 * h.eval(u + step) - h.eval(u + 2 * step)) / (2 * step);
        double bwd = (3.0 * h.eval(u) - 4.0 * h.eval(u - step) + h.eval(u - 2 * step)) / (2 * step);
        scan.max_offmidpoint_jump = std::max(scan.max_offmidpoint_jump, std::abs(fwd - bwd));
    }
    return scan;
}

void write_orbit_csv(std::ostream& os, const CircleMap& g, double x0, long n)
{
    os << "n,x,lift\n";
    os.precision(17);
    double x = wrap01(x0);
    long windings = static_cast<long>(std::floor(x0));
    for (long i = 0; i <= n; ++i) {
        os << i << ',' << x << ',' << (static_cast<double>(windings) + x) << '\n';
        double y = x + g.displacement(x);
        double w = std::floor(y);
        windings += static_cast<long>(w);
        x = wrap01(y - w);
    }
}

void to_json(nlohmann::json& j, const WanderingReport& r)
{
    j = nlohmann::json{{"n_max", r.n_max},
                       {"forward_max_deviation", r.forward_max_deviation},
                       {"backward_max_deviation", r.backward_max_deviation},
                       {"lengths_decrease", r.lengths_decrease},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass()}};
}

void to_json(nlohmann::json& j, const JumpRow& r)
{
    j = nlohmann::json{{"k", r.k}, {"left", r.left}, {"right", r.right}, {"jump", r.jump}};
}

} // namespace dtwist
