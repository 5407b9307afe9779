#include "dtwist/layout.hpp"

#include "dtwist/circle.hpp"
#include "dtwist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace dtwist {

double orbit_point(long k, double omega)
{
    long double x = static_cast<long double>(k) * static_cast<long double>(omega);
    double f = static_cast<double>(x - std::floor(x));
    return f >= 1.0 ? 0.0 : f;
}

std::vector<long> order_orbit_points(double omega, long M)
{
    if (M < 0) throw InvalidParameter("order_orbit_points: M must be nonnegative");
    std::vector<long> idx;
    idx.reserve(static_cast<std::size_t>(2 * M + 1));
    for (long k = -M; k <= M; ++k) idx.push_back(k);
    std::vector<double> pts(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) pts[i] = orbit_point(idx[i], omega);
    std::sort(idx.begin(), idx.end(),
              [&](long a, long b) { return pts[a + M] < pts[b + M]; });
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (pts[idx[i] + M] == pts[idx[i - 1] + M]) {
            std::ostringstream msg;
            msg << "orbit points of " << idx[i - 1] << " and " << idx[i] << " coincide";
            throw InvalidParameter(msg.str());
        }
    }
    return idx;
}

GapTable::GapTable(const GapSequences& g, double omega)
    : M_(g.M), omega_(omega), residual_(g.residual_mass),
      ell_(-g.M, g.M), orbit_(-g.M, g.M), lambda_(-g.M, g.M), mu_(-g.M, g.M)
{
    if (!(omega > 0.0 && omega < 1.0)) throw InvalidParameter("omega must lie in (0, 1)");
    for (long k = -M_; k <= M_; ++k) {
        ell_[k] = g.ell.at(k);
        orbit_[k] = orbit_point(k, omega);
    }
    sorted_ = order_orbit_points(omega, M_);
    rank_.assign(sorted_.size(), 0);

    long double before = 0.0L;
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        long k = sorted_[i];
        rank_[static_cast<std::size_t>(k + M_)] = i;
        lambda_[k] = static_cast<double>(before + static_cast<long double>(residual_) * orbit_[k]);
        mu_[k] = lambda_[k] + ell_[k] / 2.0;
        before += ell_[k];
    }

    left_sorted_.resize(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) left_sorted_[i] = lambda_[sorted_[i]];
    for (std::size_t i = 0; i + 1 < sorted_.size(); ++i) {
        if (right(sorted_[i]) > left_sorted_[i + 1] + 1e-15)
            throw InternalError("gap layout: overlapping gaps");
    }
    if (right(sorted_.back()) > 1.0 + left_sorted_.front() + 1e-15)
        throw InternalError("gap layout: last gap overlaps the first");
}

Location locate(double x, const GapTable& t)
{
    x = wrap01(x);
    const auto& L = t.left_sorted_;
    const auto& S = t.sorted_;
    auto it = std::upper_bound(L.begin(), L.end(), x);
    Location loc;
    std::size_t n = S.size();
    if (it == L.begin()) {
        // before the first gap: residual between the last gap and the first
        loc.left = S[n - 1];
        loc.right = S[0];
        return loc;
    }
    std::size_t i = static_cast<std::size_t>(it - L.begin()) - 1;
    long k = S[i];
    if (x <= t.right(k)) {
        loc.in_gap = true;
        loc.gap = k;
        loc.u = std::min(x - t.lambda(k), t.ell(k));
        loc.left = loc.right = k;
        return loc;
    }
    loc.left = k;
    loc.right = S[(i + 1) % n];
    return loc;
}

double SemiConjugacy::raw(double x) const
{
    const GapTable& t = *table_;
    Location loc = locate(x, t);
    if (loc.in_gap) return t.orbit(loc.gap);
    double xa = t.right(loc.left);
    double ja = t.orbit(loc.left);
    double xb = t.lambda(loc.right);
    double jb = t.orbit(loc.right);
    double xx = wrap01(x);
    if (xb <= xa) {
        // stretch wraps through 0
        xb += 1.0;
        jb += 1.0;
        if (xx < xa) xx += 1.0;
    }
    return ja + (jb - ja) * (xx - xa) / (xb - xa);
}

double SemiConjugacy::operator()(double x) const
{
    return wrap01(raw(x));
}

double SemiConjugacy::lift(double x) const
{
    double base = std::floor(x);
    return base + raw(x - base);
}

void write_gap_csv(std::ostream& os, const GapTable& t)
{
    os << "k,lambda,mu,ell,J_lo,J_hi,wrap\n";
    os.precision(17);
    for (long k = -t.M(); k <= t.M(); ++k) {
        os << k << ',' << t.lambda(k) << ',' << t.mu(k) << ',' << t.ell(k) << ',' << t.J_lo(k)
           << ',' << t.J_hi(k) << ',' << (t.wraps(k) ? 1 : 0) << '\n';
    }
}

} // namespace dtwist
