#pragma once

#include "dtwist/sequences.hpp"

#include <iosfwd>
#include <vector>

namespace dtwist {

/// frac(k omega) in [0, 1), computed in extended precision.
double orbit_point(long k, double omega);

/// Indices k in [-M, M] sorted by frac(k omega). Throws InvalidParameter if
/// two orbit points coincide in double precision.
std::vector<long> order_orbit_points(double omega, long M);

/// Result of locating a circle point. Inside a gap (endpoints included)
/// `gap` is its index and `u` the offset from lambda. In the residual set
/// `left`/`right` are the neighboring gaps.
struct Location {
    bool in_gap = false;
    long gap = 0;
    double u = 0.0;
    long left = 0;
    long right = 0;
};

/// Gaps I_k = [lambda_k, lambda_k + ell_k] placed on [0, 1) in the circular
/// order of the rotation orbit. The untracked mass is spread uniformly:
///   lambda_k = sum_{frac(m w) < frac(k w)} ell_m + residual * frac(k w).
class GapTable {
public:
    GapTable(const GapSequences& g, double omega);

    long M() const { return M_; }
    double omega() const { return omega_; }
    double residual_mass() const { return residual_; }

    double ell(long k) const { return ell_[k]; }
    double lambda(long k) const { return lambda_[k]; }
    double right(long k) const { return lambda_[k] + ell_[k]; }
    double mu(long k) const { return mu_[k]; }
    double orbit(long k) const { return orbit_[k]; }
    double J_lo(long k) const { return mu_[k] - ell_[k] / 8.0; }
    double J_hi(long k) const { return mu_[k] + ell_[k] / 8.0; }
    /// True when the gap straddles 1 (never for the uniform completion, kept
    /// for general layouts).
    bool wraps(long k) const { return lambda_[k] + ell_[k] > 1.0; }

    /// Gap indices in increasing order of lambda.
    const std::vector<long>& sorted() const { return sorted_; }
    /// Position of gap k in sorted().
    std::size_t rank(long k) const { return rank_[static_cast<std::size_t>(k + M_)]; }

private:
    long M_;
    double omega_;
    double residual_;
    IndexedSeries ell_;
    IndexedSeries orbit_;
    IndexedSeries lambda_;
    IndexedSeries mu_;
    std::vector<long> sorted_;
    std::vector<std::size_t> rank_;
    std::vector<double> left_sorted_;

    friend Location locate(double x, const GapTable& t);
};

/// Binary search over the sorted endpoints. x is reduced mod 1.
Location locate(double x, const GapTable& t);

/// The semi-conjugacy j: constant frac(k omega) on I_k, affine on each
/// residual stretch between neighbouring gaps.
class SemiConjugacy {
public:
    explicit SemiConjugacy(const GapTable& t) : table_(&t) {}
    /// Circle value in [0, 1).
    double operator()(double x) const;
    /// Lift value: floor(x) + j on [0, 1], weakly increasing, degree 1.
    double lift(double x) const;

private:
    double raw(double x) const;
    const GapTable* table_;
};

/// CSV with columns k,lambda,mu,ell,J_lo,J_hi,wrap in index order.
void write_gap_csv(std::ostream& os, const GapTable& t);

} // namespace dtwist
