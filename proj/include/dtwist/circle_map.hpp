#pragma once

#include "dtwist/layout.hpp"
#include "dtwist/profiles.hpp"
#include "dtwist/sequences.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <vector>

namespace dtwist {

/// h_k(u) = u + K ell E(u/ell) + alpha ell G(u/ell) on [0, ell_k], mapping
/// onto [0, ell_{k+1}]. E, G are the antiderivatives of eta and of the gamma
/// profile assigned to k. On [3 ell/8, 5 ell/8] h_k is evaluated from its
/// two exact linear pieces.
class LocalDiffeo {
public:
    LocalDiffeo(long k, double ell, double ell_next, double K, double alpha, const Profile& eta,
                const Profile& gamma);

    long index() const { return k_; }
    double ell() const { return ell_; }
    double ell_next() const { return ell_next_; }
    double K() const { return K_; }
    double alpha() const { return alpha_; }
    /// True when the gamma plateau sits on the right half (gamma_plus).
    bool plateau_right() const { return plateau_right_; }
    const Profile& eta() const { return *eta_; }
    const Profile& gamma() const { return *gamma_; }

    double eval(double u) const;
    /// 1 + psi_k(u); at u = ell/2 a side is required.
    double d1(double u, Side side = Side::none) const;
    double d2(double u, Side side = Side::none) const;
    /// h_k^{-1}(v) for v in [0, ell_{k+1}]; DomainError outside.
    double invert(double v) const;

    /// Right-minus-left jump of h_k' at the midpoint.
    double midpoint_jump() const { return plateau_right_ ? alpha_ : -alpha_; }

private:
    long k_;
    double ell_;
    double ell_next_;
    double K_;
    double alpha_;
    const Profile* eta_;
    const Profile* gamma_;
    bool plateau_right_;
};

enum class DiffOrder { value, d1_left, d1_right, d2 };

/// Dispatch helper for h_k and its one-sided derivatives.
double local_diffeo_eval(const LocalDiffeo& h, double u, DiffOrder order);

/// Orientation-preserving circle homeomorphism of degree one, described by
/// its periodic displacement. The lift is x + displacement(frac x).
class CircleMap {
public:
    virtual ~CircleMap() = default;

    /// g~(x) - x for x in [0, 1); values in (0, 1).
    virtual double displacement(double x) const = 0;
    /// g~^{-1}(y) - y for y in [0, 1); values in (-1, 0).
    virtual double inverse_displacement(double y) const = 0;
    virtual double derivative(double x, Side side = Side::right) const = 0;
    virtual double second_derivative(double x, Side side = Side::right) const = 0;
    /// (g^{-1})'(y) and (g^{-1})''(y); sides refer to y.
    virtual double inverse_derivative(double y, Side side = Side::right) const;
    virtual double inverse_second_derivative(double y, Side side = Side::right) const;

    double forward(double x) const;
    double inverse(double y) const;
    double lift(double x) const;
    double inverse_lift(double y) const;
};

/// x -> x + omega. Test double.
class RigidRotation final : public CircleMap {
public:
    explicit RigidRotation(double omega) : omega_(omega) {}
    double displacement(double) const override { return omega_; }
    double inverse_displacement(double) const override { return -omega_; }
    double derivative(double, Side) const override { return 1.0; }
    double second_derivative(double, Side) const override { return 0.0; }
    double inverse_derivative(double, Side) const override { return 1.0; }
    double inverse_second_derivative(double, Side) const override { return 0.0; }

private:
    double omega_;
};

/// The Denjoy-type map g. I_k -> I_{k+1} through h_k for k in [-M, M-1].
/// Between consecutive domain gaps lies a cell [x0, x0 + L] mapped onto
/// [y0, y0 + L'] by
///   y0 + s d + (1 - s)(L / 2 pi) sin(2 pi d / L),   s = L'/L,  d = x - x0,
/// which has slope 1 at both ends. All cells are translations except the
/// one holding I_M and the one whose image holds I_{-M}.
class DenjoyMap final : public CircleMap {
public:
    struct Cell {
        long left_gap;    ///< domain gap ending at x0
        long right_gap;   ///< domain gap starting at x0 + L
        double x0;
        double L;
        double y0;
        double L_image;
        double slope;     ///< L_image / L
        double turn;      ///< lifted y0 - x0 in (0, 1]
        bool linear;      ///< |slope - 1| below 1e-12: pure translation
    };

    /// Which piece of the domain (or of the image) a point falls in.
    /// Offsets within a few ulps of a gap midpoint snap to exactly ell/2 so
    /// that one-sided requests at mu_k are honoured.
    struct Piece {
        bool gap = false;
        long index = 0;     ///< gap index k, or cell number
        double offset = 0;  ///< distance from the piece start
    };

    DenjoyMap(const GapSequences& g, const GapTable& table, const ProfileSet& profiles,
              bool swap_gamma = false);

    long M() const { return M_; }
    const GapTable& table() const { return *table_; }
    const LocalDiffeo& diffeo(long k) const;
    const std::vector<Cell>& cells() const { return cells_; }

    Piece domain_piece(double x) const;
    Piece image_piece(double y) const;

    double displacement(double x) const override;
    double inverse_displacement(double y) const override;
    double derivative(double x, Side side = Side::right) const override;
    double second_derivative(double x, Side side = Side::right) const override;
    double inverse_derivative(double y, Side side = Side::right) const override;
    double inverse_second_derivative(double y, Side side = Side::right) const override;

    /// Turn number lambda_{k+1} - lambda_k lifted to (0, 1].
    double gap_turn(long k) const { return turns_[static_cast<std::size_t>(k + M_)]; }

private:
    double cell_forward(const Cell& c, double d) const;
    double cell_inverse(const Cell& c, double e) const;

    long M_;
    const GapTable* table_;
    std::vector<LocalDiffeo> diffeos_;
    std::vector<double> turns_;
    std::vector<Cell> cells_;

    struct Start {
        double at;
        bool gap;
        long index;
    };
    std::vector<Start> domain_;
    std::vector<Start> image_;
};

/// (g~^n(x0) - x0)/n with integer windings tracked separately.
double rotation_number_estimate(const CircleMap& g, double x0, long n);

struct WanderingReport {
    long n_max = 0;
    double forward_max_deviation = 0.0;
    double backward_max_deviation = 0.0;
    bool lengths_decrease = false;
    double tolerance = 1e-10;
    bool pass() const;
};

/// Iterates the endpoints of I_0 n_max times each way and compares with the
/// stored I_n, I_{-n}.
WanderingReport wandering_interval_check(const DenjoyMap& g, long n_max);

struct JumpRow {
    long k;
    double left;
    double right;
    double jump;
};

struct JumpScan {
    std::vector<JumpRow> midpoints;
    long samples = 0;
    /// max |D+ h - D- h| over interior non-midpoint samples, one-sided
    /// second-order differences in local coordinates
    double max_offmidpoint_jump = 0.0;
    /// max |g' - 1| over gap endpoints, both sides
    double max_endpoint_slope_error = 0.0;
};

/// Midpoint jumps of g' for every domain gap plus a scan of random interior
/// points. Deterministic (fixed seed).
JumpScan derivative_jump_table(const DenjoyMap& g, long samples = 10000);

/// CSV with columns n,x,lift for the forward orbit of x0.
void write_orbit_csv(std::ostream& os, const CircleMap& g, double x0, long n);

void to_json(nlohmann::json& j, const WanderingReport& r);
void to_json(nlohmann::json& j, const JumpRow& r);

} // namespace dtwist
