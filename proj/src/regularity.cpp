#include "dtwist/regularity.hpp"

#include "dtwist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dtwist {

double zeta_d1(const DenjoyMap& g, long k, double x)
{
    const LocalDiffeo& hk = g.diffeo(k);
    const LocalDiffeo& hp = g.diffeo(k - 1);
    double y = hp.invert(std::clamp(x, 0.0, hp.ell_next()));
    return hk.d1(x, Side::right) + 1.0 / hp.d1(y, Side::right) - 2.0;
}

ZetaTerms zeta_terms(const DenjoyMap& g, long k, double x)
{
    const LocalDiffeo& hk = g.diffeo(k);
    const LocalDiffeo& hp = g.diffeo(k - 1);
    const double lk = hk.ell();
    const double lp = hp.ell();
    if (x == 0.5 * lk) throw OneSidedOnly("zeta terms are one-sided at the midpoint");

    const double y = hp.invert(x);
    const double tx = x / lk;
    const double ty = y / lp;   // = f_k^{-1}(x) / ell_k

    const double Kk = hk.K(), ak = hk.alpha();
    const double Kp = hp.K(), ap = hp.alpha();
    const Profile& eta = hk.eta();
    const Profile& gk = hk.gamma();
    const Profile& gp = hp.gamma();

    const double eta_x = eta.d1(tx);
    const double eta_y = eta.d1(ty);
    const double gk_x = gk.d1(tx, Side::right);
    const double gp_x = gp.d1(tx, Side::right);
    const double gp_y = gp.d1(ty, Side::right);

    const double psi_p = Kp * eta.value(ty) + ap * gp.value(ty, Side::right);
    const double q = 1.0 / (1.0 + psi_p);          // D(h_{k-1}^{-1})(x)
    const double dpsi_p = (Kp * eta_y + ap * gp_y) / lp;
    const double dpsi_k = (Kk * eta_x + ak * gk_x) / lk;
    const double A = (Kp * eta_y + ap * gp_y) / lk;
    const double dfinv = lk / lp * q;               // D(f_k^{-1})(x)

    ZetaTerms z;
    z.II = (Kk * eta_x - Kp * eta_x + ak * gk_x - ap * gp_x) / lk;
    z.III = -A * (dfinv * q - 1.0);
    z.IV = psi_p * dpsi_p * q * q * q;
    z.V = (Kp * (eta_x - eta_y) + ap * (gp_x - gp_y)) / lk;
    z.direct = dpsi_k - dpsi_p * q * q * q;
    z.dzeta = hk.d1(x, Side::right) + q - 2.0;
    z.zeta = hk.eval(x) + y - 2.0 * x;
    return z;
}

RegularityReport second_derivative_scan(const DenjoyMap& g, int grid)
{
    if (grid < 8) throw InvalidParameter("second_derivative_scan: grid too small");
    RegularityReport rep;
    rep.grid = grid;
    const long M = g.M();
    std::vector<ZetaTerms> terms(static_cast<std::size_t>(grid));
    for (long k = -M + 1; k <= M - 1; ++k) {
        const double lk = g.diffeo(k).ell();
        RegularityRow row{k, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
        for (int i = 0; i < grid; ++i) {
            double x = lk * (i + 0.5) / grid;
            ZetaTerms z = zeta_terms(g, k, x);
            terms[static_cast<std::size_t>(i)] = z;
            row.sup_d2 = std::max(row.sup_d2, std::abs(z.direct));
            row.sup_II = std::max(row.sup_II, std::abs(z.II));
            row.sup_III = std::max(row.sup_III, std::abs(z.III));
            row.sup_IV = std::max(row.sup_IV, std::abs(z.IV));
            row.sup_V = std::max(row.sup_V, std::abs(z.V));
            row.sup_dzeta = std::max(row.sup_dzeta, std::abs(z.dzeta));
            row.sup_zeta = std::max(row.sup_zeta, std::abs(z.zeta));
            double t = (i + 0.5) / grid;
            if (t > 0.375 && t < 0.625) row.plateau_d2 = std::max(row.plateau_d2, std::abs(z.direct));
        }
        const double h = 1e-4 * lk;
        const double floor = row.sup_d2 > 0.0 ? row.sup_d2 : 1.0;
        for (int i = 0; i < grid; ++i) {
            double x = lk * (i + 0.5) / grid;
            const ZetaTerms& z = terms[static_cast<std::size_t>(i)];
            auto central = [&](double s) { return (zeta_d1(g, k, x + s) - zeta_d1(g, k, x - s)) / (2.0 * s); };
            double fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
            double scale = std::max(std::abs(z.direct), floor);
            row.term_sum_error = std::max(row.term_sum_error, std::abs(z.sum() - z.direct) / scale);
            row.fd_error = std::max(row.fd_error, std::abs(z.sum() - fd) / std::max(std::abs(fd), floor));
        }
        rep.rows.push_back(row);
        rep.global_sup = std::max(rep.global_sup, row.sup_d2);
        if (k == 0 || k == 1)
            rep.head_sup = std::max(rep.head_sup, row.sup_d2);
        else
            rep.bulk_sup = std::max(rep.bulk_sup, row.sup_d2);
        if (std::labs(k) <= M / 2)
            rep.inner_max = std::max(rep.inner_max, row.sup_d2);
        else
            rep.outer_max = std::max(rep.outer_max, row.sup_d2);
        rep.max_term_sum_error = std::max(rep.max_term_sum_error, row.term_sum_error);
        rep.max_fd_error = std::max(rep.max_fd_error, row.fd_error);
        rep.max_plateau_d2 = std::max(rep.max_plateau_d2, row.plateau_d2);
    }
    return rep;
}

void to_json(nlohmann::json& j, const RegularityReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"k", row.k},
                        {"sup_d2", row.sup_d2},
                        {"sup_II", row.sup_II},
                        {"sup_III", row.sup_III},
                        {"sup_IV", row.sup_IV},
                        {"sup_V", row.sup_V},
                        {"sup_dzeta", row.sup_dzeta},
                        {"sup_zeta", row.sup_zeta},
                        {"term_sum_error", row.term_sum_error},
                        {"fd_error", row.fd_error},
                        {"plateau_d2", row.plateau_d2}});
    }
    j = nlohmann::json{{"grid", r.grid},
                       {"global_sup", r.global_sup},
                       {"inner_max", r.inner_max},
                       {"outer_max", r.outer_max},
                       {"head_sup", r.head_sup},
                       {"bulk_sup", r.bulk_sup},
                       {"decays", r.decays()},
                       {"max_term_sum_error", r.max_term_sum_error},
                       {"max_fd_error", r.max_fd_error},
                       {"max_plateau_d2", r.max_plateau_d2},
                       {"rows", rows}};
}

void write_regularity_csv(std::ostream& os, const RegularityReport& r)
{
    os << "k,sup_d2,sup_II,sup_III,sup_IV,sup_V,sup_dzeta,sup_zeta\n";
    os.precision(17);
    for (const auto& row : r.rows) {
        os << row.k << ',' << row.sup_d2 << ',' << row.sup_II << ',' << row.sup_III << ','
           << row.sup_IV << ',' << row.sup_V << ',' << row.sup_dzeta << ',' << row.sup_zeta << '\n';
    }
}

} // namespace dtwist
