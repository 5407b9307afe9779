#pragma once

#include "dtwist/circle_map.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <vector>

namespace dtwist {

/// zeta_k(x) = h_k(x) + h_{k-1}^{-1}(x) - 2x on I_k, i.e. phi read in the
/// local coordinate of gap k up to a constant. Its second derivative splits
/// as II + III + IV + V (with f_k(x) = h_{k-1}(ell_{k-1} x / ell_k)).
struct ZetaTerms {
    double II = 0.0;
    double III = 0.0;
    double IV = 0.0;
    double V = 0.0;
    double direct = 0.0;  ///< h_k'' - h_{k-1}''(y) / h_{k-1}'(y)^3
    double dzeta = 0.0;
    double zeta = 0.0;
    double sum() const { return II + III + IV + V; }
};

/// Terms at local coordinate x in [0, ell_k], k in [-M+1, M-1]. x must not
/// be the midpoint.
ZetaTerms zeta_terms(const DenjoyMap& g, long k, double x);
double zeta_d1(const DenjoyMap& g, long k, double x);

struct RegularityRow {
    long k;
    double sup_d2;
    double sup_II;
    double sup_III;
    double sup_IV;
    double sup_V;
    double sup_dzeta;
    double sup_zeta;
    double term_sum_error;   ///< max |sum - direct| / max(|direct|, sup_d2)
    double fd_error;         ///< same against Richardson differences of Dzeta
    double plateau_d2;       ///< max |D^2 zeta| on interior grid points of J_k
};

struct RegularityReport {
    std::vector<RegularityRow> rows;
    int grid = 256;
    double global_sup = 0.0;
    double inner_max = 0.0;   ///< max sup over |k| <= M/2
    double outer_max = 0.0;   ///< max sup over |k| in (M/2, M]
    /// Gaps 0 and 1 straddle the sign change of K and the gamma_-/gamma_+
    /// switch; their sup grows with C. bulk_sup covers the rest.
    double head_sup = 0.0;
    double bulk_sup = 0.0;
    double max_term_sum_error = 0.0;
    double max_fd_error = 0.0;
    double max_plateau_d2 = 0.0;
    bool decays() const { return outer_max < inner_max; }
};

RegularityReport second_derivative_scan(const DenjoyMap& g, int grid = 256);

void to_json(nlohmann::json& j, const RegularityReport& r);

/// CSV with columns k,sup_d2,sup_II,sup_III,sup_IV,sup_V,sup_dzeta,sup_zeta.
void write_regularity_csv(std::ostream& os, const RegularityReport& r);

} // namespace dtwist
