#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace dtwist {

class ProfileSet;

enum class Alpha1Policy {
    half_abs_K1,     ///< alpha_1 = |K_1| / 2
    explicit_value,  ///< alpha_1 taken from SeqParams::alpha1_value
};

/// Construction parameters. Defaults are the desk-scale configuration.
struct SeqParams {
    double omega = (std::sqrt(5.0) - 1.0) / 2.0;
    double delta = 0.5;
    double bigC = 100.0;
    double bigB = 10.0;
    long truncation_M = 500;
    Alpha1Policy alpha1_policy = Alpha1Policy::half_abs_K1;
    double alpha1_value = 0.0;
    /// Exchange the roles of gamma_plus and gamma_minus (mirror construction
    /// whose instability zone lies above the invariant curve).
    bool swap_gamma = false;

    /// Throws InvalidParameter on any violated precondition.
    void validate() const;
};

/// Values indexed by a (possibly negative) integer range [lo, hi].
class IndexedSeries {
public:
    IndexedSeries() = default;
    IndexedSeries(long lo, long hi, double fill = 0.0);

    long lo() const { return lo_; }
    long hi() const { return hi_; }
    bool contains(long k) const { return k >= lo_ && k <= hi_; }

    double& operator[](long k) { return data_[static_cast<std::size_t>(k - lo_)]; }
    double operator[](long k) const { return data_[static_cast<std::size_t>(k - lo_)]; }
    /// Range-checked access; throws std::out_of_range.
    double at(long k) const;

    const std::vector<double>& raw() const { return data_; }

private:
    long lo_ = 0;
    long hi_ = -1;
    std::vector<double> data_;
};

/// The scalar sequences of the construction.
///
/// ell  : |k| <= M+2      gap lengths, summing to 1 over all of Z
/// K    : -M-2 .. M+1     ell[k+1]/ell[k] - 1
/// m    : -M-1 .. M+1     1 + K[k] + 1/(1 + K[k-1])
/// alpha, beta: |k| <= M  beta = K + alpha
struct GapSequences {
    long M = 0;
    double bigC = 0.0;
    double delta = 0.0;
    double a_C = 0.0;
    double normalizer_sum = 0.0;     ///< the full series sum S = 1/a_C
    double normalizer_tail = 0.0;    ///< the two-sided tail beyond the direct summation
    double residual_mass = 0.0;      ///< 1 - sum_{|k|<=M} ell[k]

    IndexedSeries ell;
    IndexedSeries K;
    IndexedSeries m;

    std::optional<double> m1_adjusted;
    double alpha1 = 0.0;
    double alpha0 = 0.0;
    IndexedSeries alpha;
    IndexedSeries beta;

    bool has_alphas() const { return m1_adjusted.has_value(); }
};

/// Number of terms per side summed directly when normalizing the lengths.
inline constexpr long kNormalizerDirectTerms = 1000000;

/// Unnormalized length 1 / ((|k| + C) log(|k| + C)^(1 + delta)).
double unnormalized_length(double abs_k, double bigC, double delta);

/// ell and a_C. Throws InvalidParameter for delta <= 0 (divergent series).
GapSequences build_gap_lengths(const SeqParams& p);

/// Fills K and m from ell.
void build_ratio_sequences(GapSequences& g);

struct AlphaSeeds {
    double alpha1;
    double alpha0;
    double m1_adjusted;
};

/// alpha_0 solving 1/(1 + K0 + alpha0) = 1/(1 + K0) + alpha1.
double head_relation_alpha0(double K0, double alpha1);

/// alpha_1 from the policy, alpha_0 from the head relation and the adjusted
/// m_1. Throws InvalidParameter unless 0 < alpha_1 <= B/(1+C) - K_1.
AlphaSeeds seed_alphas(const GapSequences& g, const SeqParams& p);

/// Runs the alpha/beta recurrence outward from the given seeds.
/// Throws ConstructionError if the backward sweep leaves the domain of the
/// inverse map (m_{k+1} - (1 + beta_{k+1}) <= 0) or 1 + beta <= 0.
void extend_alphas(GapSequences& g, const AlphaSeeds& seeds);

/// Reruns the recurrence on a copy of g with alpha_1 = 0 and returns
/// max_k |beta_k - K_k|; the fixed-point property makes it vanish.
double zero_seed_deviation(const GapSequences& g);

/// Full pipeline: lengths, ratios, seeds, recurrence.
GapSequences build_sequences(const SeqParams& p);

/// Slack constants the estimate report compares the empirical constants to.
struct EstimateSlack {
    double ks_lower = 0.5;    ///< |K_k| (|k| + C)
    double ks_upper = 5.0;
    double kd_lower = 0.05;   ///< (K_k - K_{k-1}) / K_k^2
    double kd_upper = 10.0;
    double m_factor = 10.0;   ///< |m_k - 2| against max K^2
    double recurrence = 1e-13;
};

struct EstimateCheck {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string detail;
};

struct EstimateReport {
    std::vector<EstimateCheck> checks;
    double A_constant = 0.0;        ///< max |alpha_k| / |K_k|
    double positivity_margin = 0.0; ///< min 1 - |K| sup|eta| - |alpha| sup|gamma|
    bool all_pass() const;
    const EstimateCheck& find(const std::string& name) const;
};

/// Max recurrence residual over the forward range, the backward range and
/// the two head relations.
double recurrence_residual(const GapSequences& g);

EstimateReport verify_sequence_estimates(const GapSequences& g, const SeqParams& p,
                                         const ProfileSet& profiles,
                                         const EstimateSlack& slack = {});

void to_json(nlohmann::json& j, const EstimateCheck& c);
void to_json(nlohmann::json& j, const EstimateReport& r);

/// CSV with columns k,ell,K,m,alpha,beta for |k| <= M.
void write_sequence_csv(std::ostream& os, const GapSequences& g);

} // namespace dtwist
