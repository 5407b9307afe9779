#include "dtwist/sequences.hpp"

#include "dtwist/errors.hpp"
#include "dtwist/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dtwist {

void SeqParams::validate() const
{
    if (!(omega > 0.0 && omega < 1.0))
        throw InvalidParameter("omega must lie in (0, 1)");
    if (!(delta > 0.0))
        throw InvalidParameter("delta must be positive: the length series diverges for delta <= 0");
    if (!(bigC >= 10.0))
        throw InvalidParameter("C must be at least 10");
    if (!(bigB >= 3.0))
        throw InvalidParameter("B must be at least 3");
    if (truncation_M < 8)
        throw InvalidParameter("truncation M must be at least 8");
    if (truncation_M > kNormalizerDirectTerms / 2)
        throw InvalidParameter("truncation M too large");
    if (alpha1_policy == Alpha1Policy::explicit_value && !std::isfinite(alpha1_value))
        throw InvalidParameter("alpha1 must be finite");
}

IndexedSeries::IndexedSeries(long lo, long hi, double fill)
    : lo_(lo), hi_(hi), data_(static_cast<std::size_t>(hi - lo + 1), fill)
{
}

double IndexedSeries::at(long k) const
{
    if (!contains(k)) {
        std::ostringstream msg;
        msg << "index " << k << " outside [" << lo_ << ", " << hi_ << "]";
        throw std::out_of_range(msg.str());
    }
    return (*this)[k];
}

double unnormalized_length(double abs_k, double bigC, double delta)
{
    double x = abs_k + bigC;
    return 1.0 / (x * std::pow(std::log(x), 1.0 + delta));
}

namespace {

// Two-sided sum over all of Z of the unnormalized lengths: direct summation
// for |k| <= N plus an Euler-Maclaurin tail on each side.
struct NormalizerSum {
    double total;
    double tail;
};

NormalizerSum normalizer(double bigC, double delta, long n)
{
    long double side = 0.0L;
    for (long k = n; k >= 1; --k) side += unnormalized_length(static_cast<double>(k), bigC, delta);
    long double direct = 2.0L * side + unnormalized_length(0.0, bigC, delta);

    // sum_{k > N} f(k) = int_N^inf f - f(N)/2 - f'(N)/12 + O(f''')
    double x = static_cast<double>(n) + bigC;
    double L = std::log(x);
    double integral = 1.0 / (delta * std::pow(L, delta));
    double fN = 1.0 / (x * std::pow(L, 1.0 + delta));
    double dfN = -fN / x * (1.0 + (1.0 + delta) / L);
    double tail = integral - 0.5 * fN - dfN / 12.0;
    return {static_cast<double>(direct + 2.0L * tail), 2.0 * tail};
}

} // namespace

GapSequences build_gap_lengths(const SeqParams& p)
{
    p.validate();
    GapSequences g;
    g.M = p.truncation_M;
    g.bigC = p.bigC;
    g.delta = p.delta;

    NormalizerSum s = normalizer(p.bigC, p.delta, kNormalizerDirectTerms);
    g.normalizer_sum = s.total;
    g.normalizer_tail = s.tail;
    g.a_C = 1.0 / s.total;

    const long M = g.M;
    g.ell = IndexedSeries(-M - 2, M + 2);
    for (long k = -M - 2; k <= M + 2; ++k) {
        g.ell[k] = g.a_C * unnormalized_length(static_cast<double>(std::labs(k)), p.bigC, p.delta);
    }

    long double stored = 0.0L;
    for (long k = -M; k <= M; ++k) stored += g.ell[k];
    g.residual_mass = static_cast<double>(1.0L - stored);
    return g;
}

void build_ratio_sequences(GapSequences& g)
{
    const long M = g.M;
    g.K = IndexedSeries(-M - 2, M + 1);
    for (long k = -M - 2; k <= M + 1; ++k) g.K[k] = g.ell[k + 1] / g.ell[k] - 1.0;
    g.m = IndexedSeries(-M - 1, M + 1);
    for (long k = -M - 1; k <= M + 1; ++k) g.m[k] = 1.0 + g.K[k] + 1.0 / (1.0 + g.K[k - 1]);
    g.m1_adjusted.reset();
}

double head_relation_alpha0(double K0, double alpha1)
{
    // 1/(1/(1+K0) + a) - (1+K0), rearranged to avoid cancellation
    const double q = 1.0 + K0;
    return -alpha1 * q * q / (1.0 + alpha1 * q);
}

AlphaSeeds seed_alphas(const GapSequences& g, const SeqParams& p)
{
    const double K1 = g.K.at(1);
    const double K0 = g.K.at(0);
    double alpha1 = p.alpha1_policy == Alpha1Policy::half_abs_K1 ? 0.5 * std::abs(K1)
                                                                : p.alpha1_value;
    const double upper = p.bigB / (1.0 + p.bigC) - K1;
    if (!(alpha1 > 0.0) || alpha1 > upper) {
        std::ostringstream msg;
        msg << "alpha1 = " << alpha1 << " outside admissible range (0, " << upper << "]";
        throw InvalidParameter(msg.str());
    }
    return {alpha1, head_relation_alpha0(K0, alpha1), 1.0 / (1.0 + K0) + 1.0 + K1 + alpha1};
}

void extend_alphas(GapSequences& g, const AlphaSeeds& seeds)
{
    const long M = g.M;
    g.alpha1 = seeds.alpha1;
    g.alpha0 = seeds.alpha0;
    g.m1_adjusted = seeds.m1_adjusted;
    g.alpha = IndexedSeries(-M, M);
    g.beta = IndexedSeries(-M, M);

    g.alpha[1] = seeds.alpha1;
    g.alpha[0] = seeds.alpha0;
    g.beta[1] = g.K[1] + seeds.alpha1;
    g.beta[0] = g.K[0] + seeds.alpha0;
    if (!(1.0 + g.beta[0] > 0.0)) throw ConstructionError("1 + beta_0 <= 0", 0);

    for (long k = 1; k < M; ++k) {
        double next = g.m[k + 1] - 1.0 / (1.0 + g.beta[k]);
        if (!(next > 0.0)) {
            throw ConstructionError("forward sweep: 1 + beta_{k+1} <= 0", k + 1);
        }
        g.beta[k + 1] = next - 1.0;
        g.alpha[k + 1] = g.beta[k + 1] - g.K[k + 1];
    }
    for (long k = -1; k >= -M; --k) {
        double denom = g.m[k + 1] - (1.0 + g.beta[k + 1]);
        if (!(denom > 0.0)) {
            std::ostringstream msg;
            msg << "backward sweep breakdown at k = " << k
                << ": m_{k+1} - (1 + beta_{k+1}) = " << denom
                << " (C too small or alpha1 too large)";
            throw ConstructionError(msg.str(), k);
        }
        g.beta[k] = 1.0 / denom - 1.0;
        g.alpha[k] = g.beta[k] - g.K[k];
    }
}

GapSequences build_sequences(const SeqParams& p)
{
    GapSequences g = build_gap_lengths(p);
    build_ratio_sequences(g);
    extend_alphas(g, seed_alphas(g, p));
    return g;
}

double zero_seed_deviation(const GapSequences& g)
{
    GapSequences z = g;
    AlphaSeeds seeds{0.0, head_relation_alpha0(g.K[0], 0.0), 1.0 / (1.0 + g.K[0]) + 1.0 + g.K[1]};
    extend_alphas(z, seeds);
    double worst = 0.0;
    for (long k = -z.M; k <= z.M; ++k) worst = std::max(worst, std::abs(z.beta[k] - z.K[k]));
    return worst;
}

double recurrence_residual(const GapSequences& g)
{
    if (!g.has_alphas()) throw InvalidParameter("recurrence_residual: alphas not built");
    const long M = g.M;
    double worst = 0.0;
    auto relation = [&](long k) {
        return std::abs((1.0 + g.beta[k + 1]) + 1.0 / (1.0 + g.beta[k]) - g.m[k + 1]);
    };
    for (long k = 1; k < M; ++k) worst = std::max(worst, relation(k));
    for (long k = -M; k <= -1; ++k) worst = std::max(worst, relation(k));
    const double m1 = *g.m1_adjusted;
    worst = std::max(worst, std::abs(1.0 / (1.0 + g.beta[0]) + 1.0 + g.K[1] - m1));
    worst = std::max(worst, std::abs(1.0 / (1.0 + g.K[0]) + 1.0 + g.beta[1] - m1));
    return worst;
}

// ---------------------------------------------------------------------------
// Estimate report

bool EstimateReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const EstimateCheck& EstimateReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no estimate named " + name);
}

EstimateReport verify_sequence_estimates(const GapSequences& g, const SeqParams& p,
                                         const ProfileSet& profiles, const EstimateSlack& slack)
{
    if (!g.has_alphas()) throw InvalidParameter("verify_sequence_estimates: alphas not built");
    const long M = g.M;
    const double C = g.bigC;
    EstimateReport r;

    // |K_k| (|k| + C) bounded above and below.
    double ks_min = std::numeric_limits<double>::infinity();
    double ks_max = 0.0;
    for (long k = -M; k <= M; ++k) {
        double v = std::abs(g.K[k]) * (static_cast<double>(std::labs(k)) + C);
        ks_min = std::min(ks_min, v);
        ks_max = std::max(ks_max, v);
    }
    r.checks.push_back({"K_scaled_upper", ks_max, slack.ks_upper, ks_max <= slack.ks_upper,
                        "max |K_k|(|k|+C)"});
    r.checks.push_back({"K_scaled_lower", ks_min, slack.ks_lower, ks_min >= slack.ks_lower,
                        "min |K_k|(|k|+C)"});

    // K_k - K_{k-1} comparable to K_k^2, away from the symmetric
    // point k = 0 where K changes sign and the increment is first order.
    double kd_min = std::numeric_limits<double>::infinity();
    double kd_max = 0.0;
    for (long k = -M; k <= M; ++k) {
        if (k == 0) continue;
        double v = (g.K[k] - g.K[k - 1]) / (g.K[k] * g.K[k]);
        kd_min = std::min(kd_min, v);
        kd_max = std::max(kd_max, v);
    }
    r.checks.push_back({"K_step_upper", kd_max, slack.kd_upper, kd_max <= slack.kd_upper,
                        "max (K_k - K_{k-1})/K_k^2, k != 0"});
    r.checks.push_back({"K_step_lower", kd_min, slack.kd_lower, kd_min >= slack.kd_lower,
                        "min (K_k - K_{k-1})/K_k^2, k != 0 (positive: K increasing)"});
    {
        double v = (g.K[0] - g.K[-1]) / (g.K[0] * g.K[0]);
        r.checks.push_back({"K_step_at_zero", v, 0.0, true,
                            "(K_0 - K_{-1})/K_0^2; informational, sign change of K at k = 0"});
    }

    // ell_k (|k|+C) log(|k|+C)^(1+delta) is the constant a_C.
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (long k = -M; k <= M; ++k) {
            double v = g.ell[k] / unnormalized_length(static_cast<double>(std::labs(k)), C, g.delta);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double spread = (hi - lo) / g.a_C;
        r.checks.push_back({"length_normalization_spread", spread, 1e-12, spread <= 1e-12,
                            "relative spread of ell_k / unnormalized length (equals a_C)"});
    }

    // K_k^2 / ell_k decays on the outer half of each side.
    {
        bool monotone = true;
        for (long n = M / 2; n < M; ++n) {
            double here_p = g.K[n] * g.K[n] / g.ell[n];
            double next_p = g.K[n + 1] * g.K[n + 1] / g.ell[n + 1];
            double here_m = g.K[-n] * g.K[-n] / g.ell[-n];
            double next_m = g.K[-n - 1] * g.K[-n - 1] / g.ell[-n - 1];
            monotone = monotone && next_p < here_p && next_m < here_m;
        }
        double at_half = g.K[M / 2] * g.K[M / 2] / g.ell[M / 2];
        double at_end = g.K[M] * g.K[M] / g.ell[M];
        r.checks.push_back({"K2_over_ell_decay", at_end / at_half, 1.0, at_end < at_half && monotone,
                            "K_M^2/ell_M over K_{M/2}^2/ell_{M/2}; monotone on [M/2, M] both sides"});
    }

    // |m_{k+1} - 2| second order, except m_0 = 2(1 + K_0).
    {
        double max_dev = 0.0;
        double max_K2 = 0.0;
        double mc = 0.0;
        for (long k = -M - 1; k <= M; ++k) {
            max_K2 = std::max(max_K2, g.K[k] * g.K[k]);
            if (k + 1 == 0) continue;
            double dev = std::abs(g.m[k + 1] - 2.0);
            max_dev = std::max(max_dev, dev);
            double ak = static_cast<double>(std::labs(k)) + C;
            mc = std::max(mc, dev * ak * ak);
        }
        r.checks.push_back({"m_second_order", max_dev, slack.m_factor * max_K2,
                            max_dev <= slack.m_factor * max_K2,
                            "max_{k+1 != 0} |m_{k+1} - 2| against factor * max K^2"});
        r.checks.push_back({"m_scaled_constant", mc, 0.0, std::isfinite(mc),
                            "max_{k+1 != 0} |m_{k+1} - 2| (|k|+C)^2 (empirical constant)"});
        double m0_identity = std::abs((g.m[0] - 2.0) - 2.0 * g.K[0]);
        r.checks.push_back({"m0_first_order", m0_identity, 1e-15, m0_identity <= 1e-15,
                            "m_0 - 2 = 2 K_0 (symmetric lengths)"});
    }

    // Signs of alpha and the beta bounds.
    {
        bool pos = true;
        for (long n = 1; n <= M; ++n) pos = pos && g.alpha[n] > 0.0;
        bool neg = true;
        for (long n = 0; n <= M; ++n) neg = neg && g.alpha[-n] < 0.0;
        r.checks.push_back({"alpha_positive", pos ? 1.0 : 0.0, 1.0, pos, "alpha_n > 0, 1 <= n <= M"});
        r.checks.push_back({"alpha_negative", neg ? 1.0 : 0.0, 1.0, neg, "alpha_{-n} < 0, 0 <= n <= M"});

        double beta_bound = -std::numeric_limits<double>::infinity();
        bool above_K = true;
        for (long n = 1; n <= M; ++n) {
            beta_bound = std::max(beta_bound, g.beta[n] * (static_cast<double>(n) + C));
            above_K = above_K && g.beta[n] >= g.K[n];
        }
        r.checks.push_back({"beta_upper", beta_bound, p.bigB, beta_bound <= p.bigB,
                            "max_{n>=1} beta_n (n + C) against B"});
        r.checks.push_back({"beta_above_K", above_K ? 1.0 : 0.0, 1.0, above_K, "beta_n >= K_n, n >= 1"});

        double alpha_neg = 0.0;
        for (long n = 0; n <= M; ++n)
            alpha_neg = std::max(alpha_neg, std::abs(g.alpha[-n]) * (static_cast<double>(n) + C));
        r.checks.push_back({"alpha_negative_bound", alpha_neg, p.bigB, alpha_neg <= p.bigB,
                            "max_{n>=0} |alpha_{-n}| (n + C) (empirical C_2)"});
    }

    {
        double res = recurrence_residual(g);
        r.checks.push_back({"recurrence_residual", res, slack.recurrence, res <= slack.recurrence,
                            "max |1 + beta_{k+1} + 1/(1 + beta_k) - m_{k+1}|"});
    }

    {
        double A = 0.0;
        double margin = std::numeric_limits<double>::infinity();
        const double sup_eta = profiles.eta().sup_abs(Order::value);
        const double sup_gamma = profiles.gamma_plus().sup_abs(Order::value);
        for (long k = -M; k <= M; ++k) {
            A = std::max(A, std::abs(g.alpha[k]) / std::abs(g.K[k]));
            margin = std::min(margin, 1.0 - std::abs(g.K[k]) * sup_eta - std::abs(g.alpha[k]) * sup_gamma);
        }
        r.A_constant = A;
        r.positivity_margin = margin;
        r.checks.push_back({"alpha_over_K", A, 0.0, std::isfinite(A), "max |alpha_k|/|K_k| (constant A)"});
        r.checks.push_back({"positivity_margin", margin, 0.0, margin > 0.0,
                            "min 1 - |K_k| sup|eta| - |alpha_k| sup|gamma|"});
    }
    return r;
}

void to_json(nlohmann::json& j, const EstimateCheck& c)
{
    j = nlohmann::json{{"name", c.name}, {"measured", c.measured}, {"bound", c.bound},
                       {"pass", c.pass}, {"detail", c.detail}};
}

void to_json(nlohmann::json& j, const EstimateReport& r)
{
    j = nlohmann::json{{"checks", r.checks},
                       {"A_constant", r.A_constant},
                       {"positivity_margin", r.positivity_margin},
                       {"pass", r.all_pass()}};
}

void write_sequence_csv(std::ostream& os, const GapSequences& g)
{
    os << "k,ell,K,m,alpha,beta\n";
    os.precision(17);
    for (long k = -g.M; k <= g.M; ++k) {
        os << k << ',' << g.ell[k] << ',' << g.K[k] << ',' << g.m[k] << ',';
        if (g.has_alphas())
            os << g.alpha[k] << ',' << g.beta[k];
        else
            os << ',';
        os << '\n';
    }
}

} // namespace dtwist
