#ifndef CIRCDECONV_SELECTION_HPP
#define CIRCDECONV_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "circdeconv/circular.hpp"
#include "circdeconv/estimator.hpp"

namespace circdeconv {

/// Thrown when a numeric precondition (an Assumption-style smallness
/// requirement) is violated and strict checking was requested.
struct numeric_precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// log of delta_k = 2k Delta_k log(tau_k v (k+2)) / log(k+2), given the
/// running log-maxima. Usable far beyond double range of delta itself.
inline double log_delta(long k, double log_Delta, double log_tau, double k_factor) {
    const double log_kp2 = std::log(static_cast<double>(k + 2));
    const double corr = std::log(std::max(log_tau, log_kp2)) - std::log(log_kp2);
    return std::log(k_factor * static_cast<double>(k)) + log_Delta + corr;
}

} // namespace detail

/// Dimension bound N_n = max{1 <= N <= n : delta_N / n <= delta_1}.
/// delta is strictly increasing (its factors are running maxima), so the
/// admissible set is a prefix and the scan stops at the first violation.
inline long dimension_bound_known(const WeightSequence& omega, const WeightSequence& lambda, long n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    double log_Delta = 0.0, log_tau = 0.0; // j = 0 contributes w0/l0 = 1
    double log_delta1 = 0.0;
    long N = 1;
    for (long k = 1; k <= n; ++k) {
        const double lw = omega.log_value(k), ll = lambda.log_value(k);
        log_Delta = std::max(log_Delta, lw - ll);
        log_tau = std::max(log_tau, std::max(lw, 0.0) - ll);
        const double ld = detail::log_delta(k, log_Delta, log_tau, 2.0);
        if (k == 1) {
            log_delta1 = ld;
            continue; // delta_1 / n <= delta_1 always
        }
        if (ld > std::log(static_cast<double>(n)) + log_delta1) break;
        N = k;
    }
    return N;
}

/// Error-sample bound
///   M_m = max{1 <= M <= m : m^7 exp(-m lambda_M / (72 d)) <= (504 d / lambda_1)^7},
/// evaluated in log space so m^7 never overflows.
inline long error_bound_known(const WeightSequence& lambda, double d, long m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(d >= 1.0)) throw std::invalid_argument("corridor constant d must be >= 1");
    const double rhs = 7.0 * (std::log(504.0) + std::log(d) - lambda.log_value(1));
    const double log_m7 = 7.0 * std::log(static_cast<double>(m));
    const bool monotone = lambda.family() != WeightSequence::Family::Custom &&
                          lambda.family() != WeightSequence::Family::Sobolev;
    long M = 1; // always admissible: x e^{-x} <= 1 at x = m lambda_1/(504 d)
    for (long k = 2; k <= m; ++k) {
        const double lhs = log_m7 - static_cast<double>(m) * std::exp(lambda.log_value(k)) / (72.0 * d);
        if (lhs <= rhs) {
            M = k;
        } else if (monotone) {
            break; // lambda non-increasing makes the admissible set a prefix
        }
    }
    return M;
}

/// Upper search bound of the fully data-driven rule:
/// N_n^u = max{0 < N <= n : max_{0<j<=N} omega_j <= n}.
inline long upper_dimension_bound(const WeightSequence& omega, long n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    using F = WeightSequence::Family;
    switch (omega.family()) {
        case F::OrdinarySmooth:
        case F::SuperSmooth:
            return n; // omega_j <= 1
        case F::Derivative:
        case F::Sobolev: {
            if (omega.param() == 0.0) return n;
            // omega_j = j^(2p) is increasing; invert and fix up at the boundary.
            long N = static_cast<long>(std::floor(
                std::pow(static_cast<double>(n), 1.0 / (2.0 * omega.param()))));
            N = std::clamp(N, 1L, n);
            while (N < n && omega(N + 1) <= static_cast<double>(n)) ++N;
            while (N > 1 && omega(N) > static_cast<double>(n)) --N;
            return N;
        }
        case F::Custom:
            break;
    }
    long N = 1;
    for (long j = 1; j <= n; ++j) {
        if (omega(j) > static_cast<double>(n)) break;
        N = j;
    }
    return N;
}

/// Per-k penalty and bound quantities of the two selection rules.
/// Arrays are indexed k-1 for k = 1..max_k(), including one extra row
/// past the search cap for diagnostics. The known variant uses factor 2k
/// in delta_k, the empirical one factor k, both exactly as defined.
struct SelectionTables {
    enum class Mode { Known, Empirical };
    Mode mode = Mode::Known;

    std::vector<double> Delta, tau, delta;

    // known mode
    long N_n = 0, M_m = 0;
    bool assumption2_ok = true;
    double assumption2_lhs = 0.0, assumption2_rhs = 0.0;

    // empirical mode
    long N_u = 0, N_hat = 0, M_hat = 0;
    bool nhat_determined = true, mhat_determined = true;

    long cap() const { return mode == Mode::Known ? std::min(N_n, M_m) : std::min(N_hat, M_hat); }
    long max_k() const { return static_cast<long>(delta.size()); }
    bool determined() const { return nhat_determined && mhat_determined; }
};

/// Tables for the rule with known degree of ill-posedness:
/// Delta_k = max_{0<=|j|<=k} w_j/l_j, tau_k with (w_j v 1), and
/// delta_k = 2k Delta_k log(tau_k v (k+2))/log(k+2), for k up to N_n ^ M_m
/// plus one extra row.
inline SelectionTables known_tables(const WeightSequence& omega, const WeightSequence& lambda,
                                    double d, long n, long m) {
    if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
    if (!(d >= 1.0)) throw std::invalid_argument("corridor constant d must be >= 1");

    SelectionTables t;
    t.mode = SelectionTables::Mode::Known;
    t.N_n = dimension_bound_known(omega, lambda, n);
    t.M_m = error_bound_known(lambda, d, m);

    const long table_max = std::min(t.N_n, t.M_m) + 1;
    t.Delta.reserve(table_max);
    double Delta = 1.0, tau = 1.0;
    for (long k = 1; k <= table_max; ++k) {
        const double w = omega(k), l = lambda(k);
        Delta = std::max(Delta, w / l);
        tau = std::max(tau, std::max(w, 1.0) / l);
        const double corr = std::log(std::max(tau, static_cast<double>(k + 2))) /
                            std::log(static_cast<double>(k + 2));
        t.Delta.push_back(Delta);
        t.tau.push_back(tau);
        t.delta.push_back(2.0 * static_cast<double>(k) * Delta * corr);
    }

    double min_lambda = lambda(1);
    for (long j = 2; j <= t.M_m; ++j) min_lambda = std::min(min_lambda, lambda(j));
    t.assumption2_lhs = min_lambda / d;
    t.assumption2_rhs = 2.0 / static_cast<double>(m);
    t.assumption2_ok = t.assumption2_lhs >= t.assumption2_rhs;
    return t;
}

/// Tables for the fully data-driven rule, computed from phi_hat and omega
/// alone. hat_Delta_k maximizes w_j |phi_hat_j|^{-2} 1{|phi_hat_j|^2 >= 1/m}
/// over 0 <= |j| <= k (the j = 0 term keeps the maximum at least 1), and
/// the search bounds come from first-crossing scans:
///   hat_N = min{1 <= j <= N_u : |phi_hat_j|^2 / (j (w_j v 1)) < log(n)/n}
///   hat_M = min{1 <= j <= m   : |phi_hat_j|^2 < (log m)^2 / m}
/// with fallback to the range's upper end when no index qualifies. When
/// phi_hat is too short to decide a bound, the corresponding *_determined
/// flag is cleared and the caller should extend the spectrum.
inline SelectionTables empirical_tables(const SpectralVector& phi_hat, const WeightSequence& omega,
                                        long n, long m) {
    if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
    const long range = phi_hat.max_index();

    SelectionTables t;
    t.mode = SelectionTables::Mode::Empirical;
    t.N_u = upper_dimension_bound(omega, n);

    const double log_n_over_n = std::log(static_cast<double>(n)) / static_cast<double>(n);
    const double log_m_sq_over_m =
        std::pow(std::log(static_cast<double>(m)), 2) / static_cast<double>(m);

    const long scan_n = std::min(t.N_u, range);
    t.N_hat = scan_n;
    t.nhat_determined = scan_n == t.N_u;
    for (long j = 1; j <= scan_n; ++j) {
        const double mod2 = std::min(std::norm(phi_hat[j]), std::norm(phi_hat[-j]));
        if (mod2 / (static_cast<double>(j) * std::max(omega(j), 1.0)) < log_n_over_n) {
            t.N_hat = j;
            t.nhat_determined = true;
            break;
        }
    }

    const long scan_m = std::min(m, range);
    t.M_hat = scan_m;
    t.mhat_determined = scan_m == m;
    for (long j = 1; j <= scan_m; ++j) {
        if (std::min(std::norm(phi_hat[j]), std::norm(phi_hat[-j])) < log_m_sq_over_m) {
            t.M_hat = j;
            t.mhat_determined = true;
            break;
        }
    }

    const long table_max = std::min(std::min(t.N_hat, t.M_hat) + 1, range);
    const double threshold = 1.0 / static_cast<double>(m);
    double Delta = 1.0, tau = 1.0; // j = 0: |phi_hat_0| = 1 always passes
    t.Delta.reserve(table_max);
    for (long k = 1; k <= table_max; ++k) {
        for (const long j : {k, -k}) {
            const double mod2 = std::norm(phi_hat[j]);
            if (mod2 < threshold) continue;
            Delta = std::max(Delta, omega(k) / mod2);
            tau = std::max(tau, std::max(omega(k), 1.0) / mod2);
        }
        const double corr = std::log(std::max(tau, static_cast<double>(k + 2))) /
                            std::log(static_cast<double>(k + 2));
        t.Delta.push_back(Delta);
        t.tau.push_back(tau);
        t.delta.push_back(static_cast<double>(k) * Delta * corr);
    }
    return t;
}

/// Outcome of a penalized model selection: the chosen dimension, the
/// search cap, and the full criterion trace over candidate k.
struct SelectionResult {
    long k_hat = 1;
    long search_cap = 1;
    SelectionTables::Mode mode = SelectionTables::Mode::Known;
    std::vector<double> contrast, penalty, criterion; // index k-1
};

struct KnownSelectionOptions {
    double penalty_const = 60.0; // paper default
    bool strict = false;         // escalate Assumption violations to errors
};

struct EmpiricalSelectionOptions {
    double penalty_const = 600.0; // paper default; often calibrated far lower
};

namespace detail {

inline SelectionResult minimize_criterion(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                                          long m, long n, const WeightSequence& omega,
                                          const SelectionTables& tables, double pen_scale) {
    const long cap = tables.cap();
    if (cap < 1) throw std::logic_error("selection search cap below 1");
    if (g_hat.max_index() < cap || phi_hat.max_index() < cap)
        throw std::invalid_argument("insufficient spectrum range for selection cap " +
                                    std::to_string(cap));

    SelectionResult res;
    res.mode = tables.mode;
    res.search_cap = cap;
    res.contrast.reserve(cap);
    const double threshold = 1.0 / static_cast<double>(m);
    double contrast = 1.0;
    double best = 0.0;
    for (long k = 1; k <= cap; ++k) {
        const double w = omega(k);
        if (std::norm(phi_hat[k]) >= threshold) contrast += w * std::norm(g_hat[k]) / std::norm(phi_hat[k]);
        if (std::norm(phi_hat[-k]) >= threshold) contrast += w * std::norm(g_hat[-k]) / std::norm(phi_hat[-k]);
        const double pen = pen_scale * tables.delta[k - 1] / static_cast<double>(n);
        const double crit = -contrast + pen;
        res.contrast.push_back(contrast);
        res.penalty.push_back(pen);
        res.criterion.push_back(crit);
        if (k == 1 || crit < best) {
            best = crit;
            res.k_hat = k;
        }
    }
    return res;
}

} // namespace detail

/// Partially adaptive rule (known degree of ill-posedness):
/// k_hat = argmin_{1<=k<=N_n^M_m} { -||f_hat_k||^2_w + pen_const d delta_k / n }.
inline SelectionResult select_known(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                                    long m, long n, const WeightSequence& omega,
                                    const SelectionTables& tables, double d,
                                    const KnownSelectionOptions& opts = {}) {
    if (opts.strict && !tables.assumption2_ok)
        throw numeric_precondition_error(
            "Assumption violated: min lambda over the M_m band / d = " +
            std::to_string(tables.assumption2_lhs) + " < 2/m = " +
            std::to_string(tables.assumption2_rhs));
    return detail::minimize_criterion(g_hat, phi_hat, m, n, omega, tables,
                                      opts.penalty_const * d);
}

inline SelectionResult select_known(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                                    long m, long n, const WeightSequence& omega,
                                    const WeightSequence& lambda, double d,
                                    const KnownSelectionOptions& opts = {}) {
    return select_known(g_hat, phi_hat, m, n, omega, known_tables(omega, lambda, d, n, m), d, opts);
}

/// Fully data-driven rule:
/// k_hat = argmin_{1<=k<=hat_N^hat_M} { -||f_hat_k||^2_w + pen_const hat_delta_k / n }.
/// Consumes no lambda and no d.
inline SelectionResult select_empirical(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                                        long n, long m, const WeightSequence& omega,
                                        const SelectionTables& tables,
                                        const EmpiricalSelectionOptions& opts = {}) {
    if (!tables.determined())
        throw std::invalid_argument("phi_hat range too short to determine selection bounds");
    return detail::minimize_criterion(g_hat, phi_hat, m, n, omega, tables, opts.penalty_const);
}

inline SelectionResult select_empirical(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                                        long n, long m, const WeightSequence& omega,
                                        const EmpiricalSelectionOptions& opts = {}) {
    return select_empirical(g_hat, phi_hat, n, m, omega, empirical_tables(phi_hat, omega, n, m),
                            opts);
}

struct EmpiricalTablesResult {
    SelectionTables tables;
    SpectralVector phi_hat;
};

/// Builds the empirical tables straight from the calibration sample,
/// growing the phi_hat band geometrically until both first-crossing
/// bounds are determined.
inline EmpiricalTablesResult empirical_tables_from_sample(const CircularSample& eps,
                                                          const WeightSequence& omega, long n,
                                                          long m) {
    const long limit = std::max(upper_dimension_bound(omega, n), m);
    long K = std::min(16L, limit);
    SpectralVector phi_hat = empirical_spectrum(eps, K);
    SelectionTables tabs = empirical_tables(phi_hat, omega, n, m);
    while (!tabs.determined() && K < limit) {
        K = std::min(2 * K, limit);
        phi_hat = empirical_spectrum(eps, K);
        tabs = empirical_tables(phi_hat, omega, n, m);
    }
    return {std::move(tabs), std::move(phi_hat)};
}

} // namespace circdeconv

#endif // CIRCDECONV_SELECTION_HPP
