#ifndef CIRCDECONV_WEIGHT_CLASSES_HPP
#define CIRCDECONV_WEIGHT_CLASSES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "circdeconv/circular.hpp"
#include "circdeconv/selection.hpp"

namespace circdeconv {

/// Parses a family tag into a weight sequence.
/// sobolev: w_j = |j|^(2p), p > 1/2        derivative: w_j = |j|^(2s), s >= 0
/// os:      w_j = |j|^(-2a), a > 1/2       ss:         w_j = exp(-|j|^(2a)), a > 0
inline WeightSequence make_weights(const std::string& family, double param) {
    if (family == "sobolev") return WeightSequence::sobolev(param);
    if (family == "derivative") {
        if (param != std::floor(param))
            throw std::invalid_argument("derivative weights require integer s >= 0");
        return WeightSequence::derivative(static_cast<int>(param));
    }
    if (family == "os") return WeightSequence::ordinary_smooth(param);
    if (family == "ss") return WeightSequence::super_smooth(param);
    throw std::invalid_argument("unknown weight family '" + family + "'");
}

/// Joint description of the density classes F_gamma^r and E_lambda^d and
/// the risk weights omega.
struct ClassSpec {
    WeightSequence gamma = WeightSequence::sobolev(1.0);
    WeightSequence lambda = WeightSequence::ordinary_smooth(1.0);
    WeightSequence omega = WeightSequence::derivative(0);
    double r = 2.0;
    double d = 1.0;

    void validate(long prefix = 64) const {
        if (!(r >= 1.0)) throw std::invalid_argument("class radius r must be >= 1");
        if (!(d >= 1.0)) throw std::invalid_argument("corridor constant d must be >= 1");
        if (!is_nonincreasing_prefix(lambda, prefix))
            throw std::invalid_argument("lambda must be non-increasing");
        double prev = 1.0;
        for (long j = 1; j <= prefix; ++j) {
            const double ratio = omega(j) / gamma(j);
            if (ratio > prev * (1.0 + 1e-12))
                throw std::invalid_argument("omega/gamma must be non-increasing");
            prev = ratio;
        }
    }
};

struct MembershipReport {
    bool member = false;
    double norm_sq = 0.0;   // F-class: sum gamma_j |c_j|^2
    double min_ratio = 0.0; // E-class: extremes of |c_j|^2 / lambda_j over 0<|j|<=K
    double max_ratio = 0.0;
    long checked_up_to = 0;
};

enum class DensityClass { F, E };

/// Checks corridor/ellipsoid membership of a spectrum over its stored band.
inline MembershipReport check_class_membership(const SpectralVector& spec, const ClassSpec& cls,
                                               DensityClass which) {
    MembershipReport rep;
    rep.checked_up_to = spec.max_index();
    if (which == DensityClass::F) {
        rep.norm_sq = std::norm(spec[0]);
        for (long j = 1; j <= spec.max_index(); ++j)
            rep.norm_sq += cls.gamma(j) * (std::norm(spec[j]) + std::norm(spec[-j]));
        rep.member = rep.norm_sq <= cls.r;
        return rep;
    }
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    for (long j = 1; j <= spec.max_index(); ++j) {
        for (const long idx : {j, -j}) {
            const double ratio = std::norm(spec[idx]) / cls.lambda(j);
            rep.min_ratio = std::min(rep.min_ratio, ratio);
            rep.max_ratio = std::max(rep.max_ratio, ratio);
        }
    }
    if (spec.max_index() == 0) rep.min_ratio = rep.max_ratio = 1.0;
    rep.member = rep.min_ratio >= 1.0 / cls.d && rep.max_ratio <= cls.d;
    return rep;
}

/// Minimax rate quantities evaluated by exact discrete search:
///   psi_n = min_k max(w_k/g_k, sum_{0<|j|<=k} w_j/(n l_j)),   k* its argmin,
///   kappa_m = max_j w_j/g_j min(1, 1/(m l_j)).
/// balance_ratio reports min(bias, variance)/psi_n at k*, the realized
/// sequence-balance of the eta condition (reported, never gated).
struct RateOracleResult {
    double psi_n = 0.0;
    long k_star = 1;
    double kappa_m = 0.0;
    long kappa_argmax = 1;
    long search_bound = 1;
    double balance_ratio = 0.0;
};

inline RateOracleResult rate_oracle(const ClassSpec& cls, long n, long m, long k_max = 0) {
    if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
    if (k_max <= 0) k_max = std::min(n, 1000000L);
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

    RateOracleResult res;
    double var = 0.0, best = 0.0, best_bias = 0.0, best_var = 0.0;
    double bias_last = 0.0, var_last = 0.0;
    for (long k = 1; k <= k_max; ++k) {
        const double bias = cls.omega(k) / cls.gamma(k);
        var += 2.0 * cls.omega(k) / (static_cast<double>(n) * cls.lambda(k));
        const double value = std::max(bias, var);
        if (k == 1 || value < best) {
            best = value;
            res.k_star = k;
            best_bias = bias;
            best_var = var;
        }
        bias_last = bias;
        var_last = var;
    }
    if (bias_last > var_last)
        throw std::domain_error("k_max too small: bias still dominates variance at k_max");
    res.psi_n = best;
    res.balance_ratio = std::min(best_bias, best_var) / best;

    // kappa scan: past the index where m lambda_j < 1 the objective equals
    // w_j/g_j, non-increasing under the class assumptions, so a short
    // margin beyond the crossing suffices.
    long scan_end = k_max;
    for (long j = 1; j <= k_max; ++j) {
        if (static_cast<double>(m) * cls.lambda(j) < 1.0) {
            scan_end = std::min(j + 8, k_max);
            break;
        }
    }
    res.search_bound = scan_end;
    res.kappa_m = 0.0;
    for (long j = 1; j <= scan_end; ++j) {
        const double v = cls.omega(j) / cls.gamma(j) *
                         std::min(1.0, 1.0 / (static_cast<double>(m) * cls.lambda(j)));
        if (v > res.kappa_m) {
            res.kappa_m = v;
            res.kappa_argmax = j;
        }
    }
    return res;
}

/// Closed-form minimax rate value (constants dropped) for slope fitting:
///   os: n^{-2(p-s)/(2p+2a+1)} + m^{-((p-s)^a)/a}
///   ss: (log n)^{-(p-s)/a} + (log m)^{-(p-s)/a}
enum class NoiseRegime { OrdinarySmooth, SuperSmooth };

inline double rate_prediction(NoiseRegime regime, double p, double a, int s, long n, long m) {
    if (!(p > static_cast<double>(s)) || s < 0)
        throw std::invalid_argument("rate prediction requires p > s >= 0");
    if (n < 2 || m < 2) throw std::invalid_argument("n and m must be >= 2");
    const double ps = p - static_cast<double>(s);
    if (regime == NoiseRegime::OrdinarySmooth) {
        if (!(a > 0.5)) throw std::invalid_argument("ordinary smooth case requires a > 1/2");
        return std::pow(static_cast<double>(n), -2.0 * ps / (2.0 * p + 2.0 * a + 1.0)) +
               std::pow(static_cast<double>(m), -std::min(ps, a) / a);
    }
    if (!(a > 0.0)) throw std::invalid_argument("super smooth case requires a > 0");
    return std::pow(std::log(static_cast<double>(n)), -ps / a) +
           std::pow(std::log(static_cast<double>(m)), -ps / a);
}

/// Reporting-only quantities of the fully adaptive risk bound:
///   N_l = max{1 <= j <= N_n : l_j/(j (w_j v 1)) >= 4 d log(n)/n}
///   M_l = max{1 <= j <= M_m : l_j >= 4 d (log m)^2/m}
///   zeta_d = log(3d)/log(3).
/// Never consumed by the estimator.
struct DiagnosticBounds {
    long N_n = 1, M_m = 1;
    long N_l = 1, M_l = 1;
    double zeta_d = 1.0;
};

inline DiagnosticBounds diagnostic_bounds(const ClassSpec& cls, long n, long m) {
    if (n < 2 || m < 2) throw std::invalid_argument("n and m must be >= 2");
    DiagnosticBounds b;
    b.N_n = dimension_bound_known(cls.omega, cls.lambda, n);
    b.M_m = error_bound_known(cls.lambda, cls.d, m);
    b.zeta_d = std::log(3.0 * cls.d) / std::log(3.0);

    const double thr_n = 4.0 * cls.d * std::log(static_cast<double>(n)) / static_cast<double>(n);
    for (long j = 1; j <= b.N_n; ++j) {
        if (cls.lambda(j) / (static_cast<double>(j) * std::max(cls.omega(j), 1.0)) >= thr_n)
            b.N_l = j;
    }
    const double thr_m =
        4.0 * cls.d * std::pow(std::log(static_cast<double>(m)), 2) / static_cast<double>(m);
    for (long j = 1; j <= b.M_m; ++j) {
        if (cls.lambda(j) >= thr_m) b.M_l = j;
    }
    return b;
}

} // namespace circdeconv

#endif // CIRCDECONV_WEIGHT_CLASSES_HPP
