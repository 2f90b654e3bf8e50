#ifndef CIRCDECONV_ESTIMATOR_HPP
#define CIRCDECONV_ESTIMATOR_HPP

#include <algorithm>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "circdeconv/circular.hpp"

namespace circdeconv {

/// Thresholded spectral cut-off deconvolution estimate at dimension k.
///
/// spectrum holds the coefficients of
///   f_hat_k = 1 + sum_{0<|j|<=k} (g_hat_j / phi_hat_j) 1{|phi_hat_j|^2 >= 1/m} e_j,
/// threshold_hits records every j (both signs) where the indicator failed.
struct DeconvEstimate {
    long k = 1;
    long m = 1;
    SpectralVector spectrum;
    std::vector<long> threshold_hits;
};

/// Builds the estimate from the two empirical spectra. The indicator
/// counts |phi_hat_j|^2 == 1/m exactly as passing.
inline DeconvEstimate deconvolve(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                                 long m, long k) {
    if (k < 1) throw std::invalid_argument("cutoff k must be >= 1");
    if (m < 1) throw std::invalid_argument("error-sample size m must be >= 1");
    if (g_hat.max_index() < k || phi_hat.max_index() < k)
        throw std::invalid_argument("insufficient spectrum range for cutoff k");

    DeconvEstimate est;
    est.k = k;
    est.m = m;
    est.spectrum = SpectralVector(k);
    est.spectrum[0] = {1.0, 0.0};
    const double threshold = 1.0 / static_cast<double>(m);
    for (long j = -k; j <= k; ++j) {
        if (j == 0) continue;
        if (std::norm(phi_hat[j]) >= threshold) {
            est.spectrum[j] = g_hat[j] / phi_hat[j];
        } else {
            est.threshold_hits.push_back(j);
        }
    }
    std::sort(est.threshold_hits.begin(), est.threshold_hits.end());
    return est;
}

/// Coefficient transform of the s-th weak derivative: c_j -> (2 i pi j)^s c_j.
inline SpectralVector derivative_transform(const SpectralVector& spec, int s) {
    if (s < 0) throw std::invalid_argument("derivative order s must be >= 0");
    if (s == 0) return spec;
    SpectralVector out(spec.max_index());
    for (long j = -spec.max_index(); j <= spec.max_index(); ++j) {
        const std::complex<double> base{0.0, kTwoPi * static_cast<double>(j)};
        std::complex<double> factor{1.0, 0.0};
        for (int i = 0; i < s; ++i) factor *= base;
        out[j] = factor * spec[j];
    }
    return out;
}

inline SpectralVector derivative_transform(const DeconvEstimate& est, int s) {
    return derivative_transform(est.spectrum, s);
}

/// Squared omega-norm of the estimate at dimension k, evaluated directly as
///   1 + sum_{0<|j|<=k} w_j |g_hat_j|^2 |phi_hat_j|^{-2} 1{|phi_hat_j|^2 >= 1/m}.
/// Kept as an independent code path from deconvolve + weighted_norm_sq;
/// the two must agree within 1e-12.
inline double contrast_norm_sq(const SpectralVector& g_hat, const SpectralVector& phi_hat,
                               long m, long k, const WeightSequence& omega) {
    if (k < 1) throw std::invalid_argument("cutoff k must be >= 1");
    if (m < 1) throw std::invalid_argument("error-sample size m must be >= 1");
    if (g_hat.max_index() < k || phi_hat.max_index() < k)
        throw std::invalid_argument("insufficient spectrum range for cutoff k");
    const double threshold = 1.0 / static_cast<double>(m);
    double acc = 1.0;
    for (long j = 1; j <= k; ++j) {
        const double w = omega(j);
        const double denom_pos = std::norm(phi_hat[j]);
        const double denom_neg = std::norm(phi_hat[-j]);
        if (denom_pos >= threshold) acc += w * std::norm(g_hat[j]) / denom_pos;
        if (denom_neg >= threshold) acc += w * std::norm(g_hat[-j]) / denom_neg;
    }
    return acc;
}

/// Weighted squared distance sum_{|j|<=tail_bound} w_j |est_j - truth_j|^2,
/// plus the analytic tail beyond tail_bound when the caller supplies one.
/// Without an analytic tail the truth must be negligible at the boundary.
inline double exact_risk(const SpectralVector& est, const SpectralVector& truth,
                         const WeightSequence& omega, long tail_bound,
                         std::optional<double> analytic_tail = std::nullopt) {
    if (tail_bound < est.max_index())
        throw std::invalid_argument("tail_bound must cover the estimate band");
    if (truth.max_index() < tail_bound)
        throw std::invalid_argument("truth spectrum must extend to tail_bound");
    if (!analytic_tail) {
        const double boundary = omega(tail_bound) *
                                (std::norm(truth[tail_bound]) + std::norm(truth[-tail_bound]));
        if (boundary > 1e-10) throw std::domain_error("tail bias unbounded");
    }
    double acc = std::norm(est.at_or_zero(0) - truth[0]);
    for (long j = 1; j <= tail_bound; ++j) {
        acc += omega(j) * (std::norm(est.at_or_zero(j) - truth[j]) +
                           std::norm(est.at_or_zero(-j) - truth[-j]));
    }
    return acc + analytic_tail.value_or(0.0);
}

} // namespace circdeconv

#endif // CIRCDECONV_ESTIMATOR_HPP
