#ifndef CIRCDECONV_CIRCULAR_HPP
#define CIRCDECONV_CIRCULAR_HPP

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace circdeconv {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Ordered batch of observations on the circle, identified with [0, 1).
class CircularSample {
public:
    explicit CircularSample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("empty sample");
        for (double v : values_) {
            if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("value outside [0,1)");
        }
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Complex Fourier coefficients c_j for j = -K..K against the basis
/// e_j(x) = exp(-i 2 pi j x), with [p]_j = <p, e_j>.
class SpectralVector {
public:
    SpectralVector() : max_index_(0), coeffs_(1, {0.0, 0.0}) {}

    explicit SpectralVector(long max_index)
        : max_index_(max_index), coeffs_(2 * static_cast<std::size_t>(max_index) + 1, {0.0, 0.0}) {
        if (max_index < 0) throw std::invalid_argument("max_index must be >= 0");
    }

    long max_index() const { return max_index_; }

    std::complex<double>& operator[](long j) { return coeffs_[index(j)]; }
    const std::complex<double>& operator[](long j) const { return coeffs_[index(j)]; }

    bool has(long j) const { return j >= -max_index_ && j <= max_index_; }

    /// Coefficient at j, taking values outside the stored band as zero.
    std::complex<double> at_or_zero(long j) const {
        return has(j) ? coeffs_[index(j)] : std::complex<double>{0.0, 0.0};
    }

    /// c_{-j} == conj(c_j) up to tol, making the synthesized function real.
    bool is_hermitian(double tol = 1e-12) const {
        for (long j = 1; j <= max_index_; ++j) {
            const auto diff = (*this)[-j] - std::conj((*this)[j]);
            if (std::abs(diff) > tol * std::max(1.0, std::abs((*this)[j]))) return false;
        }
        return std::abs((*this)[0].imag()) <= tol;
    }

private:
    std::size_t index(long j) const {
        if (j < -max_index_ || j > max_index_)
            throw std::out_of_range("spectral index " + std::to_string(j) +
                                    " outside band [-" + std::to_string(max_index_) + "," +
                                    std::to_string(max_index_) + "]");
        return static_cast<std::size_t>(j + max_index_);
    }

    long max_index_;
    std::vector<std::complex<double>> coeffs_;
};

/// Strictly positive symmetric weight sequence with w_0 = 1.
///
/// Families: sobolev w_j = |j|^(2p), derivative w_j = |j|^(2s),
/// os w_j = |j|^(-2a), ss w_j = exp(-|j|^(2a)), plus custom callables.
/// Evaluation is stateless, so instances are safe to share across threads.
class WeightSequence {
public:
    enum class Family { Sobolev, Derivative, OrdinarySmooth, SuperSmooth, Custom };

    static WeightSequence sobolev(double p) {
        if (!(p > 0.5)) throw std::invalid_argument("sobolev weights require p > 1/2");
        return WeightSequence(Family::Sobolev, p);
    }

    static WeightSequence derivative(int s) {
        if (s < 0) throw std::invalid_argument("derivative weights require integer s >= 0");
        return WeightSequence(Family::Derivative, static_cast<double>(s));
    }

    static WeightSequence ordinary_smooth(double a) {
        if (!(a > 0.5)) throw std::invalid_argument("ordinary smooth weights require a > 1/2");
        return WeightSequence(Family::OrdinarySmooth, a);
    }

    static WeightSequence super_smooth(double a) {
        if (!(a > 0.0)) throw std::invalid_argument("super smooth weights require a > 0");
        return WeightSequence(Family::SuperSmooth, a);
    }

    static WeightSequence custom(std::function<double(long)> eval, std::string label = "custom") {
        WeightSequence w(Family::Custom, 0.0);
        w.eval_ = std::move(eval);
        w.label_ = std::move(label);
        return w;
    }

    double operator()(long j) const {
        const long a = std::labs(j);
        if (a == 0) return 1.0;
        switch (family_) {
            case Family::Sobolev:
            case Family::Derivative:
                return std::pow(static_cast<double>(a), 2.0 * param_);
            case Family::OrdinarySmooth:
                return std::pow(static_cast<double>(a), -2.0 * param_);
            case Family::SuperSmooth:
                return std::exp(-std::pow(static_cast<double>(a), 2.0 * param_));
            case Family::Custom: {
                const double v = eval_(a);
                if (!(v > 0.0)) throw std::domain_error("custom weight not strictly positive at j=" + std::to_string(a));
                return v;
            }
        }
        return 1.0;
    }

    /// log w_j, exact for the exponential family even where w_j underflows.
    double log_value(long j) const {
        const long a = std::labs(j);
        if (a == 0) return 0.0;
        switch (family_) {
            case Family::Sobolev:
            case Family::Derivative:
                return 2.0 * param_ * std::log(static_cast<double>(a));
            case Family::OrdinarySmooth:
                return -2.0 * param_ * std::log(static_cast<double>(a));
            case Family::SuperSmooth:
                return -std::pow(static_cast<double>(a), 2.0 * param_);
            case Family::Custom:
                return std::log((*this)(a));
        }
        return 0.0;
    }

    Family family() const { return family_; }
    double param() const { return param_; }
    const std::string& label() const { return label_; }

private:
    WeightSequence(Family f, double param) : family_(f), param_(param) {
        switch (f) {
            case Family::Sobolev: label_ = "sobolev:" + std::to_string(param); break;
            case Family::Derivative: label_ = "derivative:" + std::to_string(static_cast<int>(param)); break;
            case Family::OrdinarySmooth: label_ = "os:" + std::to_string(param); break;
            case Family::SuperSmooth: label_ = "ss:" + std::to_string(param); break;
            case Family::Custom: break;
        }
    }

    Family family_;
    double param_;
    std::function<double(long)> eval_;
    std::string label_;
};

/// Verifies that w is non-increasing on j = 0..K, as Assumption-style
/// prefix checks require for the lambda family.
inline bool is_nonincreasing_prefix(const WeightSequence& w, long K) {
    double prev = w(0);
    for (long j = 1; j <= K; ++j) {
        const double cur = w(j);
        if (cur > prev * (1.0 + 1e-12)) return false;
        prev = cur;
    }
    return true;
}

/// j-th empirical Fourier coefficient (1/n) sum_k exp(i 2 pi j Y_k).
inline std::complex<double> empirical_coefficient(const CircularSample& sample, long j) {
    // Deterministic summation in index order for reproducibility.
    double re = 0.0, im = 0.0;
    const double f = kTwoPi * static_cast<double>(j);
    for (double y : sample.values()) {
        re += std::cos(f * y);
        im += std::sin(f * y);
    }
    const double inv = 1.0 / static_cast<double>(sample.size());
    return {re * inv, im * inv};
}

/// Empirical spectrum out to |j| <= K. Coefficients are computed for
/// j >= 0 and mirrored by conjugation, so Hermitian symmetry is exact.
inline SpectralVector empirical_spectrum(const CircularSample& sample, long K) {
    if (K < 0) throw std::invalid_argument("spectrum order K must be >= 0");
    SpectralVector spec(K);
    spec[0] = {1.0, 0.0}; // average of e_0 terms, each identically 1
    for (long j = 1; j <= K; ++j) {
        const auto c = empirical_coefficient(sample, j);
        spec[j] = c;
        spec[-j] = std::conj(c);
    }
    return spec;
}

/// Weighted squared norm sum_{|j|<=K} w_j |c_j|^2.
inline double weighted_norm_sq(const SpectralVector& spec, const WeightSequence& w) {
    double acc = std::norm(spec[0]);
    for (long j = 1; j <= spec.max_index(); ++j) {
        acc += w(j) * (std::norm(spec[j]) + std::norm(spec[-j]));
    }
    return acc;
}

/// Coefficient-wise product, the spectral form of circular convolution.
/// Inputs of unequal band are truncated to the smaller one.
inline SpectralVector convolve_spectra(const SpectralVector& f_spec, const SpectralVector& phi_spec) {
    const long K = std::min(f_spec.max_index(), phi_spec.max_index());
    SpectralVector out(K);
    for (long j = -K; j <= K; ++j) out[j] = f_spec[j] * phi_spec[j];
    return out;
}

/// Evaluates p(x) = sum_j c_j e_j(x) on the grid x_t = t/grid_size.
/// Requires a Hermitian spectrum; the imaginary residue of the full
/// complex sum is asserted below 1e-10 before being discarded.
inline std::vector<double> synthesize(const SpectralVector& spec, std::size_t grid_size) {
    if (grid_size < 1) throw std::invalid_argument("grid_size must be >= 1");
    if (!spec.is_hermitian(1e-9)) throw std::invalid_argument("spectrum not real-valued");
    std::vector<double> out(grid_size);
    const long K = spec.max_index();
    for (std::size_t t = 0; t < grid_size; ++t) {
        const double x = static_cast<double>(t) / static_cast<double>(grid_size);
        std::complex<double> acc{0.0, 0.0};
        for (long j = -K; j <= K; ++j) {
            acc += spec[j] * std::polar(1.0, -kTwoPi * static_cast<double>(j) * x);
        }
        if (std::abs(acc.imag()) >= 1e-10)
            throw std::runtime_error("synthesis imaginary residue above tolerance");
        out[t] = acc.real();
    }
    return out;
}

} // namespace circdeconv

#endif // CIRCDECONV_CIRCULAR_HPP
