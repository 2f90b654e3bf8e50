#ifndef CIRCDECONV_MODELS_HPP
#define CIRCDECONV_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "circdeconv/circular.hpp"
#include "circdeconv/rng.hpp"

namespace circdeconv {

/// Reduces a real number to the circle [0, 1).
inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

/// Circular density with analytically known Fourier coefficients.
///
/// trig_poly:        f = 1 + sum_{0<j<=J} c_j (e_j + e_{-j}), real c_j
/// wrapped_laplace:  [f]_j = 1 / (1 + sigma^2 (2 pi j)^2)
/// wrapped_normal:   [f]_j = exp(-2 pi^2 sigma^2 j^2)
class DensityModel {
public:
    enum class Kind { TrigPoly, WrappedLaplace, WrappedNormal };

    static DensityModel trig_poly(std::vector<double> coeffs) {
        DensityModel m(Kind::TrigPoly);
        m.coeffs_ = std::move(coeffs);
        m.validate_and_bound();
        return m;
    }

    /// Trig polynomial with c_j = kappa (1+j)^(-q), j = 1..J, kappa chosen
    /// by bisection so the minimum grid density equals min_density.
    /// q controls the effective Sobolev smoothness, p ~ q - 1/2.
    static DensityModel trig_poly_smooth(double q, int J = 25, double min_density = 0.05) {
        if (!(q > 0.5)) throw std::invalid_argument("trig_poly_smooth requires q > 1/2");
        if (J < 1) throw std::invalid_argument("trig_poly_smooth requires J >= 1");
        if (!(min_density > 0.0 && min_density < 1.0))
            throw std::invalid_argument("min_density must be in (0,1)");
        std::vector<double> base(J);
        for (int j = 1; j <= J; ++j) base[j - 1] = std::pow(1.0 + j, -q);

        const auto min_at = [&](double kappa) {
            double best = 1e300;
            for (int t = 0; t < kGrid; ++t) {
                const double x = static_cast<double>(t) / kGrid;
                double f = 1.0;
                for (int j = 1; j <= J; ++j)
                    f += 2.0 * kappa * base[j - 1] * std::cos(kTwoPi * j * x);
                best = std::min(best, f);
            }
            return best;
        };
        double lo = 0.0, hi = 1.0;
        while (min_at(hi) > min_density) hi *= 2.0;
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (min_at(mid) > min_density ? lo : hi) = mid;
        }
        const double kappa = 0.5 * (lo + hi);
        std::vector<double> coeffs(J);
        for (int j = 1; j <= J; ++j) coeffs[j - 1] = kappa * base[j - 1];
        return trig_poly(std::move(coeffs));
    }

    static DensityModel wrapped_laplace(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("wrapped_laplace requires sigma > 0");
        DensityModel m(Kind::WrappedLaplace);
        m.sigma_ = sigma;
        m.validate_and_bound();
        return m;
    }

    static DensityModel wrapped_normal(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("wrapped_normal requires sigma > 0");
        DensityModel m(Kind::WrappedNormal);
        m.sigma_ = sigma;
        m.validate_and_bound();
        return m;
    }

    Kind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    std::complex<double> exact_coefficient(long j) const {
        const long a = std::labs(j);
        if (a == 0) return {1.0, 0.0};
        switch (kind_) {
            case Kind::TrigPoly:
                return {a <= static_cast<long>(coeffs_.size()) ? coeffs_[a - 1] : 0.0, 0.0};
            case Kind::WrappedLaplace: {
                const double t = sigma_ * kTwoPi * static_cast<double>(a);
                return {1.0 / (1.0 + t * t), 0.0};
            }
            case Kind::WrappedNormal: {
                const double pij = 0.5 * kTwoPi * static_cast<double>(a);
                return {std::exp(-2.0 * pij * pij * sigma_ * sigma_), 0.0};
            }
        }
        return {0.0, 0.0};
    }

    SpectralVector spectrum(long K) const {
        SpectralVector spec(K);
        for (long j = 0; j <= K; ++j) {
            const auto c = exact_coefficient(j);
            spec[j] = c;
            if (j > 0) spec[-j] = std::conj(c);
        }
        return spec;
    }

    double density(double x) const {
        x = wrap_unit(x);
        switch (kind_) {
            case Kind::TrigPoly: {
                double f = 1.0;
                for (std::size_t j = 1; j <= coeffs_.size(); ++j)
                    f += 2.0 * coeffs_[j - 1] * std::cos(kTwoPi * static_cast<double>(j) * x);
                return f;
            }
            case Kind::WrappedLaplace: {
                double f = 0.0;
                const long W = wrap_terms();
                for (long k = -W; k <= W; ++k) {
                    const double t = x + static_cast<double>(k);
                    f += std::exp(-std::abs(t) / sigma_) / (2.0 * sigma_);
                }
                return f;
            }
            case Kind::WrappedNormal: {
                double f = 0.0;
                const long W = wrap_terms();
                const double norm = 1.0 / (sigma_ * std::sqrt(kTwoPi));
                for (long k = -W; k <= W; ++k) {
                    const double t = (x + static_cast<double>(k)) / sigma_;
                    f += norm * std::exp(-0.5 * t * t);
                }
                return f;
            }
        }
        return 0.0;
    }

    /// Exact probability of the arc [a, b), 0 <= a <= b <= 1, via wrapped CDFs
    /// (trig polynomials integrate in closed form).
    double arc_probability(double a, double b) const {
        if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw std::invalid_argument("invalid arc");
        switch (kind_) {
            case Kind::TrigPoly: {
                double p = b - a;
                for (std::size_t j = 1; j <= coeffs_.size(); ++j) {
                    const double f = kTwoPi * static_cast<double>(j);
                    p += 2.0 * coeffs_[j - 1] * (std::sin(f * b) - std::sin(f * a)) / f;
                }
                return p;
            }
            case Kind::WrappedLaplace:
            case Kind::WrappedNormal: {
                double p = 0.0;
                const long W = wrap_terms();
                for (long k = -W; k <= W; ++k)
                    p += line_cdf(b + static_cast<double>(k)) - line_cdf(a + static_cast<double>(k));
                return p;
            }
        }
        return 0.0;
    }

    /// iid draws; wrapped kinds are drawn on the line and reduced mod 1,
    /// trig polynomials by rejection against the scaled uniform envelope.
    CircularSample sample(std::size_t count, SplitMix64& rng) const {
        if (count < 1) throw std::invalid_argument("sample count must be >= 1");
        std::vector<double> out;
        out.reserve(count);
        switch (kind_) {
            case Kind::WrappedLaplace:
                for (std::size_t i = 0; i < count; ++i) out.push_back(wrap_unit(rng.next_laplace(sigma_)));
                break;
            case Kind::WrappedNormal:
                for (std::size_t i = 0; i < count; ++i) out.push_back(wrap_unit(rng.next_normal(sigma_)));
                break;
            case Kind::TrigPoly: {
                const double bound = envelope_bound_;
                const std::size_t budget = 100 * count + 1000;
                std::size_t proposals = 0;
                while (out.size() < count) {
                    if (++proposals > budget)
                        throw std::runtime_error("density too peaked for rejection sampling");
                    const double x = rng.next_unit();
                    const double u = rng.next_unit();
                    if (u * bound <= density(x)) out.push_back(x);
                }
                break;
            }
        }
        return CircularSample(std::move(out));
    }

    /// omega-weighted squared coefficient mass beyond |j| = T,
    /// 2 sum_{j>T} w_j |[f]_j|^2, summed to machine convergence.
    double tail_weighted_sq(const WeightSequence& omega, long T) const {
        if (T < 0) throw std::invalid_argument("tail bound must be >= 0");
        if (kind_ == Kind::TrigPoly) {
            double acc = 0.0;
            for (long j = T + 1; j <= static_cast<long>(coeffs_.size()); ++j)
                acc += 2.0 * omega(j) * coeffs_[j - 1] * coeffs_[j - 1];
            return acc;
        }
        double acc = 0.0;
        for (long j = T + 1;; ++j) {
            const double c = exact_coefficient(j).real();
            const double term = 2.0 * omega(j) * c * c;
            acc += term;
            if (j > T + 64 && term <= 1e-17 * acc) break;
            if (term == 0.0) break;
            if (j > T + 10000000L) throw std::domain_error("tail bias unbounded");
        }
        return acc;
    }

private:
    static constexpr int kGrid = 4096;

    explicit DensityModel(Kind kind) : kind_(kind) {}

    long wrap_terms() const {
        if (kind_ == Kind::WrappedLaplace) return static_cast<long>(std::ceil(40.0 * sigma_)) + 1;
        return static_cast<long>(std::ceil(10.0 * sigma_)) + 1;
    }

    double line_cdf(double t) const {
        if (kind_ == Kind::WrappedLaplace)
            return t < 0.0 ? 0.5 * std::exp(t / sigma_) : 1.0 - 0.5 * std::exp(-t / sigma_);
        return 0.5 * (1.0 + std::erf(t / (sigma_ * std::sqrt(2.0))));
    }

    void validate_and_bound() {
        double lo = 1e300, hi = -1e300;
        for (int t = 0; t < kGrid; ++t) {
            const double f = density(static_cast<double>(t) / kGrid);
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        if (lo < 0.0) throw std::invalid_argument("density negative on validation grid");
        envelope_bound_ = hi * 1.01;
    }

    Kind kind_;
    double sigma_ = 0.0;
    std::vector<double> coeffs_;
    double envelope_bound_ = 1.01;
};

/// Convenience wrapper matching the harness call shape.
inline CircularSample sample(const DensityModel& model, std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return model.sample(count, rng);
}

} // namespace circdeconv

#endif // CIRCDECONV_MODELS_HPP
