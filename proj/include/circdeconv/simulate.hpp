#ifndef CIRCDECONV_SIMULATE_HPP
#define CIRCDECONV_SIMULATE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "circdeconv/circular.hpp"
#include "circdeconv/estimator.hpp"
#include "circdeconv/models.hpp"
#include "circdeconv/rng.hpp"
#include "circdeconv/selection.hpp"

namespace circdeconv {

/// Couples the error-sample size to the Y-sample size across a sweep.
struct MRule {
    enum class Type { Fixed, Equal, Power };
    Type type = Type::Equal;
    long m = 0;         // Fixed
    double rho = 1.0;   // Power: m = ceil(n^rho)

    long resolve(long n) const {
        switch (type) {
            case Type::Fixed: return m;
            case Type::Equal: return n;
            case Type::Power: return static_cast<long>(std::ceil(std::pow(static_cast<double>(n), rho)));
        }
        return n;
    }
};

struct ExperimentConfig {
    enum class Mode { FixedK, Known, Empirical, OracleScan };

    DensityModel f_model = DensityModel::trig_poly_smooth(3.0);
    DensityModel phi_model = DensityModel::wrapped_laplace(0.1);
    long n = 1000;
    long m = 1000;
    WeightSequence omega = WeightSequence::derivative(0);
    int s = 0;
    Mode mode = Mode::Empirical;
    long k = 1;        // FixedK
    long k_cap = 12;   // OracleScan
    std::optional<WeightSequence> lambda; // Known
    double d = 1.0;                       // Known
    double penalty_const = 0.0;           // 0 = mode default (60 known / 600 empirical)
    long replications = 100;
    std::uint64_t seed = 1;
    long tail_bound = 0; // 0 = auto: max(4 * largest candidate k, 200)
    int jobs = 1;
    bool strict = false;

    void validate() const {
        if (replications < 1) throw std::invalid_argument("replications must be >= 1");
        if (n < 2 || m < 2) throw std::invalid_argument("n and m must be >= 2");
        if (mode == Mode::FixedK && k < 1) throw std::invalid_argument("fixed mode requires k >= 1");
        if (mode == Mode::OracleScan && k_cap < 1)
            throw std::invalid_argument("oracle scan requires k_cap >= 1");
        if (mode == Mode::Known && !lambda)
            throw std::invalid_argument("known mode requires a lambda sequence");
        if (mode == Mode::Known && !(d >= 1.0))
            throw std::invalid_argument("known mode requires d >= 1");
    }

    std::string mode_name() const {
        switch (mode) {
            case Mode::FixedK: return "fixed";
            case Mode::Known: return "known";
            case Mode::Empirical: return "empirical";
            case Mode::OracleScan: return "oracle_scan";
        }
        return "?";
    }
};

/// Monte Carlo risk estimates with replication metadata.
struct RiskReport {
    std::vector<double> risks;
    std::vector<long> k_hats;
    double mean_risk = 0.0;
    double std_error = 0.0;
    std::map<long, long> k_hat_histogram;

    // config echo
    long n = 0, m = 0;
    std::string mode;
    std::uint64_t seed = 0;
    double penalty_const = 0.0;
    long replications = 0;
    int s = 0;
    double derivative_scale = 1.0; // (2 pi)^(2s), reporting only
};

struct replication_error : std::runtime_error {
    replication_error(long rep, std::uint64_t substream, const std::string& what)
        : std::runtime_error("replication " + std::to_string(rep) + " (substream seed " +
                             std::to_string(substream) + ") failed: " + what),
          replication(rep) {}
    long replication;
};

namespace detail {

struct RepOutcome {
    double risk = 0.0;
    long k_hat = 1;
    std::vector<double> risk_per_k; // OracleScan only
};

/// omega-weighted truth mass beyond each cutoff:
/// tail[k] = sum_{|j|>k, |j|<=T} w_j |truth_j|^2 + analytic tail beyond T.
inline std::vector<double> truth_tails(const SpectralVector& truth, const WeightSequence& omega,
                                       double analytic_tail) {
    const long T = truth.max_index();
    std::vector<double> tail(static_cast<std::size_t>(T) + 1, 0.0);
    tail[T] = analytic_tail;
    for (long k = T - 1; k >= 0; --k)
        tail[k] = tail[k + 1] + omega(k + 1) * (std::norm(truth[k + 1]) + std::norm(truth[-k - 1]));
    return tail;
}

inline RepOutcome run_replication(const ExperimentConfig& cfg, long rep,
                                  const SpectralVector& truth, const std::vector<double>& tails,
                                  const SelectionTables* known_tabs) {
    SplitMix64 rng(cfg.seed ^ static_cast<std::uint64_t>(rep));
    const CircularSample xs = cfg.f_model.sample(static_cast<std::size_t>(cfg.n), rng);
    std::vector<double> ys(xs.values().size());
    {
        const CircularSample noise = cfg.phi_model.sample(static_cast<std::size_t>(cfg.n), rng);
        for (std::size_t i = 0; i < ys.size(); ++i)
            ys[i] = wrap_unit(xs.values()[i] + noise.values()[i]);
    }
    const CircularSample y(std::move(ys));
    const CircularSample eps = cfg.phi_model.sample(static_cast<std::size_t>(cfg.m), rng);

    const auto risk_at = [&](const DeconvEstimate& est) {
        if (est.k > truth.max_index())
            throw std::runtime_error("selected cutoff " + std::to_string(est.k) +
                                     " exceeds the tabulated truth band; raise tail_bound");
        double acc = 0.0;
        for (long j = 1; j <= est.k; ++j)
            acc += cfg.omega(j) * (std::norm(est.spectrum[j] - truth[j]) +
                                   std::norm(est.spectrum[-j] - truth[-j]));
        return acc + tails[est.k];
    };

    RepOutcome out;
    switch (cfg.mode) {
        case ExperimentConfig::Mode::FixedK: {
            const auto g_hat = empirical_spectrum(y, cfg.k);
            const auto phi_hat = empirical_spectrum(eps, cfg.k);
            const auto est = deconvolve(g_hat, phi_hat, cfg.m, cfg.k);
            out.k_hat = cfg.k;
            out.risk = risk_at(est);
            break;
        }
        case ExperimentConfig::Mode::OracleScan: {
            const auto g_hat = empirical_spectrum(y, cfg.k_cap);
            const auto phi_hat = empirical_spectrum(eps, cfg.k_cap);
            const auto est = deconvolve(g_hat, phi_hat, cfg.m, cfg.k_cap);
            out.risk_per_k.resize(static_cast<std::size_t>(cfg.k_cap));
            double run = 0.0;
            for (long k = 1; k <= cfg.k_cap; ++k) {
                run += cfg.omega(k) * (std::norm(est.spectrum[k] - truth[k]) +
                                       std::norm(est.spectrum[-k] - truth[-k]));
                out.risk_per_k[k - 1] = run + tails[k];
            }
            break;
        }
        case ExperimentConfig::Mode::Known: {
            const long cap = known_tabs->cap();
            const auto g_hat = empirical_spectrum(y, cap);
            const auto phi_hat = empirical_spectrum(eps, cap);
            KnownSelectionOptions opts;
            if (cfg.penalty_const > 0.0) opts.penalty_const = cfg.penalty_const;
            opts.strict = cfg.strict;
            const auto sel = select_known(g_hat, phi_hat, cfg.m, cfg.n, cfg.omega, *known_tabs,
                                          cfg.d, opts);
            const auto est = deconvolve(g_hat, phi_hat, cfg.m, sel.k_hat);
            out.k_hat = sel.k_hat;
            out.risk = risk_at(est);
            break;
        }
        case ExperimentConfig::Mode::Empirical: {
            auto [tabs, phi_hat] = empirical_tables_from_sample(eps, cfg.omega, cfg.n, cfg.m);
            const auto g_hat = empirical_spectrum(y, tabs.cap());
            EmpiricalSelectionOptions opts;
            if (cfg.penalty_const > 0.0) opts.penalty_const = cfg.penalty_const;
            const auto sel = select_empirical(g_hat, phi_hat, cfg.n, cfg.m, cfg.omega, tabs, opts);
            const auto est = deconvolve(g_hat, phi_hat, cfg.m, sel.k_hat);
            out.k_hat = sel.k_hat;
            out.risk = risk_at(est);
            break;
        }
    }
    return out;
}

} // namespace detail

/// Runs the configured Monte Carlo experiment. Deterministic given the
/// seed: replication r draws from the substream seed ^ r and results are
/// aggregated in replication order regardless of the worker count.
inline RiskReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    SelectionTables known_tabs;
    long k_upper = std::max(cfg.k, cfg.k_cap);
    if (cfg.mode == ExperimentConfig::Mode::Known) {
        known_tabs = known_tables(cfg.omega, *cfg.lambda, cfg.d, cfg.n, cfg.m);
        k_upper = std::max(k_upper, known_tabs.cap());
    }
    const long tail_bound = cfg.tail_bound > 0 ? cfg.tail_bound : std::max(4 * k_upper, 200L);

    const SpectralVector truth_full = cfg.f_model.spectrum(tail_bound);
    const double analytic_tail = cfg.f_model.tail_weighted_sq(cfg.omega, tail_bound);
    const std::vector<double> tails = detail::truth_tails(truth_full, cfg.omega, analytic_tail);

    const long R = cfg.replications;
    std::vector<detail::RepOutcome> outcomes(static_cast<std::size_t>(R));
    std::exception_ptr failure;
    long failed_rep = -1;

    const auto work = [&](long rep) {
        outcomes[static_cast<std::size_t>(rep)] =
            detail::run_replication(cfg, rep, truth_full, tails,
                                    cfg.mode == ExperimentConfig::Mode::Known ? &known_tabs : nullptr);
    };

    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(R)));
    if (jobs == 1) {
        for (long rep = 0; rep < R; ++rep) {
            try {
                work(rep);
            } catch (const std::exception& e) {
                throw replication_error(rep, cfg.seed ^ static_cast<std::uint64_t>(rep), e.what());
            }
        }
    } else {
        std::atomic<long> next{0};
        std::atomic<long> first_fail{R};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(R));
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const long rep = next.fetch_add(1);
                    if (rep >= R) return;
                    try {
                        work(rep);
                    } catch (...) {
                        errors[static_cast<std::size_t>(rep)] = std::current_exception();
                        long expect = first_fail.load();
                        while (rep < expect && !first_fail.compare_exchange_weak(expect, rep)) {}
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_fail.load() < R) {
            failed_rep = first_fail.load();
            failure = errors[static_cast<std::size_t>(failed_rep)];
        }
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const replication_error&) {
            throw;
        } catch (const std::exception& e) {
            throw replication_error(failed_rep, cfg.seed ^ static_cast<std::uint64_t>(failed_rep),
                                    e.what());
        }
    }

    RiskReport rep;
    rep.n = cfg.n;
    rep.m = cfg.m;
    rep.mode = cfg.mode_name();
    rep.seed = cfg.seed;
    rep.replications = R;
    rep.s = cfg.s;
    rep.derivative_scale = std::pow(kTwoPi, 2.0 * cfg.s);
    rep.penalty_const = cfg.penalty_const > 0.0
                            ? cfg.penalty_const
                            : (cfg.mode == ExperimentConfig::Mode::Known ? 60.0 : 600.0);
    rep.risks.reserve(static_cast<std::size_t>(R));
    rep.k_hats.reserve(static_cast<std::size_t>(R));

    if (cfg.mode == ExperimentConfig::Mode::OracleScan) {
        // fixed-k oracle: pick the k minimizing the mean risk over the bed
        std::vector<double> mean_per_k(static_cast<std::size_t>(cfg.k_cap), 0.0);
        for (const auto& o : outcomes)
            for (long k = 1; k <= cfg.k_cap; ++k)
                mean_per_k[k - 1] += o.risk_per_k[k - 1];
        long k_best = 1;
        for (long k = 2; k <= cfg.k_cap; ++k)
            if (mean_per_k[k - 1] < mean_per_k[k_best - 1]) k_best = k;
        for (auto& o : outcomes) {
            o.k_hat = k_best;
            o.risk = o.risk_per_k[k_best - 1];
        }
    }

    double sum = 0.0;
    for (const auto& o : outcomes) {
        rep.risks.push_back(o.risk);
        rep.k_hats.push_back(o.k_hat);
        rep.k_hat_histogram[o.k_hat] += 1;
        sum += o.risk;
    }
    rep.mean_risk = sum / static_cast<double>(R);
    double ss = 0.0;
    for (double r : rep.risks) ss += (r - rep.mean_risk) * (r - rep.mean_risk);
    const double sample_var = R > 1 ? ss / static_cast<double>(R - 1) : 0.0;
    rep.std_error = std::sqrt(sample_var / static_cast<double>(R));
    return rep;
}

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

inline OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("degenerate grid");
    const double nn = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= nn;
    my /= nn;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate grid");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssres = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ssres += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
    return fit;
}

/// Ordinary least squares of log mean-risk on log n over a sweep.
inline OlsFit rate_regression(const std::vector<std::pair<long, double>>& n_vs_mean_risk) {
    if (n_vs_mean_risk.size() < 4) throw std::invalid_argument("rate regression needs >= 4 grid points");
    std::vector<double> x, y;
    long prev = 0;
    for (const auto& [n, risk] : n_vs_mean_risk) {
        if (n <= prev) throw std::invalid_argument("n grid must be strictly increasing");
        if (!(risk > 0.0)) throw std::invalid_argument("mean risks must be positive");
        prev = n;
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(risk));
    }
    return ols_fit(x, y);
}

} // namespace circdeconv

#endif // CIRCDECONV_SIMULATE_HPP
