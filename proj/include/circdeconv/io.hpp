#ifndef CIRCDECONV_IO_HPP
#define CIRCDECONV_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "circdeconv/circular.hpp"
#include "circdeconv/estimator.hpp"
#include "circdeconv/models.hpp"
#include "circdeconv/selection.hpp"
#include "circdeconv/simulate.hpp"

namespace circdeconv::io {

using nlohmann::json;

/// Malformed input data or configuration (CLI exit code 3).
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Doubles are serialized with 17 significant digits so that text
/// round-trips reproduce the exact bit pattern.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string file_hash_hex(const std::string& path) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_file_bytes(path))));
    return buf;
}

/// Sample files: newline-delimited decimal literals in [0,1), UTF-8,
/// '#' comment lines ignored.
inline CircularSample read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open sample file: " + path);
    std::vector<double> values;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line[b] == '#') continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
            throw format_error(path + ":" + std::to_string(lineno) + ": not a decimal literal: '" +
                               tok + "'");
        if (!(v >= 0.0 && v < 1.0))
            throw format_error(path + ":" + std::to_string(lineno) + ": value outside [0,1)");
        values.push_back(v);
    }
    if (values.empty()) throw format_error(path + ": empty sample");
    return CircularSample(std::move(values));
}

/// Spectrum files: CSV with header j,re,im, rows for j = -K..K ascending.
inline void write_spectrum_csv(const std::string& path, const SpectralVector& spec) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot write spectrum file: " + path);
    out << "j,re,im\n";
    for (long j = -spec.max_index(); j <= spec.max_index(); ++j)
        out << j << ',' << fmt17(spec[j].real()) << ',' << fmt17(spec[j].imag()) << '\n';
}

inline SpectralVector read_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open spectrum file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.find("j,re,im") != 0)
        throw format_error(path + ": missing 'j,re,im' header");
    std::vector<std::pair<long, std::complex<double>>> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        long j;
        double re, im;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf", &j, &re, &im) != 3)
            throw format_error(path + ":" + std::to_string(lineno) + ": bad spectrum row");
        rows.emplace_back(j, std::complex<double>{re, im});
    }
    if (rows.empty()) throw format_error(path + ": empty spectrum");
    const long K = (static_cast<long>(rows.size()) - 1) / 2;
    if (static_cast<long>(rows.size()) != 2 * K + 1)
        throw format_error(path + ": expected 2K+1 rows for j = -K..K");
    SpectralVector spec(K);
    long expect = -K;
    for (const auto& [j, c] : rows) {
        if (j != expect)
            throw format_error(path + ": rows must cover j = -K..K ascending; saw " +
                               std::to_string(j) + " expecting " + std::to_string(expect));
        spec[j] = c;
        ++expect;
    }
    return spec;
}

inline json estimate_to_json(const DeconvEstimate& est) {
    json coeffs = json::array();
    for (long j = -est.k; j <= est.k; ++j)
        coeffs.push_back({{"j", j}, {"re", est.spectrum[j].real()}, {"im", est.spectrum[j].imag()}});
    return json{{"k", est.k},
                {"m", est.m},
                {"coeffs", coeffs},
                {"threshold_hits", est.threshold_hits}};
}

inline DeconvEstimate estimate_from_json(const json& j) {
    DeconvEstimate est;
    est.k = j.at("k").get<long>();
    est.m = j.at("m").get<long>();
    est.spectrum = SpectralVector(est.k);
    for (const auto& row : j.at("coeffs"))
        est.spectrum[row.at("j").get<long>()] = {row.at("re").get<double>(),
                                                 row.at("im").get<double>()};
    est.threshold_hits = j.at("threshold_hits").get<std::vector<long>>();
    return est;
}

inline void write_selection_trace_csv(const std::string& path, const SelectionResult& sel) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot write trace file: " + path);
    out << "k,contrast,penalty,criterion\n";
    for (std::size_t i = 0; i < sel.criterion.size(); ++i)
        out << (i + 1) << ',' << fmt17(sel.contrast[i]) << ',' << fmt17(sel.penalty[i]) << ','
            << fmt17(sel.criterion[i]) << '\n';
}

inline void write_grid_csv(const std::string& path, const std::vector<double>& grid,
                           const std::string& value_column = "f_hat") {
    std::ofstream out(path);
    if (!out) throw format_error("cannot write grid file: " + path);
    out << "x," << value_column << "\n";
    const double G = static_cast<double>(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t)
        out << fmt17(static_cast<double>(t) / G) << ',' << fmt17(grid[t]) << '\n';
}

inline void write_risk_report_csv(const std::string& path, const RiskReport& rep) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot write report file: " + path);
    out << "replication,k_hat,risk\n";
    for (std::size_t r = 0; r < rep.risks.size(); ++r)
        out << r << ',' << rep.k_hats[r] << ',' << fmt17(rep.risks[r]) << '\n';
}

inline json risk_report_to_json(const RiskReport& rep) {
    json hist = json::object();
    for (const auto& [k, count] : rep.k_hat_histogram) hist[std::to_string(k)] = count;
    return json{{"n", rep.n},
                {"m", rep.m},
                {"mode", rep.mode},
                {"seed", rep.seed},
                {"replications", rep.replications},
                {"penalty_const", rep.penalty_const},
                {"s", rep.s},
                {"derivative_scale", rep.derivative_scale},
                {"mean_risk", rep.mean_risk},
                {"std_error", rep.std_error},
                {"k_hat_histogram", hist},
                {"risks", rep.risks},
                {"k_hats", rep.k_hats}};
}

// --- configuration parsing ------------------------------------------------

inline DensityModel model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw format_error("model: expected {kind: ...}");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "trig_poly") {
            if (j.contains("coeffs"))
                return DensityModel::trig_poly(j.at("coeffs").get<std::vector<double>>());
            return DensityModel::trig_poly_smooth(j.value("q", 3.0), j.value("J", 25),
                                                  j.value("min_density", 0.05));
        }
        if (kind == "wrapped_laplace") return DensityModel::wrapped_laplace(j.at("sigma").get<double>());
        if (kind == "wrapped_normal") return DensityModel::wrapped_normal(j.at("sigma").get<double>());
    } catch (const json::exception& e) {
        throw format_error(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw format_error(std::string("model: ") + e.what());
    }
    throw format_error("model: unknown kind '" + kind + "'");
}

inline WeightSequence weights_from_json(const json& j, const DensityModel* phi_model = nullptr) {
    if (!j.is_object() || !j.contains("family"))
        throw format_error("weights: expected {family: ...}");
    const std::string fam = j.at("family").get<std::string>();
    try {
        if (fam == "const") return WeightSequence::derivative(0);
        if (fam == "sobolev" || fam == "derivative")
            return WeightSequence::derivative(j.at("s").get<int>());
        if (fam == "sobolev_p") return WeightSequence::sobolev(j.at("p").get<double>());
        if (fam == "os") return WeightSequence::ordinary_smooth(j.at("a").get<double>());
        if (fam == "ss") return WeightSequence::super_smooth(j.at("a").get<double>());
        if (fam == "table") {
            auto table = std::make_shared<std::map<long, double>>();
            for (const auto& row : j.at("values"))
                (*table)[row.at(0).get<long>()] = row.at(1).get<double>();
            return WeightSequence::custom(
                [table](long idx) {
                    const auto it = table->find(idx);
                    if (it == table->end())
                        throw std::domain_error("weight table has no entry for j=" +
                                                std::to_string(idx));
                    return it->second;
                },
                "table");
        }
        if (fam == "phi_exact") {
            if (!phi_model)
                throw format_error("weights: phi_exact only valid for lambda with a phi model");
            const DensityModel phi = *phi_model;
            return WeightSequence::custom(
                [phi](long idx) { return std::norm(phi.exact_coefficient(idx)); }, "phi_exact");
        }
    } catch (const json::exception& e) {
        throw format_error(std::string("weights: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw format_error(std::string("weights: ") + e.what());
    }
    throw format_error("weights: unknown family '" + fam + "'");
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        cfg.f_model = model_from_json(j.at("f_model"));
        cfg.phi_model = model_from_json(j.at("phi_model"));
        cfg.n = j.at("n").get<long>();
        cfg.m = j.value("m", cfg.n);
        cfg.omega = j.contains("omega") ? weights_from_json(j.at("omega"))
                                        : WeightSequence::derivative(0);
        cfg.s = j.value("s", 0);
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "fixed") {
            cfg.mode = ExperimentConfig::Mode::FixedK;
            cfg.k = j.at("k").get<long>();
        } else if (mode == "known") {
            cfg.mode = ExperimentConfig::Mode::Known;
            cfg.lambda = weights_from_json(j.at("lambda"), &cfg.phi_model);
            cfg.d = j.at("d").get<double>();
        } else if (mode == "empirical") {
            cfg.mode = ExperimentConfig::Mode::Empirical;
            if (j.contains("lambda")) throw format_error("lambda not allowed in empirical mode");
        } else if (mode == "oracle_scan") {
            cfg.mode = ExperimentConfig::Mode::OracleScan;
            cfg.k_cap = j.value("k_cap", 12L);
        } else {
            throw format_error("unknown mode '" + mode + "'");
        }
        cfg.penalty_const = j.value("penalty_const", 0.0);
        cfg.replications = j.at("replications").get<long>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.tail_bound = j.value("tail_bound", 0L);
        cfg.jobs = j.value("jobs", 1);
        cfg.strict = j.value("strict", false);
        cfg.validate();
    } catch (const json::exception& e) {
        throw format_error(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw format_error(std::string("config: ") + e.what());
    }
    return cfg;
}

/// Sweep file for the `rates` subcommand: an n-grid, an m-rule, a base
/// experiment config, and the expected rate exponent. The injected_risks
/// hook replaces simulation with fixed mean risks (plumbing tests).
struct RateSweep {
    json base;
    std::vector<long> n_grid;
    MRule m_rule;
    double expected_exponent = 0.0;
    double tolerance = 0.15;
    std::vector<std::pair<long, double>> injected_risks;
};

inline RateSweep rate_sweep_from_json(const json& j) {
    RateSweep sweep;
    try {
        sweep.base = j.at("base");
        sweep.n_grid = j.at("n_grid").get<std::vector<long>>();
        if (sweep.n_grid.empty()) throw format_error("sweep: empty n_grid");
        if (j.contains("m_rule")) {
            const auto& mr = j.at("m_rule");
            const std::string type = mr.at("type").get<std::string>();
            if (type == "equal") {
                sweep.m_rule.type = MRule::Type::Equal;
            } else if (type == "power") {
                sweep.m_rule.type = MRule::Type::Power;
                sweep.m_rule.rho = mr.at("rho").get<double>();
            } else if (type == "fixed") {
                sweep.m_rule.type = MRule::Type::Fixed;
                sweep.m_rule.m = mr.at("m").get<long>();
            } else {
                throw format_error("sweep: unknown m_rule type '" + type + "'");
            }
        }
        sweep.expected_exponent = j.at("expected_exponent").get<double>();
        sweep.tolerance = j.value("tolerance", 0.15);
        if (j.contains("injected_risks"))
            for (const auto& row : j.at("injected_risks"))
                sweep.injected_risks.emplace_back(row.at("n").get<long>(),
                                                  row.at("mean_risk").get<double>());
    } catch (const json::exception& e) {
        throw format_error(std::string("sweep: ") + e.what());
    }
    return sweep;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open file: " + path);
    try {
        return json::parse(in, nullptr, true, true); // allow // and /* */ comments
    } catch (const json::exception& e) {
        throw format_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot write file: " + path);
    out << content;
}

} // namespace circdeconv::io

#endif // CIRCDECONV_IO_HPP
