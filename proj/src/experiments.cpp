#include "circle/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "circle/errors.hpp"
#include "circle/expsums.hpp"
#include "circle/linalg.hpp"
#include "circle/smooth.hpp"

namespace circle {

namespace {

using nlohmann::ordered_json;

ordered_json constant_json(const TruncatedConstant& c) {
    ordered_json j;
    j["B"] = c.B;
    j["value"] = c.value;
    j["imag"] = c.imag;
    j["tail_estimate"] = c.tail_estimate ? ordered_json(*c.tail_estimate) : ordered_json(nullptr);
    j["quad_error"] = c.quad_error;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

ordered_json count_json(uint128 v) {
    if (v <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(v);
    return to_string(v);
}

struct Shared {
    std::size_t psi = 0;
    std::optional<long> threshold;
    bool hypothesis_ok = false;
    double c_pow = 1;
    std::vector<std::string> warnings;
};

Shared prepare(const DiagonalSystem& system, const PredictionOptions& opt) {
    Shared s;
    const int d = system.degree();
    const auto psi = psi_exact(system);
    s.psi = psi.psi;
    if (!psi.exact) s.warnings.push_back("psi search budget exhausted; psi is a lower bound");
    if (opt.mode == VariableMode::Smooth) {
        if (!(opt.eta > 0 && opt.eta <= 1)) throw InputError("eta must lie in (0, 1]");
        if (d < 5) {
            if (!opt.diagnostic) throw InputError("smooth mode needs d >= 5 (use --diagnostic to override)");
            s.warnings.push_back("diagnostic smooth run with d < 5: no threshold claim");
        } else {
            s.threshold = threshold(VariableMode::Smooth, d);
        }
        s.c_pow = std::pow(c_eta(opt.eta), static_cast<double>(system.cols()));
    } else {
        s.threshold = threshold(VariableMode::Integer, d);
    }
    if (s.threshold) {
        s.hypothesis_ok = static_cast<long>(s.psi) >= *s.threshold + 1;
        if (!s.hypothesis_ok) s.warnings.push_back("hypothesis psi >= T + 1 fails");
    }
    return s;
}

PredictionReport assemble(const DiagonalSystem& system, std::int64_t X, const PredictionOptions& opt,
                          const Shared& shared, const TruncatedConstant& S, const TruncatedConstant& I,
                          uint128 exact) {
    PredictionReport r;
    r.system_name = system.name();
    r.system_json = serialize_system(system);
    r.X = X;
    r.mode = opt.mode;
    r.eta = opt.mode == VariableMode::Smooth ? opt.eta : 1.0;
    r.psi = shared.psi;
    r.threshold = shared.threshold;
    r.hypothesis_ok = shared.hypothesis_ok;
    r.warnings = shared.warnings;
    r.S_B = S;
    r.I_B = I;
    r.c_eta_pow_n = shared.c_pow;
    const double ex = static_cast<double>(system.cols()) -
                      static_cast<double>(system.degree()) * static_cast<double>(system.rows());
    r.predicted = shared.c_pow * S.value * I.value * std::pow(static_cast<double>(X), ex);
    r.exact = exact;
    const double ex_d = static_cast<double>(exact);
    r.rel_error = std::fabs(r.predicted - ex_d) / std::max(1.0, ex_d);
    return r;
}

std::optional<double> smooth_z(const PredictionOptions& opt, std::int64_t X) {
    if (opt.mode != VariableMode::Smooth) return std::nullopt;
    return std::pow(static_cast<double>(X), opt.eta);
}

}  // namespace

PredictionReport run_prediction(const DiagonalSystem& system, std::int64_t X, const PredictionOptions& opt) {
    return run_prediction_sweep(system, {X}, opt).front();
}

std::vector<PredictionReport> run_prediction_sweep(const DiagonalSystem& system, std::vector<std::int64_t> X_list,
                                                   const PredictionOptions& opt) {
    if (X_list.empty()) return {};
    std::sort(X_list.begin(), X_list.end());
    X_list.erase(std::unique(X_list.begin(), X_list.end()), X_list.end());
    const Shared shared = prepare(system, opt);
    const auto S = singular_series_truncated(system, opt.B_series, shared.psi, opt.workers);

    const bool mu_zero = std::all_of(system.mu().begin(), system.mu().end(), [](auto m) { return m == 0; });
    std::optional<TruncatedConstant> I_shared;
    if (mu_zero)
        I_shared = singular_integral_truncated(system, opt.B_integral, static_cast<double>(X_list.back()), shared.psi,
                                               opt.integral);

    // counts: one shared table in integer mode; smooth mode has Z depending on X
    std::vector<uint128> exact;
    if (opt.mode == VariableMode::Integer) {
        for (const auto& row : count_sweep(system, X_list, std::nullopt, CountMethod::MeetInMiddle,
                                           kDefaultCountMemory, opt.workers))
            exact.push_back(row.N);
    } else {
        for (auto X : X_list) {
            CountRequest req{system, X, smooth_z(opt, X)};
            req.workers = opt.workers;
            exact.push_back(count_exact(req));
        }
    }

    std::vector<PredictionReport> out;
    for (std::size_t k = 0; k < X_list.size(); ++k) {
        const auto X = X_list[k];
        const TruncatedConstant I =
            I_shared ? *I_shared
                     : singular_integral_truncated(system, opt.B_integral, static_cast<double>(X), shared.psi,
                                                   opt.integral);
        out.push_back(assemble(system, X, opt, shared, S, I, exact[k]));
    }
    return out;
}

std::string report_json(const PredictionReport& r) {
    ordered_json j;
    j["system"] = ordered_json::parse(r.system_json);
    j["X"] = r.X;
    j["mode"] = r.mode == VariableMode::Smooth ? "smooth" : "int";
    j["eta"] = r.eta;
    j["psi"] = r.psi;
    j["threshold"] = r.threshold ? ordered_json(*r.threshold) : ordered_json(nullptr);
    j["hypothesis_ok"] = r.hypothesis_ok;
    j["S_B"] = constant_json(r.S_B);
    j["I_B"] = constant_json(r.I_B);
    j["c_eta_pow_n"] = r.c_eta_pow_n;
    j["predicted"] = r.predicted;
    j["exact"] = count_json(r.exact);
    j["rel_error"] = r.rel_error;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

std::string reports_json(const std::vector<PredictionReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(ordered_json::parse(report_json(r)));
    return arr.dump(2) + "\n";
}

std::string reports_csv(const std::vector<PredictionReport>& reports) {
    std::ostringstream out;
    out.precision(12);
    out << "X,psi,threshold,hypothesis_ok,S_B,I_B,c_eta_pow_n,predicted,exact,rel_error\n";
    for (const auto& r : reports) {
        out << r.X << ',' << r.psi << ',' << (r.threshold ? std::to_string(*r.threshold) : "") << ','
            << (r.hypothesis_ok ? "true" : "false") << ',' << r.S_B.value << ',' << r.I_B.value << ','
            << r.c_eta_pow_n << ',' << r.predicted << ',' << to_string(r.exact) << ',' << r.rel_error << '\n';
    }
    return out.str();
}

std::filesystem::path persist_reports(const std::vector<PredictionReport>& reports,
                                      const std::filesystem::path& out_dir, const std::string& run_id) {
    if (run_id.empty() || run_id.find('/') != std::string::npos) throw InputError("bad run id '" + run_id + "'");
    const auto dir = out_dir / run_id;
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "report.json") << reports_json(reports);
    std::ofstream(dir / "sweep.csv") << reports_csv(reports);
    return dir;
}

DiagonalSystem scale_target(const DiagonalSystem& system, const std::vector<double>& kappa, std::int64_t X) {
    if (kappa.size() != system.rows()) throw InputError("kappa needs one entry per row");
    const double Xd = std::pow(static_cast<double>(X), system.degree());
    std::vector<std::int64_t> mu;
    for (double k : kappa) {
        const double v = std::floor(k * Xd);
        if (std::fabs(v) > 9e18) throw InputError("scaled target does not fit 64 bits");
        mu.push_back(static_cast<std::int64_t>(v));
    }
    return system.with_mu(std::move(mu));
}

HuaResult hua_probe(int d, int s, std::vector<std::int64_t> X_list, unsigned workers) {
    if (s < 2 || s % 2) throw InputError("hua probe needs an even s >= 2");
    if (X_list.size() < 2) throw InputError("hua probe needs at least two X values");
    std::vector<std::int64_t> row(static_cast<std::size_t>(s), 1);
    std::fill(row.begin() + s / 2, row.end(), -1);
    const DiagonalSystem sys(d, {row}, {0}, "hua");
    const auto rows = count_sweep(sys, X_list, std::nullopt, CountMethod::MeetInMiddle,
                                  kDefaultCountMemory, workers);
    HuaResult out;
    out.d = d;
    out.s = s;
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        out.X_list.push_back(r.X);
        out.counts.push_back(r.N);
        lx.push_back(std::log(static_cast<double>(r.X)));
        ly.push_back(std::log(static_cast<double>(r.N)));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    out.slope = sxy / sxx;
    out.above_threshold = s >= t_int(d);
    out.slope_ok = !out.above_threshold || out.slope <= s - d + 0.2;
    return out;
}

WeylScanResult weyl_scan(const WeylScanOptions& opt) {
    if (opt.grid_size == 0 || opt.grid_size > 1'000'000) throw InputError("grid_size must be in [1, 1e6]");
    std::vector<double> alphas(opt.grid_size);
    for (std::size_t j = 0; j < opt.grid_size; ++j)
        alphas[j] = static_cast<double>(j) / static_cast<double>(opt.grid_size);
    return weyl_scan_points(opt, alphas);
}

WeylScanResult weyl_scan_points(const WeylScanOptions& opt, const std::vector<double>& alphas) {
    if (opt.X < 2) throw InputError("weyl scan needs X >= 2");
    const int d = opt.d;
    const double X = opt.X;
    const double logX = std::log(X);
    WeylScanResult out;
    out.L = opt.L ? *opt.L : std::pow(logX, 2.0 * d * opt.delta);
    out.threshold = X * std::pow(logX, -opt.delta);
    std::vector<std::int64_t> members;
    if (opt.Z) members = smooth_sieve(static_cast<std::int64_t>(X), *opt.Z).members;
    const double lambda = lambda_of(d).value();
    const double Xd = std::pow(X, d);

    for (double alpha : alphas) {
        WeylScanRow row;
        row.alpha = alpha;
        const Complex f = opt.Z ? smooth_weyl_sum(alpha, members, d) : weyl_sum(alpha, X, d);
        row.value = f;
        row.abs_sum = std::abs(f);
        const double theta[1] = {alpha};
        row.label = classify_arc(theta, out.L, X, d);
        if (opt.Z) {
            // smooth major-arc bound X (q + X^d |q alpha - a|)^(-1/d)
            if (row.label.major) {
                const double q = static_cast<double>(row.label.q);
                const double dist = std::fabs(q * alpha - static_cast<double>(row.label.a[0]));
                row.bound = X * std::pow(q + Xd * dist, -1.0 / d);
                row.bound_ratio = row.abs_sum / row.bound;
            }
        } else {
            double best = 1e300;
            for (const auto& [p, q] : convergents(alpha, static_cast<std::int64_t>(std::min(Xd, 9e15)))) {
                (void)p;
                const double qd = static_cast<double>(q);
                best = std::min(best, 1.0 / qd + 1.0 / X + qd / Xd);
            }
            row.bound = X * std::pow(best, lambda);
            row.bound_ratio = row.abs_sum / row.bound;
        }
        if (!row.label.major) out.max_minor_ratio = std::max(out.max_minor_ratio, row.abs_sum / X);
        if (opt.Z && row.abs_sum > out.threshold && !row.label.major) ++out.violations;
        out.rows.push_back(std::move(row));
    }
    out.assertion_ok = out.violations == 0;
    return out;
}

std::string weyl_scan_csv(const WeylScanResult& result) {
    std::ostringstream out;
    out.precision(12);
    out << "alpha,q,a,value_re,value_im,bound,ratio\n";
    for (const auto& r : result.rows) {
        out << r.alpha << ',';
        if (r.label.major)
            out << r.label.q << ',' << r.label.a[0];
        else
            out << ',';
        out << ',' << r.value.real() << ',' << r.value.imag() << ',' << r.bound << ',' << r.bound_ratio << '\n';
    }
    return out.str();
}

MajorResidualResult major_arc_residual_experiment(int d, double X, std::int64_t q_max, std::size_t samples_per_q,
                                                  double eta, bool smooth, std::uint64_t seed) {
    if (q_max < 1) throw InputError("q_max must be >= 1");
    if (X < 2) throw InputError("major-arc experiment needs X >= 2");
    MajorResidualResult out;
    out.d = d;
    out.X = X;
    out.eta = eta;
    const double Xd = std::pow(X, d);
    const double logX = std::log(X);
    const double Z = std::pow(X, eta);
    std::vector<std::int64_t> members;
    if (smooth) members = smooth_sieve(static_cast<std::int64_t>(X), Z).members;
    const double rho = smooth ? c_eta(eta) : 1.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (std::int64_t q = 1; q <= q_max; ++q) {
        std::vector<std::int64_t> coprime;
        for (std::int64_t a = 0; a < q; ++a)
            if (std::gcd(a, q) == 1) coprime.push_back(a);
        for (std::size_t s = 0; s < samples_per_q; ++s) {
            MajorResidualRow row;
            row.q = q;
            row.a = coprime[static_cast<std::size_t>(rng() % coprime.size())];
            const double t = uni(rng) * static_cast<double>(q_max) / static_cast<double>(q);  // X^d beta
            row.beta = t / Xd;
            const double scale = 1.0 + std::fabs(t);
            const Complex model = major_arc_model(q, row.a, row.beta, X, d);
            row.residual_int = std::abs(weyl_sum_near(q, row.a, row.beta, X, d) - model);
            row.normalized_int = row.residual_int / (static_cast<double>(q) * scale);
            if (smooth) {
                const Complex f = smooth_weyl_sum_near(q, row.a, row.beta, members, d);
                const Complex w = w_kernel(row.beta, X, Z, d).value;
                const Complex s_over_q = complete_sum(q, row.a, d) / static_cast<double>(q);
                row.residual_smooth = std::abs(f - s_over_q * w);
                row.normalized_smooth = row.residual_smooth / (static_cast<double>(q) * X * scale / logX);
                row.residual_smooth_rho = std::abs(f - rho * model);
                out.C_smooth = std::max(out.C_smooth, row.normalized_smooth);
            }
            out.C_int = std::max(out.C_int, row.normalized_int);
            out.rows.push_back(row);
        }
    }
    return out;
}

}  // namespace circle
