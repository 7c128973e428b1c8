#include "circle/integral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "circle/errors.hpp"
#include "circle/expsums.hpp"
#include "circle/quadrature.hpp"

namespace circle {

namespace {

struct Integrand {
    const DiagonalSystem& sys;
    const ArchTable& arch;
    std::vector<double> mu_scaled;  // mu_i / X^d

    struct Value {
        Complex f;
        double env;  // prod_j |I_j|
        double loo;  // sum_j prod_{k != j} |I_k|, propagates table error
    };

    Value operator()(const double* gamma) const {
        const std::size_t R = sys.rows();
        Complex prod(1.0, 0.0);
        double env = 1, loo = 0;
        for (std::size_t j = 0; j < sys.cols(); ++j) {
            double dot = 0;
            for (std::size_t i = 0; i < R; ++i) dot += gamma[i] * static_cast<double>(sys.coeff(i, j));
            const Complex v = arch(dot);
            prod *= v;
            loo = loo * std::abs(v) + env;
            env *= std::abs(v);
        }
        double phase = 0;
        for (std::size_t i = 0; i < R; ++i) phase -= mu_scaled[i] * gamma[i];
        return {prod * unit_phase(phase), env, loo};
    }
};

// 1-D breakpoints on [-B, B]: uniform width `h`, refined to h/4 where some
// |gamma c_j| < 1 can occur (only near gamma = 0 for a single coordinate).
std::vector<double> panel_edges(double B, double h, double refine_radius) {
    std::vector<double> edges;
    const auto coarse = static_cast<long>(std::ceil(2 * B / h));
    const double step = 2 * B / static_cast<double>(coarse);
    for (long k = 0; k < coarse; ++k) {
        const double a = -B + static_cast<double>(k) * step;
        const double b = a + step;
        const bool near = std::min(std::fabs(a), std::fabs(b)) < refine_radius || (a < 0 && b > 0);
        const int parts = near ? 4 : 1;
        for (int p = 0; p < parts; ++p) edges.push_back(a + step * p / parts);
    }
    edges.push_back(B);
    return edges;
}

struct TensorResult {
    Complex value;
    double shell_envelope = 0;  // int of prod|I| over B/2 <= |gamma| < B
    double loo = 0;
};

TensorResult tensor_quadrature(const Integrand& f, std::size_t R, double B, double h, double refine_radius) {
    const auto edges = panel_edges(B, h, refine_radius);
    const auto& rule = gauss_legendre(10);
    std::vector<double> nodes, weights;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k], b = edges[k + 1];
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[g]);
            weights.push_back(0.5 * (b - a) * rule.weights[g]);
        }
    }
    TensorResult out;
    CompensatedSum sum;
    double shell = 0, loo = 0;
    double gamma[2];
    if (R == 1) {
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            gamma[0] = nodes[k];
            const auto [v, env, lo] = f(gamma);
            sum.add(weights[k] * v);
            loo += weights[k] * lo;
            if (std::fabs(nodes[k]) >= B / 2) shell += weights[k] * env;
        }
    } else {
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            CompensatedSum row;
            for (std::size_t l = 0; l < nodes.size(); ++l) {
                gamma[0] = nodes[k];
                gamma[1] = nodes[l];
                const auto [v, env, lo] = f(gamma);
                const double w = weights[k] * weights[l];
                row.add(w * v);
                loo += w * lo;
                if (std::max(std::fabs(nodes[k]), std::fabs(nodes[l])) >= B / 2) shell += w * env;
            }
            sum.add(row.value());
        }
    }
    out.value = sum.value();
    out.shell_envelope = shell;
    out.loo = loo;
    return out;
}

// Randomized Halton points over [-1,1]^3 mapped by gamma = B u |u|, which
// concentrates points where the integrand is largest.
std::pair<Complex, double> qmc_quadrature(const Integrand& f, double B, const IntegralOptions& opt,
                                          double& shell_envelope) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    static constexpr unsigned bases[3] = {2, 3, 5};
    std::vector<Complex> estimates;
    double shell_sum = 0;
    for (unsigned s = 0; s < opt.qmc_shifts; ++s) {
        const double shift[3] = {uni(rng), uni(rng), uni(rng)};
        CompensatedSum sum;
        double shell = 0;
        for (std::uint64_t i = 1; i <= opt.qmc_points; ++i) {
            double gamma[3], jac = 1;
            for (int c = 0; c < 3; ++c) {
                double u = radical_inverse(i, bases[c]) + shift[c];
                u -= std::floor(u);
                const double t = 2 * u - 1;
                gamma[c] = B * t * std::fabs(t);
                jac *= 2 * B * std::fabs(t) * 2;  // d gamma / d u
            }
            const auto [v, env, lo] = f(gamma);
            (void)lo;
            sum.add(jac * v);
            if (std::max({std::fabs(gamma[0]), std::fabs(gamma[1]), std::fabs(gamma[2])}) >= B / 2) shell += jac * env;
        }
        estimates.push_back(sum.value() / static_cast<double>(opt.qmc_points));
        shell_sum += shell / static_cast<double>(opt.qmc_points);
    }
    Complex mean = 0;
    for (auto e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0;
    for (auto e : estimates) var += std::norm(e - mean);
    var /= static_cast<double>(estimates.size() * (estimates.size() - 1));
    shell_envelope = shell_sum / opt.qmc_shifts;
    return {mean, 3.0 * std::sqrt(var)};
}

}  // namespace

TruncatedConstant singular_integral_truncated(const DiagonalSystem& system, double B, double X, std::size_t psi,
                                              const IntegralOptions& options) {
    const std::size_t R = system.rows();
    const int d = system.degree();
    if (R > 3) throw InputError("singular integral supports R <= 3");
    if (static_cast<long>(system.cols()) <= static_cast<long>(d) * static_cast<long>(R))
        throw InputError("singular integral needs n > dR for absolute convergence");
    if (!(B > 0)) throw InputError("singular integral needs B > 0");

    double col_norm = 0;
    for (std::size_t j = 0; j < system.cols(); ++j) {
        double s = 0;
        for (std::size_t i = 0; i < R; ++i) s += std::fabs(static_cast<double>(system.coeff(i, j)));
        col_norm = std::max(col_norm, s);
    }
    const ArchTable arch(d, B * col_norm + 1.0);
    Integrand f{system, arch, {}};
    const double Xd = std::pow(X, d);
    for (auto m : system.mu()) f.mu_scaled.push_back(static_cast<double>(m) / Xd);

    TruncatedConstant out;
    out.B = B;
    double shell = 0;
    const double refine_radius = 1.0 / std::max(1.0, col_norm);
    if (R <= 2) {
        double h = 0.5;
        TensorResult coarse = tensor_quadrature(f, R, B, h, refine_radius);
        for (int level = 0;; ++level) {
            const TensorResult fine = tensor_quadrature(f, R, B, h / 2, refine_radius);
            const double err = std::abs(fine.value - coarse.value) +
                               arch.interpolation_error() * fine.loo;
            if (err <= options.tol || level >= (R == 1 ? 6 : 2)) {
                out.value = fine.value.real();
                out.imag = fine.value.imag();
                out.quad_error = err;
                shell = fine.shell_envelope;
                if (err > options.tol)
                    throw ToleranceUnachieved("singular integral: error estimate " + std::to_string(err) +
                                              " above tolerance " + std::to_string(options.tol));
                break;
            }
            coarse = fine;
            h /= 2;
        }
    } else {
        const auto [value, err] = qmc_quadrature(f, B, options, shell);
        out.value = value.real();
        out.imag = value.imag();
        out.quad_error = err;
        out.note = "randomized QMC, quad_error = 3 standard errors over shifts";
    }

    const double T = static_cast<double>(psi);
    if (T > d) {
        const double ex = 1.0 - T / d;
        // shell integral ~ C ((B/2)^ex - B^ex)
        const double denom = std::pow(B / 2, ex) - std::pow(B, ex);
        out.tail_constant = denom > 0 ? shell / denom : 0.0;
        out.tail_estimate = out.tail_constant * std::pow(B, ex);
    } else {
        out.note += out.note.empty() ? "" : "; ";
        out.note += "T <= d: no tail bound";
    }
    return out;
}

DensityEstimate real_density_oracle(const DiagonalSystem& system, double X, double epsilon, std::uint64_t samples,
                                    std::uint64_t seed) {
    if (!(epsilon > 0)) throw InputError("density oracle needs epsilon > 0");
    if (samples == 0) throw InputError("density oracle needs samples > 0");
    const std::size_t R = system.rows(), n = system.cols();
    const int d = system.degree();
    const double Xd = std::pow(X, d);
    std::vector<double> target(R), coeff(R * n);
    for (std::size_t i = 0; i < R; ++i) {
        target[i] = static_cast<double>(system.mu()[i]) / Xd;
        for (std::size_t j = 0; j < n; ++j) coeff[i * n + j] = static_cast<double>(system.coeff(i, j));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> powers(n);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
            const double xi = uni(rng);
            double p = xi;
            for (int k = 1; k < d; ++k) p *= xi;
            powers[j] = p;
        }
        bool inside = true;
        for (std::size_t i = 0; i < R && inside; ++i) {
            double v = -target[i];
            for (std::size_t j = 0; j < n; ++j) v += coeff[i * n + j] * powers[j];
            inside = std::fabs(v) < epsilon;
        }
        hits += inside ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double scale = std::pow(2 * epsilon, -static_cast<double>(R));
    return {p * scale, std::sqrt(p * (1 - p) / static_cast<double>(samples)) * scale, hits, samples};
}

double i_tail_bound(double B, long T, int d, double C_fit) {
    if (T <= d) throw HypothesisUnmet("singular integral tail needs T > d");
    return C_fit * std::pow(B, 1.0 - static_cast<double>(T) / d);
}

std::string integral_report_json(const TruncatedConstant& integral, double X) {
    nlohmann::ordered_json doc;
    doc["B"] = integral.B;
    doc["X"] = X;
    doc["value_re"] = integral.value;
    doc["value_im"] = integral.imag;
    doc["quad_error"] = integral.quad_error;
    doc["tail_estimate"] = integral.tail_estimate ? nlohmann::json(*integral.tail_estimate) : nlohmann::json(nullptr);
    return doc.dump();
}

}  // namespace circle
