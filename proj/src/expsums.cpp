#include "circle/expsums.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "circle/errors.hpp"
#include "circle/quadrature.hpp"

namespace circle {

namespace {

uint128 checked_power(std::int64_t x, int d) {
    if (x < 0) throw InputError("negative base in power table");
    if (x > 1 && static_cast<double>(d) * std::log2(static_cast<double>(x)) >= 127.0)
        throw BudgetExceeded("x^d exceeds 127 bits");
    return ipow128(static_cast<std::uint64_t>(x), static_cast<unsigned>(d));
}

void check_power_range(double X, int d) {
    if (X >= 2 && static_cast<double>(d) * std::log2(std::floor(X)) >= 127.0)
        throw BudgetExceeded("X^d exceeds 127 bits");
}

// floor of a real bound that may be an integer up to rounding noise
std::int64_t floor_bound(double v) {
    const double r = std::nearbyint(v);
    if (std::fabs(v - r) <= 1e-9 * std::max(1.0, std::fabs(v))) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(v));
}

}  // namespace

double frac_mul(double y, uint128 N) {
    y -= std::floor(y);
    if (y == 0.0 || N == 0) return 0.0;
    int exp = 0;
    const double fr = std::frexp(y, &exp);  // y = fr * 2^exp, fr in [0.5, 1)
    const auto m = static_cast<std::uint64_t>(std::ldexp(fr, 53));
    const int k = 53 - exp;  // y = m * 2^-k, k >= 53
    const auto n_lo = static_cast<std::uint64_t>(N);
    const auto n_hi = static_cast<std::uint64_t>(N >> 64);
    uint128 acc;
    if (k <= 128) {
        const uint128 mask = k == 128 ? ~uint128{0} : ((uint128{1} << k) - 1);
        acc = static_cast<uint128>(m) * n_lo;
        if (k > 64 && n_hi != 0) {
            const uint128 hi_mask = (uint128{1} << (k - 64)) - 1;
            acc += ((static_cast<uint128>(m) * n_hi) & hi_mask) << 64;
        }
        acc &= mask;
    } else {
        if (n_hi >= (std::uint64_t{1} << 11)) throw BudgetExceeded("phase reduction out of range");
        acc = static_cast<uint128>(m) * N;  // < 2^128, already below 2^k
    }
    const auto hi = static_cast<std::uint64_t>(acc >> 64);
    const auto lo = static_cast<std::uint64_t>(acc);
    const double v = std::ldexp(static_cast<double>(hi), 64 - k) + std::ldexp(static_cast<double>(lo), -k);
    return v >= 1.0 ? 0.0 : v;
}

Complex complete_sum(std::int64_t q, std::int64_t a, int d) {
    if (q < 1) throw InputError("complete_sum needs q >= 1");
    const std::int64_t am = mod_floor(a, q);
    CompensatedSum sum;
    for (std::int64_t x = 1; x <= q; ++x) {
        const auto r = mod_floor(static_cast<int128>(pow_mod(x, static_cast<unsigned>(d), q)) * am, q);
        sum.add(unit_phase(static_cast<double>(r) / static_cast<double>(q)));
    }
    return sum.value();
}

CompleteSumTable::CompleteSumTable(std::int64_t q, int d) : q_(q) {
    if (q < 1) throw InputError("CompleteSumTable needs q >= 1");
    if (q > kTableModulusCap) throw BudgetExceeded("CompleteSumTable: modulus " + std::to_string(q) + " too large");
    const auto n = static_cast<std::size_t>(q);
    std::vector<std::int64_t> counts(n, 0);
    for (std::int64_t x = 1; x <= q; ++x) ++counts[static_cast<std::size_t>(pow_mod(x, static_cast<unsigned>(d), q))];
    std::vector<std::pair<std::int64_t, double>> residues;
    for (std::size_t r = 0; r < n; ++r)
        if (counts[r]) residues.emplace_back(static_cast<std::int64_t>(r), static_cast<double>(counts[r]));
    if (static_cast<double>(q) * static_cast<double>(residues.size()) > kTableBudget)
        throw BudgetExceeded("CompleteSumTable: q * #residues exceeds budget for q = " + std::to_string(q));
    std::vector<Complex> root(n);
    for (std::size_t k = 0; k < n; ++k) root[k] = unit_phase(static_cast<double>(k) / static_cast<double>(q));
    values_.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        CompensatedSum sum;
        for (auto [r, c] : residues) {
            const auto idx = static_cast<std::size_t>(static_cast<int128>(r) * static_cast<std::int64_t>(t) % q);
            sum.add(c * root[idx]);
        }
        values_[t] = sum.value();
    }
}

Complex weyl_sum(double alpha, double X, int d) {
    check_power_range(X, d);
    const auto N = static_cast<std::int64_t>(std::floor(X));
    CompensatedSum sum;
    for (std::int64_t x = 1; x <= N; ++x) sum.add(unit_phase(frac_mul(alpha, checked_power(x, d))));
    return sum.value();
}

Complex weyl_sum_near(std::int64_t q, std::int64_t a, double beta, double X, int d) {
    if (q < 1) throw InputError("weyl_sum_near needs q >= 1");
    check_power_range(X, d);
    const auto N = static_cast<std::int64_t>(std::floor(X));
    const std::int64_t am = mod_floor(a, q);
    CompensatedSum sum;
    for (std::int64_t x = 1; x <= N; ++x) {
        const auto r = mod_floor(static_cast<int128>(pow_mod(x, static_cast<unsigned>(d), q)) * am, q);
        sum.add(unit_phase(static_cast<double>(r) / static_cast<double>(q) + frac_mul(beta, checked_power(x, d))));
    }
    return sum.value();
}

Complex smooth_weyl_sum(double alpha, std::span<const std::int64_t> members, int d) {
    CompensatedSum sum;
    for (auto x : members) sum.add(unit_phase(frac_mul(alpha, checked_power(x, d))));
    return sum.value();
}

Complex smooth_weyl_sum_near(std::int64_t q, std::int64_t a, double beta, std::span<const std::int64_t> members,
                             int d) {
    if (q < 1) throw InputError("smooth_weyl_sum_near needs q >= 1");
    const std::int64_t am = mod_floor(a, q);
    CompensatedSum sum;
    for (auto x : members) {
        const auto r = mod_floor(static_cast<int128>(pow_mod(x, static_cast<unsigned>(d), q)) * am, q);
        sum.add(unit_phase(static_cast<double>(r) / static_cast<double>(q) + frac_mul(beta, checked_power(x, d))));
    }
    return sum.value();
}

Complex smooth_weyl_sum(double alpha, double X, double Z, int d) {
    const auto set = smooth_sieve(static_cast<std::int64_t>(std::floor(X)), Z);
    return smooth_weyl_sum(alpha, set.members, d);
}

// ---------------------------------------------------------------------------
// archimedean integral

namespace {

constexpr std::size_t kArchPanelBudget = std::size_t{1} << 26;

// Composite Gauss-Legendre of e(beta xi^d) over [0, 1] with `panels` equal panels.
Complex arch_panels(double beta, int d, std::size_t panels, const GaussRule& rule) {
    CompensatedSum sum;
    const double h = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * h;
        Complex acc = 0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double xi = mid + 0.5 * h * rule.nodes[k];
            acc += rule.weights[k] * unit_phase(beta * std::pow(xi, d));
        }
        sum.add(0.5 * h * acc);
    }
    return sum.value();
}

}  // namespace

QuadValue arch_I(double beta, int d, double tol) {
    if (!(tol > 0)) throw InputError("arch_I tolerance must be positive");
    if (d < 1) throw InputError("arch_I needs d >= 1");
    if (beta == 0.0) return {Complex(1.0, 0.0), 0.0};
    // one panel per half oscillation of the phase beta xi^d
    auto panels = static_cast<std::size_t>(std::ceil(1.0 + 2.0 * d * std::fabs(beta)));
    const auto& hi = gauss_legendre(16);
    const auto& lo = gauss_legendre(8);
    while (panels <= kArchPanelBudget) {
        const Complex fine = arch_panels(beta, d, panels, hi);
        const Complex coarse = arch_panels(beta, d, panels, lo);
        const double err = std::abs(fine - coarse);
        if (err <= tol) return {fine, err};
        panels *= 2;
    }
    throw ToleranceUnachieved("arch_I: tolerance " + std::to_string(tol) + " not reached for beta = " +
                              std::to_string(beta));
}

ArchTable::ArchTable(int d, double beta_max, double step) : d_(d), beta_max_(beta_max), step_(step) {
    if (!(beta_max >= 0) || !(step > 0)) throw InputError("ArchTable needs beta_max >= 0 and step > 0");
    if (beta_max / step > 5e7) throw BudgetExceeded("ArchTable grid too large");
    const auto n = static_cast<std::size_t>(std::ceil(beta_max / step)) + 8;
    values_.resize(n);
    for (std::size_t j = 0; j < n; ++j) values_[j] = arch_I(static_cast<double>(j) * step, d, 1e-13).value;
    // probe interpolation error at off-grid points spread over the range
    const std::size_t probes = std::min<std::size_t>(64, n);
    for (std::size_t k = 0; k < probes; ++k) {
        const double beta = (static_cast<double>(k) + 0.37) * beta_max / static_cast<double>(probes);
        interp_error_ = std::max(interp_error_, std::abs((*this)(beta) - arch_I(beta, d, 1e-13).value));
    }
}

Complex ArchTable::operator()(double beta) const {
    const bool neg = beta < 0;
    const double b = std::fabs(beta);
    if (b > beta_max_ + step_) throw InputError("ArchTable: beta outside the tabulated range");
    const double x = b / step_;
    const auto i = static_cast<long>(std::floor(x));
    const double t = x - static_cast<double>(i);
    auto node = [&](long j) {
        const Complex v = values_[static_cast<std::size_t>(std::labs(j))];
        return j < 0 ? std::conj(v) : v;
    };
    // six-point Lagrange on offsets -2..3
    static constexpr int offs[6] = {-2, -1, 0, 1, 2, 3};
    Complex acc = 0;
    for (int a = 0; a < 6; ++a) {
        double w = 1;
        for (int c = 0; c < 6; ++c)
            if (c != a) w *= (t - offs[c]) / static_cast<double>(offs[a] - offs[c]);
        acc += w * node(i + offs[a]);
    }
    return neg ? std::conj(acc) : acc;
}

// ---------------------------------------------------------------------------
// w(beta)

namespace {

struct WIntegrand {
    double beta;
    int d;
    double log_z;
    const DickmanTable& rho;

    double rho_prime(double u) const { return u > 1.0 ? -rho(u - 1.0) / u : 0.0; }
    double g(double t) const {
        return std::pow(t, 1.0 / d - 1.0) / d * rho(std::log(t) / (d * log_z));
    }
    double g_prime(double t) const {
        const double u = std::log(t) / (d * log_z);
        const double base = std::pow(t, 1.0 / d - 1.0) / d;
        return base * ((1.0 / d - 1.0) / t * rho(u) + rho_prime(u) / (t * d * log_z));
    }
    Complex F(double t) const { return g(t) * unit_phase(frac_mul(beta, static_cast<uint128>(t))); }
    Complex F_prime(double t) const {
        return Complex(g_prime(t), kTwoPi * beta * g(t)) * unit_phase(frac_mul(beta, static_cast<uint128>(t)));
    }
};

// int_{s0}^{s1} rho(log s / log Z) e(beta s^d) ds with breakpoints at powers of Z.
QuadValue w_tail_integral(const WIntegrand& f, double s0, double s1) {
    std::vector<double> cuts{s0};
    for (int k = 1; k < 40; ++k) {
        const double zk = std::exp(k * f.log_z);
        if (zk > s0 && zk < s1) cuts.push_back(zk);
    }
    cuts.push_back(s1);
    // geometric refinement so rho varies slowly inside each segment
    std::vector<double> pts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i];
        pts.push_back(a);
        while (a * 2.0 < cuts[i + 1]) {
            a *= 2.0;
            pts.push_back(a);
        }
    }
    pts.push_back(s1);
    const auto& hi = gauss_legendre(16);
    const auto& lo = gauss_legendre(8);
    CompensatedSum total;
    double err = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const double cycles = std::fabs(f.beta) * f.d * std::pow(b, f.d - 1) * (b - a);
        const auto panels = static_cast<std::size_t>(std::ceil(2.0 * cycles)) + 4;
        const double h = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = a + (static_cast<double>(p) + 0.5) * h;
            Complex qh = 0, ql = 0;
            auto integrand = [&](double s) {
                return f.rho(std::log(s) / f.log_z) * unit_phase(f.beta * std::pow(s, f.d));
            };
            for (std::size_t k = 0; k < hi.nodes.size(); ++k) qh += hi.weights[k] * integrand(mid + 0.5 * h * hi.nodes[k]);
            for (std::size_t k = 0; k < lo.nodes.size(); ++k) ql += lo.weights[k] * integrand(mid + 0.5 * h * lo.nodes[k]);
            total.add(0.5 * h * qh);
            err += 0.5 * h * std::abs(qh - ql);
        }
    }
    return {total.value(), err};
}

}  // namespace

QuadValue w_kernel(double beta, double X, double Z, int d, WMethod method) {
    if (!(Z > 1) || !(X > Z)) throw InputError("w_kernel needs 1 < Z < X");
    const double Xd = std::pow(X, d), Zd = std::pow(Z, d);
    if (Xd >= 9.0e18) throw BudgetExceeded("w_kernel: X^d beyond 64-bit range");
    const std::int64_t m_lo = floor_bound(Zd);  // exclusive
    const std::int64_t m_hi = floor_bound(Xd);  // inclusive
    const auto length = static_cast<double>(m_hi - m_lo);
    if (method == WMethod::Direct && length > kWDirectBudget)
        throw BudgetExceeded("w_kernel: " + std::to_string(m_hi - m_lo) + " terms exceed the direct budget");

    const WIntegrand f{beta, d, std::log(Z), dickman_table()};
    const std::int64_t head_end =
        method == WMethod::Direct ? m_hi : std::min<std::int64_t>(m_hi, m_lo + 1'000'000);
    CompensatedSum sum;
    for (std::int64_t m = m_lo + 1; m <= head_end; ++m) sum.add(f.F(static_cast<double>(m)));
    if (head_end == m_hi) return {sum.value(), 1e-15 * length};

    // Euler-Maclaurin for sum_{c < m <= b} F(m)
    const auto c = static_cast<double>(head_end), b = static_cast<double>(m_hi);
    const QuadValue integral = w_tail_integral(f, std::pow(c, 1.0 / d), std::pow(b, 1.0 / d));
    const Complex correction = 0.5 * (f.F(b) - f.F(c)) + (f.F_prime(b) - f.F_prime(c)) / 12.0;
    sum.add(integral.value);
    sum.add(correction);
    // next Euler-Maclaurin term bounds the truncation
    auto third = [&](double t) { return f.g(t) * std::pow(kTwoPi * std::fabs(beta) + 2.0 / t, 3); };
    const double em_err = (third(c) + third(b)) / 720.0;
    return {sum.value(), integral.error + em_err};
}

Complex major_arc_model(std::int64_t q, std::int64_t a, double beta, double X, int d) {
    if (q < 1) throw InputError("major_arc_model needs q >= 1");
    const Complex S = complete_sum(q, a, d);
    const Complex I = arch_I(std::pow(X, d) * beta, d, 1e-12).value;
    return X / static_cast<double>(q) * S * I;
}

ArcLabel classify_arc(std::span<const double> theta, double L, double X, int d) {
    if (!(L >= 1)) throw InputError("classify_arc needs L >= 1");
    const double width = L / std::pow(X, d);
    const auto q_max = static_cast<std::int64_t>(std::floor(L + 1e-12));
    const std::size_t R = theta.size();
    std::vector<std::vector<std::int64_t>> cand(R);
    std::vector<std::int64_t> a(R);
    for (std::int64_t q = 1; q <= q_max; ++q) {
        bool ok = true;
        for (std::size_t i = 0; i < R && ok; ++i) {
            cand[i].clear();
            const double qt = static_cast<double>(q) * theta[i];
            const auto fl = static_cast<std::int64_t>(std::floor(qt));
            for (std::int64_t c : {fl, fl + 1})
                if (c >= 0 && c <= q && std::fabs(qt - static_cast<double>(c)) < width) cand[i].push_back(c);
            ok = !cand[i].empty();
        }
        if (!ok) continue;
        // lexicographic scan over the (at most 2^R) candidate vectors
        std::function<bool(std::size_t)> pick = [&](std::size_t i) -> bool {
            if (i == R) return vector_gcd(q, a) == 1;
            for (auto c : cand[i]) {
                a[i] = c;
                if (pick(i + 1)) return true;
            }
            return false;
        };
        if (pick(0)) return {true, q, a};
    }
    return {};
}

std::vector<std::pair<std::int64_t, std::int64_t>> convergents(double alpha, std::int64_t q_max) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    double a0 = std::floor(alpha);
    std::int64_t p_prev = 1, q_prev = 0;
    std::int64_t p = static_cast<std::int64_t>(a0), q = 1;
    out.emplace_back(p, q);
    double x = alpha - a0;
    for (int it = 0; it < 64 && x > 1e-15; ++it) {
        x = 1.0 / x;
        const double ai = std::floor(x);
        x -= ai;
        if (ai > 1e15) break;
        const auto ak = static_cast<std::int64_t>(ai);
        const std::int64_t p_next = ak * p + p_prev, q_next = ak * q + q_prev;
        if (q_next > q_max || q_next <= 0) break;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        out.emplace_back(p, q);
    }
    return out;
}

}  // namespace circle
