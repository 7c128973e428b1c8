#include "circle/smooth.hpp"

#include <cmath>
#include <sstream>

#include "circle/errors.hpp"

namespace circle {

std::vector<std::uint32_t> largest_prime_factor_table(std::int64_t X) {
    if (X > kSieveBudget) throw BudgetExceeded("sieve limit is 1e8, requested " + std::to_string(X));
    const auto n = static_cast<std::size_t>(X);
    std::vector<std::uint32_t> lpf(n + 1, 0);
    if (n >= 1) lpf[1] = 1;
    for (std::size_t p = 2; p <= n; ++p) {
        if (lpf[p] != 0) continue;  // composite: already has a smaller prime factor
        for (std::size_t m = p; m <= n; m += p) lpf[m] = static_cast<std::uint32_t>(p);
    }
    return lpf;
}

SmoothSet smooth_sieve(std::int64_t X, double Z) {
    if (X < 1 || !(Z >= 1) || Z > static_cast<double>(X))
        throw InputError("smooth_sieve needs 1 <= Z <= X");
    const auto lpf = largest_prime_factor_table(X);
    SmoothSet out{X, Z, {}};
    for (std::int64_t m = 1; m <= X; ++m)
        if (static_cast<double>(lpf[static_cast<std::size_t>(m)]) <= Z) out.members.push_back(m);
    return out;
}

bool is_smooth(std::int64_t m, double Z) {
    if (m < 1) return false;
    for (std::int64_t p = 2; p * p <= m; ++p) {
        while (m % p == 0) {
            if (static_cast<double>(p) > Z) return false;
            m /= p;
        }
    }
    return m == 1 || static_cast<double>(m) <= Z;
}

// Stepwise integration of rho(u) = rho(k) - int_k^u rho(t-1)/t dt.
// The step divides 1, so t - 1 lies on the grid and the integrand is known
// exactly at both ends of every step; trapezoid with an endpoint-derivative
// correction gives O(h^4) local error.
DickmanTable::DickmanTable(double step, double u_max) : step_(step), u_max_(u_max) {
    const auto per_unit = static_cast<std::size_t>(std::llround(1.0 / step));
    if (per_unit < 4 || std::fabs(per_unit * step - 1.0) > 1e-12)
        throw InputError("Dickman step must be 1/N for an integer N >= 4");
    step_ = 1.0 / static_cast<double>(per_unit);
    const auto nodes = static_cast<std::size_t>(std::ceil(u_max / step_)) + 1;
    values_.assign(nodes, 1.0);
    // One-sided rho'(u) at grid node k; rho' jumps only at u = 1.
    auto rho_deriv = [&](std::size_t k, bool from_right) {
        if (k < per_unit || (k == per_unit && !from_right)) return 0.0;
        return -values_[k - per_unit] / (static_cast<double>(k) * step_);
    };
    for (std::size_t i = per_unit + 1; i < nodes; ++i) {
        const double t0 = static_cast<double>(i - 1) * step_;
        const double t1 = static_cast<double>(i) * step_;
        const std::size_t k0 = i - 1 - per_unit, k1 = i - per_unit;
        const double f0 = values_[k0] / t0;
        const double f1 = values_[k1] / t1;
        // f(t) = rho(t-1)/t, f'(t) = rho'(t-1)/t - rho(t-1)/t^2
        const double fp0 = rho_deriv(k0, true) / t0 - values_[k0] / (t0 * t0);
        const double fp1 = rho_deriv(k1, false) / t1 - values_[k1] / (t1 * t1);
        const double integral = 0.5 * step_ * (f0 + f1) + step_ * step_ / 12.0 * (fp0 - fp1);
        values_[i] = values_[i - 1] - integral;
    }
}

double DickmanTable::operator()(double u) const {
    if (!(u >= 0) || u > u_max_ + 1e-12) throw InputError("Dickman rho argument out of range");
    if (u <= 1.0) return 1.0;
    const double x = u / step_;
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 2 >= values_.size()) i = values_.size() - 3;
    if (i < 1) i = 1;
    const double t = x - static_cast<double>(i);
    const double p0 = values_[i - 1], p1 = values_[i], p2 = values_[i + 1], p3 = values_[i + 2];
    // cubic Lagrange through nodes i-1..i+2
    return p0 * (-t * (t - 1) * (t - 2) / 6.0) + p1 * ((t + 1) * (t - 1) * (t - 2) / 2.0) +
           p2 * (-(t + 1) * t * (t - 2) / 2.0) + p3 * ((t + 1) * t * (t - 1) / 6.0);
}

std::string DickmanTable::to_csv(std::size_t stride) const {
    std::ostringstream os;
    os.precision(12);
    os << "u,rho\n";
    for (std::size_t i = 0; i < values_.size(); i += std::max<std::size_t>(stride, 1))
        os << static_cast<double>(i) * step_ << ',' << values_[i] << '\n';
    return os.str();
}

const DickmanTable& dickman_table() {
    static const DickmanTable table;
    return table;
}

double dickman_rho(double u, double tol) {
    if (!(u >= 0) || u > 20.0) throw InputError("dickman_rho needs 0 <= u <= 20");
    if (!(tol >= 1e-12)) throw InputError("dickman_rho tolerance below 1e-12 is not supported");
    if (tol >= 1e-10) return dickman_table()(u);
    static const DickmanTable fine(1.0 / 50000.0, 20.0);
    return fine(u);
}

double c_eta(double eta) {
    if (!(eta > 0 && eta <= 1)) throw InputError("c_eta needs 0 < eta <= 1");
    return dickman_rho(1.0 / eta);
}

}  // namespace circle
