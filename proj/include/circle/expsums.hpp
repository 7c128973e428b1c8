#pragma once

/**
 * Exponential sums and archimedean kernels.
 *
 *   S(q, a)     = sum_{1<=x<=q} e_q(a x^d)
 *   weyl sum    = sum_{1<=x<=X} e(alpha x^d)
 *   f(alpha)    = same sum over Z-smooth x
 *   I(beta)     = int_0^1 e(beta xi^d) dxi
 *   w(beta)     = sum_{Z^d < m <= X^d} (1/d) m^(1/d-1) rho(log m/(d log Z)) e(beta m)
 *
 * Phases alpha * x^d are reduced mod 1 exactly from the binary expansion of
 * the double alpha, so large x^d does not destroy the fractional part.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "circle/numeric.hpp"
#include "circle/smooth.hpp"

namespace circle {

/// A numerically evaluated quantity with an absolute error estimate.
struct QuadValue {
    Complex value;
    double error = 0;
};

/// frac(y * N) in [0, 1), exact up to the final rounding.
double frac_mul(double y, uint128 N);

Complex complete_sum(std::int64_t q, std::int64_t a, int d);

inline constexpr std::int64_t kTableModulusCap = 20'000'000;
inline constexpr double kTableBudget = 1e9;

/// All S(q, t) for t = 0..q-1, built from the residue counts of x^d mod q.
/// Cost q * #{x^d mod q}; throws BudgetExceeded above 1e9 or for q > 2e7.
class CompleteSumTable {
public:
    CompleteSumTable(std::int64_t q, int d);
    std::int64_t modulus() const { return q_; }
    Complex operator()(std::int64_t a) const { return values_[static_cast<std::size_t>(mod_floor(a, q_))]; }
    const std::vector<Complex>& values() const { return values_; }

private:
    std::int64_t q_;
    std::vector<Complex> values_;
};

/// sum_{1<=x<=floor(X)} e(alpha x^d). Requires floor(X)^d < 2^64.
Complex weyl_sum(double alpha, double X, int d);

/// Same sum at alpha = a/q + beta, with the rational part reduced exactly.
Complex weyl_sum_near(std::int64_t q, std::int64_t a, double beta, double X, int d);

/// sum over the given members (typically A(X, Z)) of e(alpha x^d).
Complex smooth_weyl_sum(double alpha, std::span<const std::int64_t> members, int d);
Complex smooth_weyl_sum_near(std::int64_t q, std::int64_t a, double beta,
                             std::span<const std::int64_t> members, int d);

/// Sieves A(X, Z) and sums over it.
Complex smooth_weyl_sum(double alpha, double X, double Z, int d);

/// I(beta) by composite Gauss-Legendre in xi. Throws ToleranceUnachieved
/// if the panel budget runs out.
QuadValue arch_I(double beta, int d, double tol = 1e-12);

/// I(beta) tabulated on a uniform grid over [0, beta_max] with six-point
/// interpolation; I(-beta) = conj I(beta).
class ArchTable {
public:
    ArchTable(int d, double beta_max, double step = 1.0 / 32.0);

    Complex operator()(double beta) const;
    double beta_max() const { return beta_max_; }
    /// Largest interpolation error observed against direct quadrature.
    double interpolation_error() const { return interp_error_; }

private:
    int d_;
    double beta_max_;
    double step_;
    std::vector<Complex> values_;
    double interp_error_ = 0;
};

enum class WMethod { Direct, Auto };

inline constexpr double kWDirectBudget = 1e8;

/// w(beta) for Z-smooth major-arc approximation. Direct summation needs at
/// most 1e8 terms (else BudgetExceeded); Auto sums a head directly and
/// the remaining range by Euler-Maclaurin.
QuadValue w_kernel(double beta, double X, double Z, int d, WMethod method = WMethod::Auto);

/// X q^-1 S(q, a) I(X^d beta).
Complex major_arc_model(std::int64_t q, std::int64_t a, double beta, double X, int d);

struct ArcLabel {
    bool major = false;
    std::int64_t q = 0;
    std::vector<std::int64_t> a;

    bool operator==(const ArcLabel&) const = default;
};

/// Major iff some q <= L and integer vector 0 <= a <= q with
/// gcd(q, a) = 1 satisfy |q theta_i - a_i| < L X^-d for all i. Returns the
/// smallest such q, then the lexicographically smallest a.
ArcLabel classify_arc(std::span<const double> theta, double L, double X, int d);

/// Continued-fraction convergents p/q of alpha with q <= q_max.
std::vector<std::pair<std::int64_t, std::int64_t>> convergents(double alpha, std::int64_t q_max);

}  // namespace circle
