#pragma once

/**
 * The arithmetic factor of the main term.
 *
 *   A(q)   = q^-n sum_{1<=a<=q, gcd(q,a)=1} prod_c S(q, a.c) e_q(-mu.a)
 *   S(B)   = sum_{q<=B} A(q)
 *   chi(p) = 1 + sum_k A(p^k),   S = prod_p chi(p)
 *
 * local_count is an independent brute-force oracle:
 *   1 + sum_{j<=k} A(p^j) = p^(-k(n-R)) #{x mod p^k : M x^d = mu mod p^k}.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circle/numeric.hpp"
#include "circle/system.hpp"

namespace circle {

struct TruncatedTerm {
    double key;    // q, or panel / shell index
    double value;
};

/// A truncated constant (series or integral) with a-posteriori error data.
struct TruncatedConstant {
    double value = 0;
    double imag = 0;
    double B = 0;
    std::optional<double> tail_estimate;  // absent when the convergence hypothesis fails
    double tail_constant = 0;             // fitted C in C * B^(exponent)
    double quad_error = 0;
    std::vector<TruncatedTerm> terms;
    std::string note;
};

inline constexpr double kAqBudget = 4e9;

/// A(q). Cost ~ q^R * n plus the S(q, .) table; throws BudgetExceeded above
/// 4e9 or when the table budget is exceeded.
Complex a_of_q(const DiagonalSystem& system, std::int64_t q);

struct ChiValue {
    double value = 1;
    int k_used = 0;        // largest k summed
    bool stabilized = false;
    std::vector<double> terms;  // A(p^k), k = 1..k_used
};

/// 1 + sum_k A(p^k); stops after two consecutive |A(p^k)| < tol or at k_cap.
ChiValue chi_p(const DiagonalSystem& system, std::int64_t p, int k_cap = 8, double tol = 1e-9);

/// S(B) with tail C B^(1 - R(T/d - 1)), C fitted on q in [B/10, B].
/// Without a convergent tail (R(T/d - 1) <= 1) the tail is left empty.
TruncatedConstant singular_series_truncated(const DiagonalSystem& system, double B, std::size_t psi,
                                            unsigned workers = 1);

/// prod_{p <= P} chi(p); tail bounded from the fitted |chi(p) - 1| decay.
TruncatedConstant euler_product(const DiagonalSystem& system, std::int64_t P, std::size_t psi);

/// Exact #{x in (Z/q)^n : M x^d = mu (mod q)} by residue-vector
/// convolution of the two column halves. Budget: q^R <= 2e7 states.
uint128 local_count(const DiagonalSystem& system, std::int64_t modulus);

/// JSON {B, value, tail_estimate, terms:[{q, A_q}]}.
std::string series_report_json(const TruncatedConstant& series);

std::vector<std::int64_t> primes_up_to(std::int64_t n);

}  // namespace circle
