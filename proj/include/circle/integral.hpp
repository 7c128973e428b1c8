#pragma once

/**
 * The archimedean factor
 *
 *   I(B) = int_{|gamma| < B} prod_c I(gamma . c) e(-X^-d mu . gamma) dgamma,
 *
 * with |gamma| the max-norm. It equals the density at mu / X^d of the map
 * xi -> M xi^d on [0,1]^n, which real_density_oracle estimates directly.
 */

#include <cstdint>
#include <string>

#include "circle/series.hpp"
#include "circle/system.hpp"

namespace circle {

struct IntegralOptions {
    double tol = 1e-6;
    std::uint64_t qmc_points = 1u << 18;  // per randomized shift, R = 3
    unsigned qmc_shifts = 8;
    std::uint64_t seed = 12345;
};

/// Quadrature for R <= 3, requires n > dR. The tail estimate
/// C B^(1 - T/d) is produced when T > d; C is fitted from the absolute
/// integrand on the shell B/2 <= |gamma| < B.
TruncatedConstant singular_integral_truncated(const DiagonalSystem& system, double B, double X, std::size_t psi,
                                              const IntegralOptions& options = {});

struct DensityEstimate {
    double value = 0;
    double std_error = 0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

/// (2 eps)^-R vol{xi in [0,1]^n : |row_i . xi^d - mu_i/X^d| < eps for all i}
/// by plain Monte Carlo (mt19937_64, fixed seed).
DensityEstimate real_density_oracle(const DiagonalSystem& system, double X, double epsilon, std::uint64_t samples,
                                    std::uint64_t seed = 20240601);

/// C_fit B^(1 - T/d); throws HypothesisUnmet when T <= d.
double i_tail_bound(double B, long T, int d, double C_fit);

/// JSON {B, X, value_re, value_im, quad_error, tail_estimate}.
std::string integral_report_json(const TruncatedConstant& integral, double X);

}  // namespace circle
