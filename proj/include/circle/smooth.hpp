#pragma once

/**
 * Smooth numbers and Dickman's function.
 *
 * A(X, Z) is the set of integers 1 <= x <= X all of whose prime factors are
 * at most Z (1 is included). rho(u) is the limiting density of
 * X^(1/u)-smooth numbers: rho = 1 on [0, 1] and u rho'(u) = -rho(u - 1).
 */

#include <cstdint>
#include <string>
#include <vector>

namespace circle {

struct SmoothSet {
    std::int64_t X = 0;
    double Z = 0;
    std::vector<std::int64_t> members;  // strictly increasing

    std::size_t size() const { return members.size(); }
};

inline constexpr std::int64_t kSieveBudget = 100'000'000;

/// Largest prime factor of every m <= X (entry 1 is 1, entry 0 unused).
std::vector<std::uint32_t> largest_prime_factor_table(std::int64_t X);

/// Exact A(X, Z). Throws InputError unless 1 <= Z <= X, BudgetExceeded for X > 1e8.
SmoothSet smooth_sieve(std::int64_t X, double Z);

/// Trial-division smoothness test (reference path).
bool is_smooth(std::int64_t m, double Z);

/// Dickman's rho tabulated on [0, u_max] with uniform step.
class DickmanTable {
public:
    explicit DickmanTable(double step = 1e-4, double u_max = 20.0);

    double step() const { return step_; }
    double u_max() const { return u_max_; }
    const std::vector<double>& values() const { return values_; }

    /// Cubic interpolation inside the table; u in [0, u_max].
    double operator()(double u) const;

    /// CSV with header "u,rho", one line per grid point with stride `stride`.
    std::string to_csv(std::size_t stride = 100) const;

private:
    double step_;
    double u_max_;
    std::vector<double> values_;
};

/// Shared default table (step 1e-4, u <= 20).
const DickmanTable& dickman_table();

/// rho(u) for 0 <= u <= 20 to absolute accuracy tol (tol >= 1e-12).
double dickman_rho(double u, double tol = 1e-9);

/// rho(1/eta), the per-variable density constant for X^eta-smooth variables.
double c_eta(double eta);

}  // namespace circle
