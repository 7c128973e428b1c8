#include "circle/thresholds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "circle/errors.hpp"

namespace circle {

namespace {

void require_degree(int d, int lo) {
    if (d < lo) throw InputError("degree must be >= " + std::to_string(lo) + ", got " + std::to_string(d));
}

long isqrt(long x) {
    long r = static_cast<long>(std::sqrt(static_cast<double>(x)));
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

long ceil_div(long a, long b) {  // b > 0
    long q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return q;
}

// Admissible exponents and the chosen (w, v) from the mean-value data.
constexpr std::array<AdmissibleDatum, 9> kTable{{
    {5, 4, 1.4386563, 8, 0.0773627, 30.15045927, 18.33252094},
    {6, 5, 1.7246965, 12, 0.0000000, 39.20635362, 24.00000000},
    {7, 6, 2.0143820, 16, 0.0105382, 48.46467935, 32.51073048},
    {8, 7, 2.3105992, 19, 0.0473193, 58.00873304, 40.74493264},
    {9, 8, 2.6039271, 22, 0.0727119, 67.50795289, 48.90863152},
    {10, 9, 2.8945712, 25, 0.0895832, 76.94394605, 56.89288491},
    {11, 10, 3.1849727, 28, 0.1020502, 86.39206976, 64.81632800},
    {12, 11, 3.4700805, 31, 0.1118679, 95.65521749, 72.70074830},
    {13, 12, 3.7557170, 35, 0.1010835, 104.94544480, 80.60825287},
}};

// floor(G_0(d)) + 1 for 14 <= d <= 19, taken over without recomputation.
constexpr std::array<long, 6> kTabulated14To19{89, 97, 105, 113, 121, 129};

}  // namespace

Rational lambda_of(int d) {
    require_degree(d, 2);
    if (d <= 5) return {1, std::int64_t{1} << (d - 1)};
    return {1, static_cast<std::int64_t>(d) * (d - 1)};
}

int theta_of(int d) {
    require_degree(d, 2);
    const long m = 2L * d + 2;
    const long s = isqrt(m);
    return m >= s * s + s ? 1 : 2;
}

long t_int_large_formula(int d) {
    require_degree(d, 2);
    const long dd = d;
    return dd * dd - dd + 2 * isqrt(2 * dd + 2) - theta_of(d);
}

long t_int(int d) {
    require_degree(d, 2);
    const long dd = d;
    const long hua = d < 62 ? (1L << d) : std::numeric_limits<long>::max();
    long best_j = std::numeric_limits<long>::min();
    for (long j = 1; j <= dd - 1; ++j) {
        if (j >= 62 || (1L << j) > dd * dd) break;
        best_j = std::max(best_j, ceil_div(dd * j - (1L << j), dd + 1 - j));
    }
    long third = std::numeric_limits<long>::max();
    if (best_j != std::numeric_limits<long>::min()) third = dd * dd + 1 - best_j;
    return std::min({hua, t_int_large_formula(d), third});
}

std::span<const AdmissibleDatum> admissible_table() { return kTable; }

std::optional<AdmissibleDatum> admissible_datum(int d) {
    for (const auto& row : kTable)
        if (row.d == d) return row;
    return std::nullopt;
}

double t_of_d(int d) {
    const auto row = admissible_datum(d);
    if (!row) throw InputError("no admissible-exponent data for d = " + std::to_string(d));
    return 4.0 * row->w * row->w / (row->d - 2.0 * row->delta_2w);
}

double smooth_bound(int d) {
    const auto row = admissible_datum(d);
    if (!row) throw InputError("no admissible-exponent data for d = " + std::to_string(d));
    return 2.0 * row->v + row->delta_2v * t_of_d(d);
}

long t_smo_upper_formula(int d) {
    return static_cast<long>(std::ceil(d * (std::log(static_cast<double>(d)) + 4.20032)));
}

bool t_smo_is_tabulated(int d) { return d >= 14 && d <= 19; }

long t_smo(int d) {
    require_degree(d, 5);
    long value;
    if (d <= 13)
        value = static_cast<long>(std::floor(smooth_bound(d))) + 1;
    else if (d <= 19)
        value = kTabulated14To19[static_cast<std::size_t>(d - 14)];
    else
        value = t_smo_upper_formula(d);
    if (value > t_smo_upper_formula(d))
        throw std::logic_error("t_smo(" + std::to_string(d) + ") exceeds its closed-form upper bound");
    return value;
}

long threshold(VariableMode mode, int d) { return mode == VariableMode::Integer ? t_int(d) : t_smo(d); }

}  // namespace circle
