#pragma once

// Closed-form variable-count thresholds and the admissible-exponent data
// behind the smooth-number threshold.

#include <cstdint>
#include <optional>
#include <span>

namespace circle {

enum class VariableMode { Integer, Smooth };

struct Rational {
    std::int64_t num;
    std::int64_t den;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

/// Weyl-inequality exponent: 1/2^(d-1) for d <= 5, else 1/(d(d-1)).
Rational lambda_of(int d);

/// 1 if 2d+2 >= s^2 + s with s = floor(sqrt(2d+2)), else 2.
int theta_of(int d);

/// Three-term minimum for the integer-variable mean-value threshold.
long t_int(int d);

/// The "d >= 10" closed form d^2 - d + 2 floor(sqrt(2d+2)) - theta(d).
long t_int_large_formula(int d);

/// One row of the admissible-exponent tables (values to 7 decimals).
struct AdmissibleDatum {
    int d;
    int w;
    double delta_2w;
    int v;
    double delta_2v;
    double t_reported;      // T(d) column
    double bound_reported;  // 2v + Delta_2v T(d) column
};

std::span<const AdmissibleDatum> admissible_table();
std::optional<AdmissibleDatum> admissible_datum(int d);

/// 4w^2 / (d - 2 Delta_2w), for 5 <= d <= 13.
double t_of_d(int d);

/// 2v + Delta_2v T(d), for 5 <= d <= 13.
double smooth_bound(int d);

/// Smooth-variable threshold: computed for 5..13, tabulated for 14..19,
/// ceil(d(log d + 4.20032)) from 20 on. Throws InputError for d < 5.
long t_smo(int d);

/// ceil(d (ln d + 4.20032)).
long t_smo_upper_formula(int d);

/// True when t_smo(d) for this d is a tabulated value rather than computed.
bool t_smo_is_tabulated(int d);

long threshold(VariableMode mode, int d);

}  // namespace circle
