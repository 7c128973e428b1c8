#include <doctest.h>

#include <cmath>

#include "circle/errors.hpp"
#include "circle/thresholds.hpp"

using namespace circle;

TEST_CASE("lambda") {
    CHECK(lambda_of(2) == Rational{1, 2});
    CHECK(lambda_of(3) == Rational{1, 4});
    CHECK(lambda_of(5) == Rational{1, 16});
    CHECK(lambda_of(6) == Rational{1, 30});
    CHECK(lambda_of(10) == Rational{1, 90});
}

TEST_CASE("theta") {
    CHECK(theta_of(2) == 1);
    CHECK(theta_of(4) == 2);
    CHECK(theta_of(10) == 1);
    // direct evaluation of the definition
    for (int d = 2; d <= 60; ++d) {
        const int m = 2 * d + 2;
        int s = 0;
        while ((s + 1) * (s + 1) <= m) ++s;
        CHECK(theta_of(d) == (m >= s * s + s ? 1 : 2));
    }
}

TEST_CASE("t_int table") {
    const long table[] = {4, 8, 15, 23, 34, 47, 61, 78};
    for (int d = 2; d <= 9; ++d) CHECK(t_int(d) == table[d - 2]);
    CHECK(t_int(10) == 97);
    CHECK(t_int_large_formula(10) == 97);
    for (int d = 2; d <= 50; ++d) {
        CHECK(t_int(d) <= std::min<long>(d < 62 ? (1L << d) : 1L << 62, d * (d + 1)));
        if (d >= 10) CHECK(t_int(d) == t_int_large_formula(d));
    }
}

TEST_CASE("T(d) and smooth bound against the proof tables") {
    CHECK(std::fabs(t_of_d(5) - 30.15045927) < 1e-6);
    CHECK(std::fabs(t_of_d(7) - 48.46467935) < 1e-6);
    CHECK(std::fabs(t_of_d(13) - 104.94544480) < 1e-6);
    CHECK(std::fabs(smooth_bound(5) - 18.33252094) < 1e-6);
    CHECK(std::fabs(smooth_bound(12) - 72.70074830) < 1e-6);
    for (const auto& row : admissible_table()) {
        CHECK(std::fabs(t_of_d(row.d) - row.t_reported) < 1e-6);
        CHECK(std::fabs(smooth_bound(row.d) - row.bound_reported) < 1e-6);
    }
    CHECK_THROWS_AS(t_of_d(4), InputError);
    CHECK_THROWS_AS(t_of_d(14), InputError);
}

TEST_CASE("t_smo table") {
    const long table[] = {19, 25, 33, 41, 49, 57, 65, 73, 81, 89, 97, 105, 113, 121, 129};
    for (int d = 5; d <= 19; ++d) CHECK(t_smo(d) == table[d - 5]);
    CHECK(t_smo(20) == 144);
    CHECK(t_smo_upper_formula(20) == 144);
    CHECK(t_smo_upper_formula(19) == 136);
    for (int d = 5; d <= 200; ++d) CHECK(t_smo(d) <= t_smo_upper_formula(d));
    CHECK_FALSE(t_smo_is_tabulated(13));
    CHECK(t_smo_is_tabulated(14));
    CHECK_THROWS_AS(t_smo(4), InputError);
}

TEST_CASE("threshold dispatch") {
    CHECK(threshold(VariableMode::Integer, 3) == 8);
    CHECK(threshold(VariableMode::Smooth, 6) == 25);
}
