#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "circle/errors.hpp"
#include "circle/linalg.hpp"

using namespace circle;

namespace {

// cofactor-expansion determinant, fine for R <= 3
long long naive_det(const std::vector<std::vector<long long>>& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    long long total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<long long>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<long long> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(a[r][k]);
            minor.push_back(row);
        }
        total += (c % 2 ? -1 : 1) * a[0][c] * naive_det(minor);
    }
    return total;
}

bool oracle_independent(const DiagonalSystem& s, const std::vector<std::size_t>& cols) {
    std::vector<std::vector<long long>> sub(s.rows());
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (auto c : cols) sub[i].push_back(s.coeff(i, c));
    return naive_det(sub) != 0;
}

// maximal number of disjoint independent R-subsets by trying every subset at every level
std::size_t oracle_psi(const DiagonalSystem& s, std::vector<bool>& used) {
    const std::size_t R = s.rows(), n = s.cols();
    std::size_t best = 0;
    std::vector<std::size_t> pick;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (pick.size() == R) {
            if (!oracle_independent(s, pick)) return;
            for (auto c : pick) used[c] = true;
            best = std::max(best, 1 + oracle_psi(s, used));
            for (auto c : pick) used[c] = false;
            return;
        }
        for (std::size_t j = start; j < n; ++j) {
            if (used[j]) continue;
            pick.push_back(j);
            self(self, j + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    return best;
}

std::size_t oracle_psi(const DiagonalSystem& s) {
    std::vector<bool> used(s.cols(), false);
    return oracle_psi(s, used);
}

DiagonalSystem random_system(std::mt19937_64& rng, std::size_t R, std::size_t n, int range) {
    std::uniform_int_distribution<int> coef(-range, range);
    IntMatrix m(R, std::vector<std::int64_t>(n));
    for (auto& row : m)
        for (auto& v : row) v = coef(rng);
    return DiagonalSystem(2, m, std::vector<std::int64_t>(R, 0));
}

}  // namespace

TEST_CASE("exact rank") {
    CHECK(exact_rank({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 3);
    CHECK(exact_rank({{0, 0, 0, 0}, {0, 0, 0, 0}}) == 0);
    CHECK(exact_rank({{1, 2}, {2, 4}}) == 1);
    // large entries stay exact
    const std::int64_t big = 3'000'000'000'000LL;
    CHECK(exact_rank({{big, big + 1}, {big - 1, big}}) == 2);
    CHECK(determinant_string({{big, big + 1}, {big - 1, big}}) == "1");
}

TEST_CASE("determinant sign matches cofactor oracle") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(-5, 5);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::vector<long long>> a(3, std::vector<long long>(3));
        IntMatrix m(3, std::vector<std::int64_t>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = a[i][j] = coef(rng);
        const long long d = naive_det(a);
        CHECK(determinant_sign(m) == (d > 0) - (d < 0));
        CHECK(determinant_string(m) == std::to_string(d));
    }
}

TEST_CASE("is_basis") {
    CHECK(is_basis(DiagonalSystem(2, {{1, 0}, {0, 1}}, {0, 0}), {0, 1}));
    CHECK_FALSE(is_basis(DiagonalSystem(2, {{1, 2}, {2, 4}}, {0, 0}), {0, 1}));
    const DiagonalSystem s(2, {{1, 1, 1}, {1, 2, 3}}, {0, 0});
    CHECK(is_basis(s, {0, 2}));
    CHECK_THROWS_AS(is_basis(s, {0}), InputError);
    CHECK_THROWS_AS(is_basis(s, {0, 0}), InputError);
    CHECK_THROWS_AS(is_basis(s, {0, 7}), InputError);
}

TEST_CASE("psi small examples") {
    CHECK(psi_greedy(DiagonalSystem(2, {{1, 0, 1, 0}, {0, 1, 0, 1}}, {0, 0})).psi == 2);
    CHECK(psi_greedy(DiagonalSystem(2, {{2, 0, 3}}, {0})).psi == 2);
    CHECK(psi_exact(DiagonalSystem(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0})).psi == 1);
    IntMatrix stacked(3);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) stacked[i].push_back(i == j);
    CHECK(psi_exact(DiagonalSystem(2, stacked, {0, 0, 0})).psi == 4);

    const DiagonalSystem s(2, {{1, 1, 1, 1, 0, 1}, {0, 1, 2, 3, 1, 1}}, {0, 0});
    const auto res = psi_exact(s);
    CHECK(res.psi == oracle_psi(s));
    CHECK(res.certificate.verify(s));
}

TEST_CASE("greedy can be beaten by the exact search") {
    // greedy takes {0,1} first and strands the parallel pair 2,3; the optimum is {0,2},{1,3}
    const DiagonalSystem s(2, {{1, 0, 1, 1}, {0, 1, 1, 1}}, {0, 0});
    CHECK(psi_exact(s).psi == 2);
    CHECK(psi_greedy(s).psi == 1);
}

TEST_CASE("psi_exact agrees with exhaustive partition search") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 150; ++t) {
        const std::size_t R = 1 + t % 2;
        const std::size_t n = R + rng() % (9 - R);
        const auto s = random_system(rng, R, n, t % 3 == 0 ? 1 : 3);
        const auto res = psi_exact(s);
        CHECK(res.exact);
        CHECK(res.psi == oracle_psi(s));
        CHECK(res.certificate.size() == res.psi);
        CHECK(res.certificate.verify(s));
        CHECK(psi_greedy(s).psi <= res.psi);
    }
}

TEST_CASE("psi invariant under column permutation and column scaling") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> scale(-3, 3);
    for (int t = 0; t < 100; ++t) {
        const std::size_t R = 1 + t % 3;
        const std::size_t n = R + rng() % (10 - R);
        const auto s = random_system(rng, R, n, 2);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        IntMatrix m = s.matrix(), p(R, std::vector<std::int64_t>(n));
        for (std::size_t j = 0; j < n; ++j) {
            int k = 0;
            while (k == 0) k = scale(rng);
            for (std::size_t i = 0; i < R; ++i) p[i][j] = k * m[i][perm[j]];
        }
        CHECK(psi_exact(s).psi == psi_exact(DiagonalSystem(2, p, s.mu())).psi);
    }
}

TEST_CASE("certificate json is 0-based") {
    const auto res = psi_exact(DiagonalSystem(2, {{0, 5, 7}}, {0}));
    CHECK(res.psi == 2);
    CHECK(res.certificate.to_json() == "[[1],[2]]");
}

TEST_CASE("budget exhaustion falls back to a lower bound") {
    // 26 columns in the plane z = 0 and 4 outside it: Psi = 4, far below the
    // trivial bound 10, so the search cannot stop early
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coef(-4, 4);
    IntMatrix m(3);
    for (int j = 0; j < 30; ++j) {
        m[0].push_back(coef(rng) | 1);
        m[1].push_back(coef(rng));
        m[2].push_back(j < 4 ? 1 + j : 0);
    }
    const DiagonalSystem s(2, m, {0, 0, 0});
    const auto res = psi_exact(s, 10);
    CHECK_FALSE(res.exact);
    CHECK(res.certificate.verify(s));
    CHECK(res.psi <= 4);
}

TEST_CASE("hypothesis margin") {
    CHECK(hypothesis_margin(DiagonalSystem(2, {{1, 1, 1, -1, -1, -1}}, {0}), VariableMode::Integer) == 1);
    CHECK(hypothesis_margin(DiagonalSystem(3, {{1, 2, 3, 4, 5, 6}}, {0}), VariableMode::Integer) == -3);
    std::vector<std::int64_t> row(20);
    std::iota(row.begin(), row.end(), 1);
    // 20 - (19 + 1): the hypothesis Psi >= T + 1 holds with nothing to spare
    CHECK(hypothesis_margin(DiagonalSystem(5, {row}, {0}), VariableMode::Smooth) == 0);
    CHECK_THROWS_AS(hypothesis_margin(std::size_t{20}, 3, VariableMode::Smooth), InputError);
}
