#pragma once

// Small numeric helpers shared by the kernels.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace circle {

using Complex = std::complex<double>;
using int128 = __int128;
using uint128 = unsigned __int128;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// e(z) = exp(2 pi i z). The argument is reduced mod 1 first.
inline Complex unit_phase(double z) {
    z -= std::floor(z);
    return {std::cos(kTwoPi * z), std::sin(kTwoPi * z)};
}

/// Neumaier-compensated accumulator for complex sums.
class CompensatedSum {
public:
    void add(Complex v) {
        add_part(re_, re_c_, v.real());
        add_part(im_, im_c_, v.imag());
    }
    Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add_part(double& sum, double& comp, double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double re_ = 0, im_ = 0, re_c_ = 0, im_c_ = 0;
};

inline std::int64_t mod_floor(int128 a, std::int64_t m) {
    int128 r = a % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

/// x^e mod m by repeated squaring; m >= 1.
inline std::int64_t pow_mod(std::int64_t x, unsigned e, std::int64_t m) {
    if (m == 1) return 0;
    uint128 base = static_cast<uint128>(mod_floor(x, m));
    uint128 acc = 1;
    while (e) {
        if (e & 1u) acc = acc * base % static_cast<uint128>(m);
        base = base * base % static_cast<uint128>(m);
        e >>= 1;
    }
    return static_cast<std::int64_t>(acc);
}

/// Exact x^e as a 128-bit integer; the caller guarantees no overflow.
inline uint128 ipow128(std::uint64_t x, unsigned e) {
    uint128 acc = 1, base = x;
    while (e) {
        if (e & 1u) acc *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return acc;
}

/// gcd(q, a_1, ..., a_R) with all entries taken as nonnegative.
inline std::int64_t vector_gcd(std::int64_t q, std::span<const std::int64_t> a) {
    std::int64_t g = q < 0 ? -q : q;
    for (auto v : a) g = std::gcd(g, v < 0 ? -v : v);
    return g;
}

std::string to_string(uint128 v);
std::string to_string(int128 v);

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled exactly once; callers write results to slot i only.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
}

}  // namespace circle
