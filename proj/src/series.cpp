#include "circle/series.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "circle/errors.hpp"
#include "circle/expsums.hpp"

namespace circle {

Complex a_of_q(const DiagonalSystem& system, std::int64_t q) {
    if (q < 1) throw InputError("a_of_q needs q >= 1");
    const std::size_t R = system.rows(), n = system.cols();
    const double cost = std::pow(static_cast<double>(q), static_cast<double>(R)) * static_cast<double>(n);
    if (cost > kAqBudget) throw BudgetExceeded("A(q): q^R n = " + std::to_string(cost) + " exceeds budget");
    if (q == 1) return {1.0, 0.0};

    const CompleteSumTable table(q, system.degree());
    const double inv_q = 1.0 / static_cast<double>(q);
    std::vector<Complex> normalized(table.values().size());
    for (std::size_t t = 0; t < normalized.size(); ++t) normalized[t] = table.values()[t] * inv_q;

    // column coefficients reduced mod q, column-major
    std::vector<std::int64_t> cols(R * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < R; ++i) cols[j * R + i] = mod_floor(system.coeff(i, j), q);
    std::vector<std::int64_t> mu(R);
    for (std::size_t i = 0; i < R; ++i) mu[i] = mod_floor(system.mu()[i], q);

    std::vector<std::int64_t> a(R, 0);  // residues 0..q-1 stand for 1..q
    CompensatedSum total;
    for (;;) {
        if (vector_gcd(q, a) == 1) {
            Complex prod(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                int128 dot = 0;
                for (std::size_t i = 0; i < R; ++i) dot += static_cast<int128>(a[i]) * cols[j * R + i];
                prod *= normalized[static_cast<std::size_t>(mod_floor(dot, q))];
            }
            int128 mu_dot = 0;
            for (std::size_t i = 0; i < R; ++i) mu_dot += static_cast<int128>(mu[i]) * a[i];
            const auto phase = mod_floor(-mu_dot, q);
            total.add(prod * unit_phase(static_cast<double>(phase) * inv_q));
        }
        std::size_t i = 0;
        while (i < R && ++a[i] == q) a[i++] = 0;
        if (i == R) break;
    }
    return total.value();
}

ChiValue chi_p(const DiagonalSystem& system, std::int64_t p, int k_cap, double tol) {
    if (p < 2) throw InputError("chi_p needs a prime p");
    for (std::int64_t f = 2; f * f <= p; ++f)
        if (p % f == 0) throw InputError("chi_p: " + std::to_string(p) + " is not prime");
    ChiValue out;
    int small_run = 0;
    std::int64_t pk = 1;
    for (int k = 1; k <= k_cap; ++k) {
        if (pk > INT64_MAX / p) break;
        pk *= p;
        double term;
        try {
            term = a_of_q(system, pk).real();
        } catch (const BudgetExceeded&) {
            break;
        }
        out.terms.push_back(term);
        out.value += term;
        out.k_used = k;
        small_run = std::fabs(term) < tol ? small_run + 1 : 0;
        if (small_run >= 2) {
            out.stabilized = true;
            break;
        }
    }
    return out;
}

namespace {

double decay_exponent(const DiagonalSystem& system, std::size_t psi) {
    return static_cast<double>(system.rows()) *
           (static_cast<double>(psi) / static_cast<double>(system.degree()) - 1.0);
}

}  // namespace

TruncatedConstant singular_series_truncated(const DiagonalSystem& system, double B, std::size_t psi,
                                            unsigned workers) {
    if (!(B >= 1)) throw InputError("singular series needs B >= 1");
    const auto q_max = static_cast<std::int64_t>(std::floor(B + 1e-9));
    std::vector<Complex> values(static_cast<std::size_t>(q_max));
    parallel_for(values.size(), workers,
                 [&](std::size_t i) { values[i] = a_of_q(system, static_cast<std::int64_t>(i) + 1); });

    TruncatedConstant out;
    out.B = B;
    CompensatedSum sum;
    for (std::size_t i = 0; i < values.size(); ++i) {  // ascending q
        sum.add(values[i]);
        out.terms.push_back({static_cast<double>(i + 1), values[i].real()});
    }
    out.value = sum.value().real();
    out.imag = sum.value().imag();

    const double sigma = decay_exponent(system, psi);
    if (sigma > 1.0) {
        double c_fit = 0;
        const auto q_lo = std::max<std::int64_t>(1, q_max / 10);
        for (std::int64_t q = q_lo; q <= q_max; ++q)
            c_fit = std::max(c_fit, std::abs(values[static_cast<std::size_t>(q - 1)]) *
                                        std::pow(static_cast<double>(q), sigma));
        // sum_{q > B} C q^-sigma <= C B^(1-sigma) / (sigma - 1)
        out.tail_constant = c_fit / (sigma - 1.0);
        out.tail_estimate = out.tail_constant * std::pow(B, 1.0 - sigma);
    } else {
        out.note = "R(T/d - 1) <= 1: no convergent tail bound";
    }
    return out;
}

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    std::vector<std::int64_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(static_cast<std::size_t>(n) + 1, false);
    for (std::int64_t p = 2; p <= n; ++p) {
        if (comp[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (std::int64_t m = p * p; m <= n; m += p) comp[static_cast<std::size_t>(m)] = true;
    }
    return out;
}

TruncatedConstant euler_product(const DiagonalSystem& system, std::int64_t P, std::size_t psi) {
    TruncatedConstant out;
    out.B = static_cast<double>(P);
    double prod = 1;
    double c_fit = 0;
    bool all_stable = true;
    const double sigma = decay_exponent(system, psi);
    for (auto p : primes_up_to(P)) {
        const auto chi = chi_p(system, p);
        prod *= chi.value;
        all_stable = all_stable && chi.stabilized;
        out.terms.push_back({static_cast<double>(p), chi.value});
        if (p * 2 > P) c_fit = std::max(c_fit, std::fabs(chi.value - 1.0) * std::pow(static_cast<double>(p), sigma));
    }
    out.value = prod;
    if (sigma > 1.0) {
        // |log prod_{p>P} chi(p)| <~ sum_{p > P} C p^-sigma
        out.tail_constant = c_fit / (sigma - 1.0);
        out.tail_estimate = std::fabs(prod) * std::expm1(out.tail_constant * std::pow(static_cast<double>(P), 1.0 - sigma));
    }
    if (!all_stable) out.note = "some chi(p) did not stabilize within k <= 8";
    return out;
}

uint128 local_count(const DiagonalSystem& system, std::int64_t modulus) {
    if (modulus < 1) throw InputError("local_count needs modulus >= 1");
    const std::size_t R = system.rows(), n = system.cols();
    const double states = std::pow(static_cast<double>(modulus), static_cast<double>(R));
    if (states > 2e7) throw BudgetExceeded("local_count: modulus^R exceeds 2e7 residue states");
    const auto S = static_cast<std::size_t>(states + 0.5);
    const auto q = modulus;

    // residue classes of x^d mod q with multiplicities
    std::unordered_map<std::int64_t, std::uint64_t> power_counts;
    for (std::int64_t x = 0; x < q; ++x) ++power_counts[pow_mod(x, static_cast<unsigned>(system.degree()), q)];
    std::vector<std::pair<std::int64_t, std::uint64_t>> powers(power_counts.begin(), power_counts.end());
    std::sort(powers.begin(), powers.end());

    auto encode = [&](const std::vector<std::int64_t>& v) {
        std::size_t code = 0;
        for (std::size_t i = R; i-- > 0;) code = code * static_cast<std::size_t>(q) + static_cast<std::size_t>(v[i]);
        return code;
    };
    // distribution of sum_{j in cols} c_j x_j^d over (Z/q)^R
    auto half = [&](std::size_t begin, std::size_t end) {
        std::vector<uint128> dist(S, 0);
        dist[0] = 1;
        std::vector<std::int64_t> shift(R), v(R);
        for (std::size_t j = begin; j < end; ++j) {
            std::vector<uint128> next(S, 0);
            for (auto [r, mult] : powers) {
                for (std::size_t i = 0; i < R; ++i)
                    shift[i] = mod_floor(static_cast<int128>(system.coeff(i, j)) * r, q);
                const std::size_t offset = encode(shift);
                // add `shift` to every state: digit-wise addition mod q
                for (std::size_t s = 0; s < S; ++s) {
                    if (dist[s] == 0) continue;
                    std::size_t code = s, out = 0, place = 1;
                    std::size_t off = offset;
                    for (std::size_t i = 0; i < R; ++i) {
                        const std::size_t digit = (code % static_cast<std::size_t>(q) + off % static_cast<std::size_t>(q)) %
                                                  static_cast<std::size_t>(q);
                        out += digit * place;
                        place *= static_cast<std::size_t>(q);
                        code /= static_cast<std::size_t>(q);
                        off /= static_cast<std::size_t>(q);
                    }
                    next[out] += dist[s] * mult;
                }
            }
            dist.swap(next);
        }
        return dist;
    };
    const std::size_t split = (n + 1) / 2;
    const auto left = half(0, split);
    const auto right = half(split, n);

    std::vector<std::int64_t> mu(R), diff(R);
    for (std::size_t i = 0; i < R; ++i) mu[i] = mod_floor(system.mu()[i], q);
    uint128 total = 0;
    std::vector<std::int64_t> digits(R);
    for (std::size_t s = 0; s < S; ++s) {
        if (left[s] == 0) continue;
        std::size_t code = s;
        for (std::size_t i = 0; i < R; ++i) {
            digits[i] = static_cast<std::int64_t>(code % static_cast<std::size_t>(q));
            code /= static_cast<std::size_t>(q);
            diff[i] = mod_floor(static_cast<int128>(mu[i]) - digits[i], q);
        }
        total += left[s] * right[encode(diff)];
    }
    return total;
}

std::string series_report_json(const TruncatedConstant& series) {
    nlohmann::ordered_json doc;
    doc["B"] = series.B;
    doc["value"] = series.value;
    doc["tail_estimate"] = series.tail_estimate ? nlohmann::json(*series.tail_estimate) : nlohmann::json(nullptr);
    auto terms = nlohmann::json::array();
    for (const auto& t : series.terms) terms.push_back({{"q", t.key}, {"A_q", t.value}});
    doc["terms"] = std::move(terms);
    return doc.dump();
}

}  // namespace circle
