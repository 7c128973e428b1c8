#include "circle/counting.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <sstream>

#include "circle/errors.hpp"
#include "circle/smooth.hpp"

namespace circle {

namespace {

std::vector<std::int64_t> variable_values(std::int64_t X, std::optional<double> Z) {
    if (!Z || *Z >= static_cast<double>(X)) {
        std::vector<std::int64_t> v(static_cast<std::size_t>(X));
        std::iota(v.begin(), v.end(), std::int64_t{1});
        return v;
    }
    return smooth_sieve(X, *Z).members;
}

template <class T, std::size_t R>
class Counter {
public:
    using Key = std::array<T, R>;

    Counter(const DiagonalSystem& sys, const std::vector<std::int64_t>& values, unsigned workers)
        : n_(sys.cols()), h_((sys.cols() + 1) / 2), workers_(workers) {
        const auto d = static_cast<unsigned>(sys.degree());
        for (auto v : values) pw_.push_back(static_cast<T>(ipow128(static_cast<std::uint64_t>(v), d)));
        coeff_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = 0; i < R; ++i) coeff_[j][i] = static_cast<T>(sys.coeff(i, j));
        for (std::size_t i = 0; i < R; ++i) mu_[i] = static_cast<T>(sys.mu()[i]);
    }

    uint128 naive(std::size_t limit) const {
        uint128 total = 0;
        Key acc{};
        walk(0, n_, limit, acc, 0, [&](const Key& k, std::size_t) {
            if (k == mu_) ++total;
        });
        return total;
    }

    // First-half table over the first `limit` values, sorted by key.
    struct Entry {
        Key key;
        std::uint32_t max_index;
    };

    std::vector<Entry> build(std::size_t limit) const {
        std::vector<Entry> entries;
        entries.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(limit), static_cast<double>(h_))));
        Key acc{};
        walk(0, h_, limit, acc, 0, [&](const Key& k, std::size_t mx) {
            entries.push_back({k, static_cast<std::uint32_t>(mx)});
        });
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
        return entries;
    }

    uint128 probe(const std::vector<Entry>& entries, std::size_t limit) const {
        std::vector<std::pair<Key, std::uint64_t>> table;
        for (const auto& e : entries) {
            if (e.max_index >= limit) continue;
            if (!table.empty() && table.back().first == e.key)
                ++table.back().second;
            else
                table.push_back({e.key, 1});
        }
        auto lookup = [&](const Key& target) -> std::uint64_t {
            auto it = std::lower_bound(table.begin(), table.end(), target,
                                       [](const auto& a, const Key& k) { return a.first < k; });
            return (it != table.end() && it->first == target) ? it->second : 0;
        };
        if (h_ == n_) return lookup(mu_);
        // second half: key needed is mu - partial
        std::vector<uint128> slots(limit, 0);
        parallel_for(limit, workers_, [&](std::size_t first) {
            Key acc = mu_;
            for (std::size_t i = 0; i < R; ++i) acc[i] -= coeff_[h_][i] * pw_[first];
            uint128 local = 0;
            walk(h_ + 1, n_, limit, acc, 0, [&](const Key& k, std::size_t) { local += lookup(k); }, -1);
            slots[first] = local;
        });
        uint128 total = 0;
        for (auto s : slots) total += s;
        return total;
    }

    std::size_t half() const { return h_; }

private:
    // Enumerates columns [j, end) over the first `limit` values, adding
    // sign * coeff * power to acc, and calls f(acc, max value index).
    template <class F>
    void walk(std::size_t j, std::size_t end, std::size_t limit, Key acc, std::size_t mx, F&& f, int sign = 1) const {
        if (j == end) {
            f(acc, mx);
            return;
        }
        for (std::size_t k = 0; k < limit; ++k) {
            Key next = acc;
            for (std::size_t i = 0; i < R; ++i) {
                if (sign > 0)
                    next[i] += coeff_[j][i] * pw_[k];
                else
                    next[i] -= coeff_[j][i] * pw_[k];
            }
            walk(j + 1, end, limit, next, std::max(mx, k), f, sign);
        }
    }

    std::size_t n_, h_;
    unsigned workers_;
    std::vector<T> pw_;
    std::vector<std::array<T, R>> coeff_;
    Key mu_{};
};

struct SweepJob {
    const DiagonalSystem& sys;
    std::vector<std::int64_t> X_sorted;
    std::optional<double> Z;
    CountMethod method;
    std::size_t budget;
    unsigned workers;
};

template <class T, std::size_t R>
std::vector<SweepRow> run_sweep(const SweepJob& job) {
    using clock = std::chrono::steady_clock;
    const std::int64_t x_max = job.X_sorted.back();
    const auto values = variable_values(x_max, job.Z);
    Counter<T, R> counter(job.sys, values, job.workers);
    const auto n = static_cast<double>(job.sys.cols());

    auto limit_for = [&](std::int64_t X) {
        return static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), X) - values.begin());
    };

    std::vector<SweepRow> rows;
    if (job.method == CountMethod::Naive) {
        for (auto X : job.X_sorted) {
            const auto limit = limit_for(X);
            if (std::pow(static_cast<double>(limit), n) > kNaiveBudget)
                throw BudgetExceeded("naive count needs at most 1e9 tuples, X = " + std::to_string(X));
            const auto t0 = clock::now();
            SweepRow row{X, counter.naive(limit), "naive", 0, 0};
            row.seconds = std::chrono::duration<double>(clock::now() - t0).count();
            rows.push_back(row);
        }
        return rows;
    }

    using Entry = typename Counter<T, R>::Entry;
    const double full_limit = static_cast<double>(limit_for(x_max));
    const double entries = std::pow(full_limit, static_cast<double>(counter.half()));
    // sorted entries plus the compressed copy
    const double bytes = entries * static_cast<double>(sizeof(Entry) + sizeof(std::pair<std::array<T, R>, std::uint64_t>));
    if (bytes > static_cast<double>(job.budget))
        throw BudgetExceeded("meet-in-the-middle table needs " + std::to_string(static_cast<long long>(bytes)) +
                             " bytes, budget " + std::to_string(job.budget));
    const auto t_build = clock::now();
    const auto table = counter.build(limit_for(x_max));
    const double build_seconds = std::chrono::duration<double>(clock::now() - t_build).count();
    for (auto X : job.X_sorted) {
        const auto t0 = clock::now();
        SweepRow row{X, counter.probe(table, limit_for(X)), "mitm", 0, static_cast<std::size_t>(bytes)};
        row.seconds = std::chrono::duration<double>(clock::now() - t0).count() + (rows.empty() ? build_seconds : 0.0);
        rows.push_back(row);
    }
    return rows;
}

template <class T>
std::vector<SweepRow> dispatch_rows(const SweepJob& job) {
    switch (job.sys.rows()) {
        case 1: return run_sweep<T, 1>(job);
        case 2: return run_sweep<T, 2>(job);
        case 3: return run_sweep<T, 3>(job);
        case 4: return run_sweep<T, 4>(job);
        default: throw InputError("exact counting supports R <= 4");
    }
}

std::vector<SweepRow> dispatch(const SweepJob& job) {
    // |partial sums| <= X^d max|m| n, and the probe key adds |mu|
    const double x_max = static_cast<double>(job.X_sorted.back());
    std::int64_t mu_max = 0;
    for (auto m : job.sys.mu()) mu_max = std::max(mu_max, m < 0 ? -m : m);
    const double bits = job.sys.degree() * std::log2(x_max) +
                        std::log2(static_cast<double>(job.sys.max_abs_coeff()) * static_cast<double>(job.sys.cols())) ;
    const double total_bits = std::log2(std::exp2(bits) + static_cast<double>(mu_max));
    if (total_bits < 62.0) return dispatch_rows<std::int64_t>(job);
    if (total_bits < 126.0) return dispatch_rows<int128>(job);
    throw InputError("partial sums exceed 128 bits; reduce X");
}

}  // namespace

const char* method_name(CountMethod method) { return method == CountMethod::Naive ? "naive" : "mitm"; }

CountMethod parse_method(const std::string& name) {
    if (name == "naive") return CountMethod::Naive;
    if (name == "mitm" || name == "meet_in_middle") return CountMethod::MeetInMiddle;
    throw InputError("unknown count method '" + name + "'");
}

uint128 count_exact(const CountRequest& req) {
    if (req.X < 1) throw InputError("count needs X >= 1");
    if (req.Z && (*req.Z < 1 || *req.Z > static_cast<double>(req.X)))
        throw InputError("smooth count needs 1 <= Z <= X");
    SweepJob job{req.system, {req.X}, req.Z, req.method, req.memory_budget, req.workers};
    return dispatch(job).front().N;
}

std::vector<SweepRow> count_sweep(const DiagonalSystem& system, std::vector<std::int64_t> X_list,
                                  std::optional<double> Z, CountMethod method, std::size_t memory_budget,
                                  unsigned workers) {
    if (X_list.empty()) return {};
    for (auto X : X_list)
        if (X < 1) throw InputError("count needs X >= 1");
    if (Z && *Z < 1) throw InputError("smooth count needs Z >= 1");
    std::sort(X_list.begin(), X_list.end());
    X_list.erase(std::unique(X_list.begin(), X_list.end()), X_list.end());
    SweepJob job{system, X_list, Z, method, memory_budget, workers};
    return dispatch(job);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "X,N,method,seconds,memory_bytes\n";
    for (const auto& r : rows)
        out << r.X << ',' << to_string(r.N) << ',' << r.method << ',' << r.seconds << ',' << r.memory_bytes << '\n';
    return out.str();
}

}  // namespace circle
