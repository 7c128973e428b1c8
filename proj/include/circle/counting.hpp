#pragma once

/**
 * Exact solution counts
 *
 *   N(B; X) = #{x in (B cap [1, X])^n : M x^d = mu}
 *
 * for B = all positive integers or the Z-smooth ones.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circle/numeric.hpp"
#include "circle/system.hpp"

namespace circle {

enum class CountMethod { Naive, MeetInMiddle };

inline constexpr double kNaiveBudget = 1e9;
inline constexpr std::size_t kDefaultCountMemory = std::size_t{1536} << 20;

struct CountRequest {
    DiagonalSystem system;
    std::int64_t X = 1;
    std::optional<double> Z;  // smooth variables when set
    CountMethod method = CountMethod::MeetInMiddle;
    std::size_t memory_budget = kDefaultCountMemory;
    unsigned workers = 1;
};

/// Throws InputError on X < 1 or Z > X, BudgetExceeded when the naive
/// X^n <= 1e9 or the half-table memory budget is exceeded.
uint128 count_exact(const CountRequest& request);

struct SweepRow {
    std::int64_t X = 0;
    uint128 N = 0;
    std::string method;
    double seconds = 0;
    std::size_t memory_bytes = 0;
};

/// Counts for every X in X_list (any order; rows come back sorted by X).
/// With meet-in-the-middle the first-half table is built once at max X and
/// filtered for the smaller bounds. `Z` applies to every X.
std::vector<SweepRow> count_sweep(const DiagonalSystem& system, std::vector<std::int64_t> X_list,
                                  std::optional<double> Z = {}, CountMethod method = CountMethod::MeetInMiddle,
                                  std::size_t memory_budget = kDefaultCountMemory, unsigned workers = 1);

/// CSV with header X,N,method,seconds,memory_bytes.
std::string sweep_csv(const std::vector<SweepRow>& rows);

const char* method_name(CountMethod method);
CountMethod parse_method(const std::string& name);

}  // namespace circle
