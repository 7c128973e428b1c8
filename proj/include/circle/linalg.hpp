#pragma once

/**
 * Exact integer linear algebra and the partition invariant Psi(M).
 *
 * Psi(M) is the largest k for which there are k pairwise disjoint sets of
 * R columns of M, each linearly independent. All determinant and rank
 * computations use fraction-free (Bareiss) elimination over arbitrary
 * precision integers.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "circle/system.hpp"
#include "circle/thresholds.hpp"

namespace circle {

/// Rank over the rationals. Zero for an empty matrix.
std::size_t exact_rank(const IntMatrix& a);

/// Sign of the determinant of a square matrix (-1, 0, 1).
int determinant_sign(const IntMatrix& a);

/// Exact determinant rendered as a decimal string.
std::string determinant_string(const IntMatrix& a);

/// True iff the R x R submatrix on `cols` is invertible.
/// Throws InputError on |cols| != R, an out-of-range or a repeated index.
bool is_basis(const DiagonalSystem& system, const std::vector<std::size_t>& cols);

struct BasisFamily {
    std::vector<std::vector<std::size_t>> families;  // each sorted ascending

    std::size_t size() const { return families.size(); }
    /// Pairwise disjointness plus is_basis on every member.
    bool verify(const DiagonalSystem& system) const;
    /// JSON array of arrays of 0-based column indices.
    std::string to_json() const;
};

struct PsiResult {
    std::size_t psi = 0;
    BasisFamily certificate;
    bool exact = true;           // false when the search budget ran out
    std::uint64_t expansions = 0;
};

inline constexpr std::uint64_t kDefaultPsiBudget = 10'000'000;

/// Repeatedly removes the lexicographically first basis of the remaining
/// columns. A lower bound for Psi(M).
PsiResult psi_greedy(const DiagonalSystem& system);

/// Exact Psi(M) by memoised depth-first search over disjoint basis families.
/// On budget exhaustion returns the best lower bound with exact = false.
/// Supports up to 64 nonzero columns.
PsiResult psi_exact(const DiagonalSystem& system, std::uint64_t budget = kDefaultPsiBudget);

/// Psi(M) - (T_mode(d) + 1); nonnegative iff the main-theorem hypothesis holds.
/// Throws InputError for smooth mode with d < 5.
long hypothesis_margin(const DiagonalSystem& system, VariableMode mode,
                       std::uint64_t budget = kDefaultPsiBudget);

/// Same as above for a known Psi value.
long hypothesis_margin(std::size_t psi, int d, VariableMode mode);

}  // namespace circle
