#pragma once

/**
 * Diagonal systems  sum_j m_ij x_j^d = mu_i  (1 <= i <= R)
 *
 * A DiagonalSystem holds the degree, the R x n integer coefficient matrix
 * (row-major) and the target vector. Instances are validated on
 * construction and immutable afterwards.
 *
 * File format (UTF-8 JSON):
 *   {"name": "optional", "d": 2, "mu": [0], "M": [[1, 1, -1, -1]]}
 */

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace circle {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

class DiagonalSystem {
public:
    /// Throws InputError unless d >= 2, 1 <= R <= n and every row has n entries.
    DiagonalSystem(int d, IntMatrix rows, std::vector<std::int64_t> mu, std::string name = {});

    int degree() const { return d_; }
    std::size_t rows() const { return R_; }
    std::size_t cols() const { return n_; }
    const std::string& name() const { return name_; }
    const std::vector<std::int64_t>& mu() const { return mu_; }

    std::int64_t coeff(std::size_t i, std::size_t j) const { return M_[i * n_ + j]; }
    std::vector<std::int64_t> column(std::size_t j) const;
    IntMatrix matrix() const;

    /// Copy with a different target vector (size must be R).
    DiagonalSystem with_mu(std::vector<std::int64_t> mu) const;

    /// Largest |m_ij|.
    std::int64_t max_abs_coeff() const;

    bool operator==(const DiagonalSystem&) const = default;

private:
    int d_;
    std::size_t R_, n_;
    std::vector<std::int64_t> M_;
    std::vector<std::int64_t> mu_;
    std::string name_;
};

DiagonalSystem parse_system(std::string_view text);
std::string serialize_system(const DiagonalSystem& system);
DiagonalSystem load_system(const std::filesystem::path& path);

struct ValidationReport {
    std::size_t rank = 0;
    std::vector<std::size_t> zero_columns;  // 0-based
    std::vector<std::string> warnings;
};

ValidationReport validate(const DiagonalSystem& system);

/// Level parameters for the arc decomposition. The level is X^delta for
/// integer variables and (log X)^big_a for X^eta-smooth variables.
struct ArcConfig {
    double delta = 0.1;
    double big_a = 0.1;
    double eta = 1.0 / 3.0;

    /// Throws InputError on delta <= 0, big_a <= 0, eta outside (0,1).
    /// With smooth = true also requires big_a < 1/(2R+4).
    void check(std::size_t R, bool smooth) const;
    double level(double X, bool smooth) const;
};

}  // namespace circle
