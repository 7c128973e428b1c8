#include "circle/linalg.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "circle/errors.hpp"
#include "circle/numeric.hpp"

namespace circle {

using boost::multiprecision::cpp_int;

namespace {

using BigMatrix = std::vector<std::vector<cpp_int>>;

BigMatrix to_big(const IntMatrix& a) {
    BigMatrix m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i].assign(a[i].begin(), a[i].end());
    return m;
}

// Fraction-free row echelon form in place. Returns the rank; on square
// input `det` receives the determinant (zero when singular).
std::size_t bareiss(BigMatrix& m, cpp_int* det) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    cpp_int prev = 1;
    int sign = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        if (p != r) {
            std::swap(m[p], m[r]);
            sign = -sign;
        }
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            m[i][c] = 0;
        }
        prev = m[r][c];
        ++r;
    }
    if (det) *det = (r == rows && rows == cols) ? cpp_int(sign * prev) : cpp_int(0);
    return r;
}

bool submatrix_invertible(const DiagonalSystem& s, const std::vector<std::size_t>& cols) {
    const std::size_t R = s.rows();
    if (R == 1) return s.coeff(0, cols[0]) != 0;
    if (R == 2) {
        const int128 det = static_cast<int128>(s.coeff(0, cols[0])) * s.coeff(1, cols[1]) -
                           static_cast<int128>(s.coeff(0, cols[1])) * s.coeff(1, cols[0]);
        return det != 0;
    }
    BigMatrix m(R, std::vector<cpp_int>(R));
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t k = 0; k < R; ++k) m[i][k] = s.coeff(i, cols[k]);
    return bareiss(m, nullptr) == R;
}

std::vector<std::size_t> nonzero_columns(const DiagonalSystem& s) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < s.cols(); ++j) {
        bool zero = true;
        for (std::size_t i = 0; i < s.rows(); ++i) zero = zero && s.coeff(i, j) == 0;
        if (!zero) out.push_back(j);
    }
    return out;
}

struct BudgetSignal {};

class PsiSearch {
public:
    PsiSearch(const DiagonalSystem& s, std::uint64_t budget)
        : sys_(s), cols_(nonzero_columns(s)), R_(s.rows()), budget_(budget) {
        if (cols_.size() > 64) throw InputError("psi_exact supports at most 64 nonzero columns");
    }

    std::uint64_t full_mask() const {
        return cols_.size() == 64 ? ~0ULL : ((1ULL << cols_.size()) - 1);
    }

    std::size_t solve(std::uint64_t avail) {
        const auto count = static_cast<std::size_t>(std::popcount(avail));
        if (count < R_) return 0;
        if (auto it = memo_.find(avail); it != memo_.end()) return it->second.best;
        if (++expansions_ > budget_) throw BudgetSignal{};

        const std::size_t upper = count / R_;
        const int low = std::countr_zero(avail);
        const std::uint64_t rest = avail & ~(1ULL << low);

        std::size_t best = 0;
        std::uint64_t choice = 0;

        // Bases whose smallest member is `low`.
        std::vector<int> above;
        for (std::uint64_t m = rest; m; m &= m - 1) above.push_back(std::countr_zero(m));
        const std::size_t k = R_ - 1;
        if (above.size() >= k) {
            std::vector<std::size_t> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            while (best < upper) {
                std::uint64_t b = 1ULL << low;
                for (auto i : idx) b |= 1ULL << above[i];
                if (independent(b)) {
                    const std::size_t v = 1 + solve(avail & ~b);
                    if (v > best) {
                        best = v;
                        choice = b;
                    }
                }
                // next combination
                std::size_t i = k;
                while (i > 0 && idx[i - 1] == above.size() - k + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
        // `low` unused by every basis.
        if (best < upper) {
            const std::size_t v = solve(rest);
            if (v > best) {
                best = v;
                choice = 0;
            }
        }
        memo_.emplace(avail, Entry{best, choice});
        return best;
    }

    BasisFamily certificate(std::uint64_t avail) const {
        BasisFamily fam;
        while (std::popcount(avail) >= static_cast<int>(R_)) {
            auto it = memo_.find(avail);
            if (it == memo_.end() || it->second.best == 0) break;
            const int low = std::countr_zero(avail);
            if (it->second.choice == 0) {
                avail &= ~(1ULL << low);
                continue;
            }
            std::vector<std::size_t> set;
            for (std::uint64_t m = it->second.choice; m; m &= m - 1)
                set.push_back(cols_[static_cast<std::size_t>(std::countr_zero(m))]);
            fam.families.push_back(std::move(set));
            avail &= ~it->second.choice;
        }
        return fam;
    }

    std::uint64_t expansions() const { return expansions_; }

private:
    bool independent(std::uint64_t b) {
        if (auto it = basis_cache_.find(b); it != basis_cache_.end()) return it->second;
        std::vector<std::size_t> set;
        for (std::uint64_t m = b; m; m &= m - 1)
            set.push_back(cols_[static_cast<std::size_t>(std::countr_zero(m))]);
        const bool ok = submatrix_invertible(sys_, set);
        basis_cache_.emplace(b, ok);
        return ok;
    }

    struct Entry {
        std::size_t best;
        std::uint64_t choice;
    };

    const DiagonalSystem& sys_;
    std::vector<std::size_t> cols_;
    std::size_t R_;
    std::uint64_t budget_;
    std::uint64_t expansions_ = 0;
    std::unordered_map<std::uint64_t, Entry> memo_;
    std::unordered_map<std::uint64_t, bool> basis_cache_;
};

}  // namespace

std::size_t exact_rank(const IntMatrix& a) {
    if (a.empty() || a[0].empty()) return 0;
    auto m = to_big(a);
    return bareiss(m, nullptr);
}

int determinant_sign(const IntMatrix& a) {
    if (a.empty() || a.size() != a[0].size()) throw InputError("determinant of a non-square matrix");
    auto m = to_big(a);
    cpp_int det;
    bareiss(m, &det);
    return det.sign();
}

std::string determinant_string(const IntMatrix& a) {
    if (a.empty() || a.size() != a[0].size()) throw InputError("determinant of a non-square matrix");
    auto m = to_big(a);
    cpp_int det;
    bareiss(m, &det);
    return det.str();
}

bool is_basis(const DiagonalSystem& system, const std::vector<std::size_t>& cols) {
    if (cols.size() != system.rows())
        throw InputError("basis candidate must have exactly R = " + std::to_string(system.rows()) +
                         " columns");
    for (auto c : cols)
        if (c >= system.cols()) throw InputError("column index " + std::to_string(c) + " out of range");
    auto sorted = cols;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InputError("basis candidate repeats a column");
    return submatrix_invertible(system, cols);
}

bool BasisFamily::verify(const DiagonalSystem& system) const {
    std::vector<bool> used(system.cols(), false);
    for (const auto& set : families) {
        if (set.size() != system.rows()) return false;
        for (auto c : set) {
            if (c >= system.cols() || used[c]) return false;
            used[c] = true;
        }
        if (!submatrix_invertible(system, set)) return false;
    }
    return true;
}

std::string BasisFamily::to_json() const { return nlohmann::json(families).dump(); }

PsiResult psi_greedy(const DiagonalSystem& system) {
    const std::size_t R = system.rows();
    std::vector<bool> used(system.cols(), false);
    for (std::size_t j = 0; j < system.cols(); ++j) {
        bool zero = true;
        for (std::size_t i = 0; i < R; ++i) zero = zero && system.coeff(i, j) == 0;
        used[j] = zero;
    }
    PsiResult out;
    for (;;) {
        // Matroid greedy: scanning in index order yields the lexicographically first basis.
        std::vector<std::size_t> basis;
        IntMatrix cur(R);
        for (std::size_t j = 0; j < system.cols() && basis.size() < R; ++j) {
            if (used[j]) continue;
            for (std::size_t i = 0; i < R; ++i) cur[i].push_back(system.coeff(i, j));
            if (exact_rank(cur) == basis.size() + 1) {
                basis.push_back(j);
            } else {
                for (auto& row : cur) row.pop_back();
            }
        }
        if (basis.size() < R) break;
        for (auto j : basis) used[j] = true;
        out.certificate.families.push_back(std::move(basis));
    }
    out.psi = out.certificate.size();
    return out;
}

PsiResult psi_exact(const DiagonalSystem& system, std::uint64_t budget) {
    PsiSearch search(system, budget);
    PsiResult out;
    try {
        out.psi = search.solve(search.full_mask());
        out.certificate = search.certificate(search.full_mask());
        out.expansions = search.expansions();
    } catch (const BudgetSignal&) {
        out = psi_greedy(system);
        out.exact = false;
        out.expansions = search.expansions();
    }
    return out;
}

long hypothesis_margin(std::size_t psi, int d, VariableMode mode) {
    const long threshold = mode == VariableMode::Integer ? t_int(d) : t_smo(d);
    return static_cast<long>(psi) - (threshold + 1);
}

long hypothesis_margin(const DiagonalSystem& system, VariableMode mode, std::uint64_t budget) {
    if (mode == VariableMode::Smooth && system.degree() < 5)
        throw InputError("smooth-case threshold needs d >= 5");
    return hypothesis_margin(psi_exact(system, budget).psi, system.degree(), mode);
}

}  // namespace circle
