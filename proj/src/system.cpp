#include "circle/system.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "circle/errors.hpp"
#include "circle/linalg.hpp"
#include "circle/numeric.hpp"

namespace circle {

DiagonalSystem::DiagonalSystem(int d, IntMatrix rows, std::vector<std::int64_t> mu, std::string name)
    : d_(d), R_(rows.size()), n_(rows.empty() ? 0 : rows.front().size()), mu_(std::move(mu)),
      name_(std::move(name)) {
    if (d_ < 2) throw InputError("degree d must be >= 2, got " + std::to_string(d_));
    if (R_ == 0) throw InputError("system must have at least one equation");
    for (std::size_t i = 0; i < R_; ++i) {
        if (rows[i].size() != n_)
            throw InputError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                             " entries, expected " + std::to_string(n_));
    }
    if (n_ < R_)
        throw InputError("need n >= R, got n=" + std::to_string(n_) + " R=" + std::to_string(R_));
    if (mu_.size() != R_)
        throw InputError("mu has " + std::to_string(mu_.size()) + " entries, expected " + std::to_string(R_));
    M_.reserve(R_ * n_);
    for (auto& row : rows) M_.insert(M_.end(), row.begin(), row.end());
}

std::vector<std::int64_t> DiagonalSystem::column(std::size_t j) const {
    std::vector<std::int64_t> c(R_);
    for (std::size_t i = 0; i < R_; ++i) c[i] = coeff(i, j);
    return c;
}

IntMatrix DiagonalSystem::matrix() const {
    IntMatrix out(R_, std::vector<std::int64_t>(n_));
    for (std::size_t i = 0; i < R_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out[i][j] = coeff(i, j);
    return out;
}

DiagonalSystem DiagonalSystem::with_mu(std::vector<std::int64_t> mu) const {
    return DiagonalSystem(d_, matrix(), std::move(mu), name_);
}

std::int64_t DiagonalSystem::max_abs_coeff() const {
    std::int64_t m = 0;
    for (auto v : M_) {
        if (v == INT64_MIN) throw InputError("coefficient -2^63 is not supported");
        m = std::max(m, v < 0 ? -v : v);
    }
    return m;
}

namespace {

std::int64_t as_int64(const nlohmann::json& v, const char* what) {
    if (!v.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
    return v.get<std::int64_t>();
}

}  // namespace

DiagonalSystem parse_system(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed system document: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("system document must be a JSON object");
    for (const char* key : {"d", "mu", "M"})
        if (!doc.contains(key)) throw InputError(std::string("missing key \"") + key + "\"");

    const auto d = as_int64(doc["d"], "d");
    if (d < 2 || d > 64) throw InputError("degree d must satisfy 2 <= d <= 64");

    if (!doc["M"].is_array()) throw InputError("\"M\" must be an array of rows");
    IntMatrix rows;
    for (const auto& row : doc["M"]) {
        if (!row.is_array()) throw InputError("each row of \"M\" must be an array");
        auto& r = rows.emplace_back();
        for (const auto& v : row) r.push_back(as_int64(v, "matrix entry"));
    }
    if (!doc["mu"].is_array()) throw InputError("\"mu\" must be an array");
    std::vector<std::int64_t> mu;
    for (const auto& v : doc["mu"]) mu.push_back(as_int64(v, "mu entry"));

    std::string name;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw InputError("\"name\" must be a string");
        name = doc["name"].get<std::string>();
    }
    return DiagonalSystem(static_cast<int>(d), std::move(rows), std::move(mu), std::move(name));
}

std::string serialize_system(const DiagonalSystem& system) {
    nlohmann::ordered_json doc;
    if (!system.name().empty()) doc["name"] = system.name();
    doc["d"] = system.degree();
    doc["mu"] = system.mu();
    doc["M"] = system.matrix();
    return doc.dump();
}

DiagonalSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open system file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_system(buf.str());
}

ValidationReport validate(const DiagonalSystem& system) {
    ValidationReport report;
    report.rank = exact_rank(system.matrix());
    for (std::size_t j = 0; j < system.cols(); ++j) {
        bool zero = true;
        for (std::size_t i = 0; i < system.rows(); ++i) zero = zero && system.coeff(i, j) == 0;
        if (zero) report.zero_columns.push_back(j);
    }
    if (report.rank < system.rows())
        report.warnings.push_back("rank(M) = " + std::to_string(report.rank) + " < R = " +
                                  std::to_string(system.rows()) + ": Psi(M) = 0, no asymptotic applies");
    if (!report.zero_columns.empty())
        report.warnings.push_back(std::to_string(report.zero_columns.size()) +
                                  " all-zero column(s) never enter a basis");
    return report;
}

void ArcConfig::check(std::size_t R, bool smooth) const {
    if (!(delta > 0)) throw InputError("ArcConfig: delta must be positive");
    if (!(big_a > 0)) throw InputError("ArcConfig: A must be positive");
    if (!(eta > 0 && eta < 1)) throw InputError("ArcConfig: eta must lie in (0, 1)");
    if (smooth && !(big_a < 1.0 / (2.0 * static_cast<double>(R) + 4.0)))
        throw InputError("ArcConfig: smooth major arcs need A < 1/(2R+4)");
}

double ArcConfig::level(double X, bool smooth) const {
    return smooth ? std::pow(std::log(X), big_a) : std::pow(X, delta);
}

std::string to_string(uint128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

std::string to_string(int128 v) {
    if (v < 0) return "-" + to_string(static_cast<uint128>(-v));
    return to_string(static_cast<uint128>(v));
}

}  // namespace circle
