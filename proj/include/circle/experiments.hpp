#pragma once

/**
 * End-to-end experiments: predicted main term against exact counts, and
 * the empirical probes of the exponential-sum estimates.
 *
 *   predicted = c(eta)^n S(B) I(B) X^(n - dR),   c(eta) = rho(1/eta)
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "circle/counting.hpp"
#include "circle/expsums.hpp"
#include "circle/integral.hpp"
#include "circle/series.hpp"
#include "circle/system.hpp"
#include "circle/thresholds.hpp"

namespace circle {

struct PredictionOptions {
    VariableMode mode = VariableMode::Integer;
    double eta = 1.0 / 3.0;
    bool diagnostic = false;  // allows smooth mode for d < 5
    double B_series = 200;
    double B_integral = 40;
    unsigned workers = 1;
    IntegralOptions integral;
};

struct PredictionReport {
    std::string system_name;
    std::string system_json;
    std::int64_t X = 0;
    VariableMode mode = VariableMode::Integer;
    double eta = 1.0;
    std::size_t psi = 0;
    std::optional<long> threshold;  // absent for diagnostic smooth runs with d < 5
    bool hypothesis_ok = false;
    TruncatedConstant S_B;
    TruncatedConstant I_B;
    double c_eta_pow_n = 1;
    double predicted = 0;
    uint128 exact = 0;
    double rel_error = 0;
    std::vector<std::string> warnings;
};

PredictionReport run_prediction(const DiagonalSystem& system, std::int64_t X, const PredictionOptions& options = {});

/// One report per X; the series is computed once, the integral once unless mu != 0,
/// and the counts share one half-table.
std::vector<PredictionReport> run_prediction_sweep(const DiagonalSystem& system, std::vector<std::int64_t> X_list,
                                                   const PredictionOptions& options = {});

/// Deterministic JSON (no timings).
std::string report_json(const PredictionReport& report);
std::string reports_json(const std::vector<PredictionReport>& reports);
/// Header X,psi,threshold,hypothesis_ok,S_B,I_B,c_eta_pow_n,predicted,exact,rel_error.
std::string reports_csv(const std::vector<PredictionReport>& reports);

/// Writes <out_dir>/<run_id>/{report.json, sweep.csv}; returns the run directory.
std::filesystem::path persist_reports(const std::vector<PredictionReport>& reports,
                                      const std::filesystem::path& out_dir, const std::string& run_id);

/// mu_i = floor(kappa_i X^d).
DiagonalSystem scale_target(const DiagonalSystem& system, const std::vector<double>& kappa, std::int64_t X);

struct HuaResult {
    int d = 0;
    int s = 0;
    std::vector<std::int64_t> X_list;
    std::vector<uint128> counts;
    double slope = 0;
    bool above_threshold = false;  // s >= t_int(d)
    bool slope_ok = true;          // slope <= s - d + 0.2 when above_threshold
};

/// Least-squares slope of log #{sum_{i<=s/2} x_i^d = sum y_i^d} against log X.
HuaResult hua_probe(int d, int s, std::vector<std::int64_t> X_list, unsigned workers = 1);

struct WeylScanRow {
    double alpha = 0;
    Complex value;
    double abs_sum = 0;
    ArcLabel label;
    double bound = 0;        // Weyl (or smooth major-arc) bound shape, 0 if not applicable
    double bound_ratio = 0;  // abs_sum / bound
};

struct WeylScanOptions {
    int d = 2;
    double X = 1e4;
    std::optional<double> L;      // default (log X)^(2 d delta)
    std::size_t grid_size = 1000;
    std::optional<double> Z;      // smooth sum over A(X, Z) when set
    double delta = 1.0;
};

struct WeylScanResult {
    std::vector<WeylScanRow> rows;
    double L = 0;
    double threshold = 0;          // X (log X)^-delta
    double max_minor_ratio = 0;    // max |sum|/X over minor-labeled points
    bool assertion_ok = true;      // smooth case: every |f| > threshold is major
    std::size_t violations = 0;
};

/// Grid alpha = j / grid_size, 0 <= j < grid_size (grid_size <= 1e6).
WeylScanResult weyl_scan(const WeylScanOptions& options);

/// Same labelling over explicit alpha values.
WeylScanResult weyl_scan_points(const WeylScanOptions& options, const std::vector<double>& alphas);

/// CSV alpha,q,a,value_re,value_im,bound,ratio (q = a = empty on minor arcs).
std::string weyl_scan_csv(const WeylScanResult& result);

struct MajorResidualRow {
    std::int64_t q = 1;
    std::int64_t a = 0;
    double beta = 0;
    double residual_int = 0;         // |weyl - X q^-1 S I(X^d beta)|
    double normalized_int = 0;       // / (q (1 + X^d |beta|))
    double residual_smooth = 0;      // |f - q^-1 S w(beta)|
    double normalized_smooth = 0;    // / (q X (1 + X^d |beta|) / log X)
    double residual_smooth_rho = 0;  // |f - rho(1/eta) X q^-1 S I(X^d beta)|
};

struct MajorResidualResult {
    int d = 0;
    double X = 0;
    double eta = 0;
    std::vector<MajorResidualRow> rows;
    double C_int = 0;     // max normalized_int
    double C_smooth = 0;  // max normalized_smooth
};

/// Samples (q, a, beta) with q <= q_max, gcd(q, a) = 1 and |X^d beta| < q_max / q.
/// The samples depend only on (q_max, samples_per_q, seed), so runs at
/// different X use the same X^d beta and can be compared directly.
MajorResidualResult major_arc_residual_experiment(int d, double X, std::int64_t q_max,
                                                  std::size_t samples_per_q = 3, double eta = 1.0 / 3.0,
                                                  bool smooth = true, std::uint64_t seed = 7);

}  // namespace circle
