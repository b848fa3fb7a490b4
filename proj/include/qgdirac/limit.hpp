#pragma once

#include "qgdirac/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qgdirac {

/// Measured diagnostics of one converged step of a limit sweep.
struct ExperimentRow {
    std::size_t n = 0;
    double c = 0.0;
    double omega = 0.0;
    double a = 0.0;
    double b = 0.0;
    double v_L2 = 0.0;  ///< ||v_n|| = ||w_n|| since v = i w
    double v_H1 = 0.0;
    double u_err_H1 = 0.0;  ///< ||u_n - u_NLS||_{H1} on the step's mesh
    double psi_Linf = 0.0;
    double psi_H1 = 0.0;
    double psi_L4 = 0.0;
    double u_H1 = 0.0;
    double decay_rate = 0.0;
    double decay_expected = 0.0;  ///< sqrt(m^2 c^4 - omega^2) / c
    double decay_r2 = 0.0;
    double residual = 0.0;
    double L = 0.0;
    int iterations = 0;
};

struct ExperimentTable {
    double m = 0.0;
    double nu = 0.0;
    std::vector<ExperimentRow> rows;  ///< ordered by c, converged steps only
    bool partial = false;
    std::string failure;
    double nls_residual = 0.0;
    double nls_decay_rate = 0.0;
};

struct SweepResult {
    ExperimentTable table;
    ContinuationResult continuation;
};

/// Runs continuation_solve and measures every converged step.
SweepResult run_limit_sweep(const LimitSchedule& schedule, const MetricGraph& graph, ModelPtr model,
                            const MeshConfig& cfg, const SolverOptions& options = {});

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares line through (x, y); needs at least two points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class RateColumn { v_H1, v_L2, u_err };

const char* to_string(RateColumn column);

/// Slope of log(column) against log(c). Throws std::invalid_argument for
/// fewer than three rows or nonpositive entries.
LineFit fit_rate(const ExperimentTable& table, RateColumn column);

struct DecayFit {
    double rate = 0.0;  ///< mean over half-lines
    double r2 = 0.0;    ///< mean over half-lines
    std::vector<double> rates;
};

/// Fits log|f| against the distance from the core on the outer
/// `tail_fraction` of every truncated half-line, leaving out the last 10% of
/// points before the truncation node and samples at the rounding floor.
DecayFit fit_decay(const GraphFunction<double>& f, double tail_fraction = 0.5);
DecayFit fit_decay(const SpinorFunction<double>& psi, double tail_fraction = 0.5);

/// No-growth check: a quantity passes when its last value is at most 1.05
/// times the maximum over the first two rows.
struct BoundsReport {
    double max_Linf = 0.0;
    double max_H1 = 0.0;
    double max_L4 = 0.0;
    bool pass_Linf = false;
    bool pass_H1 = false;
    bool pass_L4 = false;
    std::string criterion = "last row <= 1.05 * max(first two rows)";

    bool pass() const { return pass_Linf && pass_H1 && pass_L4; }
};

BoundsReport bounds_report(const ExperimentTable& table);

struct RateFitSummary {
    std::string quantity;
    LineFit fit;
    std::string expected;
    bool pass = false;
};

/// Slope fits of v_H1, v_L2 (expected -1, accepted in [-1.3, -0.7] with
/// r^2 >= 0.98) and u_err (expected negative).
std::vector<RateFitSummary> summarize_rates(const ExperimentTable& table);

struct GagliardoNirenberg {
    double q = 4.0;
    int samples = 0;
    double max_ratio = 0.0;
};

/// max over random mesh functions of ||f||_q / (||f||_2^{1/2+1/q} ||f'||_2^{1/2-1/q}).
/// Reported as a diagnostic only.
GagliardoNirenberg gagliardo_nirenberg_ratio(const MeshPtr& mesh, double q, int samples = 1000,
                                             unsigned seed = 7u);

}  // namespace qgdirac
