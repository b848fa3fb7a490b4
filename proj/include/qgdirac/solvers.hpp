#pragma once

#include "qgdirac/field.hpp"
#include "qgdirac/nonlinearity.hpp"
#include "qgdirac/operators.hpp"
#include "qgdirac/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qgdirac {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double damping_floor = 0x1p-20;
    double armijo = 1e-4;
};

enum class SolveStatus {
    converged,
    not_converged,          ///< iteration cap or damping floor reached
    singular_jacobian,
    trivial_solution,       ///< converged to (numerically) zero
    boundary_contaminated,  ///< converged, but the truncation is too short
};

const char* to_string(SolveStatus status);

struct SolveReport {
    SolveStatus status = SolveStatus::not_converged;
    bool converged = false;  ///< residual <= tol (also true for trivial/contaminated)
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;  ///< entry 0 is the initial residual
    std::vector<double> damping_history;   ///< accepted step length per iteration
    double boundary_magnitude = 0.0;       ///< |psi| next to the truncation nodes, relative to ||psi||_inf
    double newton_kappa = 0.0;             ///< max r_{k+1} / r_k^2 over the last three steps
    std::string message;

    bool ok() const noexcept { return status == SolveStatus::converged; }
};

/// -Delta u - nu u = 2m g(|u|) u with Kirchhoff vertex conditions.
struct NlsProblem {
    MeshPtr mesh;
    ModelPtr model;
    double m = 0.2;
    double nu = -1.0;

    void validate() const;
};

/// D psi - omega psi = g(|psi|) psi with Kirchhoff-type vertex conditions.
struct NldeProblem {
    MeshPtr mesh;
    ModelPtr model;
    double m = 0.2;
    double c = 1.0;
    double omega = 0.0;

    void validate() const;
    /// 0 < omega < m c^2.
    bool in_limit_regime() const { return omega > 0.0 && omega < m * c * c; }
};

/// Quadrature of G(|psi|) that is exactly variational on the staggered grid:
/// P = sum_n (W_n/2) G(rho_n) over integer nodes and half-nodes, where rho_n
/// interpolates the other component in mean square. Its gradient is the
/// nonlinear term of the discrete system.
class PotentialQuadrature {
public:
    explicit PotentialQuadrature(const SpinorLayout& layout);

    /// Sum of (W_n/2) G(rho_n).
    template <typename Vector>
    double value(const NonlinearityModel& model, const Vector& x) const;
    /// Sum of (W_n/2) Ghat(rho_n).
    template <typename Vector>
    double value_hat(const NonlinearityModel& model, const Vector& x) const;
    /// dP/dx; for complex x the Wirtinger-style gradient g(rho) a x.
    template <typename Vector>
    Vector gradient(const NonlinearityModel& model, const Vector& x) const;
    SparseMatrix<double> hessian(const NonlinearityModel& model, const Eigen::VectorXd& x) const;

private:
    struct Term {
        Index slot;
        double coeff;
    };
    struct Point {
        double weight;  // W_n / 2
        std::vector<Term> terms;
    };

    template <typename Vector>
    double rho(const Point& pt, const Vector& x) const;

    std::vector<Point> points_;
    Index size_ = 0;
};

// ---------------------------------------------------------------------------
// NLS

/// A sech^{2/(p-2)}(B d(x, x0)) bump around the vertex of maximal degree with
/// B = (p-2) sqrt|nu| / 2 and A^{p-2} = |nu| p / (4m); the exact line
/// soliton for a power law.
GraphFunction<double> default_nls_guess(const NlsProblem& prob);

/// Weak residual K u - nu W u - 2m W g(|u|) u on the free nodes.
Eigen::VectorXd nls_weak_residual(const GraphFunction<double>& u, const NlsProblem& prob);
/// Discrete L2 norm of the strong defect.
double nls_residual(const GraphFunction<double>& u, const NlsProblem& prob);
/// 1/2 int |u'|^2 - nu/2 int u^2 - 2m int G(|u|).
double action_j(const GraphFunction<double>& u, const NlsProblem& prob);

std::pair<GraphFunction<double>, SolveReport> solve_nls(const NlsProblem& prob,
                                                        const std::optional<GraphFunction<double>>& guess,
                                                        const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// NLDE (real reduction u real, v = i w)

/// w = -c u' / (m c^2 + omega + g(|u|)) at the half-nodes.
SpinorFunction<double> lift_guess(const GraphFunction<double>& u, const NldeProblem& prob);

/// Weak residual K psi - omega M psi - dP in the complex (u, v) layout.
Eigen::VectorXcd nlde_weak_residual(const SpinorFunction<Complex>& psi, const NldeProblem& prob,
                                    const DiscreteDirac& dirac);
/// Discrete L2 norm of the strong defect (weak residual over the masses).
double nlde_residual(const SpinorFunction<Complex>& psi, const NldeProblem& prob);
double nlde_residual(const SpinorFunction<double>& psi, const NldeProblem& prob);

/// Pairing Re <dPhi(psi), phi> of the weak residual with a direction.
double nlde_pairing(const SpinorFunction<Complex>& psi, const SpinorFunction<Complex>& phi, const NldeProblem& prob);

/// 1/2 <psi, D psi> - omega/2 ||psi||^2 - int G(|psi|).
double action_phi(const SpinorFunction<Complex>& psi, const NldeProblem& prob);
double action_phi(const SpinorFunction<double>& psi, const NldeProblem& prob);
/// int Ghat(|psi|) under the same quadrature as action_phi.
double potential_hat_integral(const SpinorFunction<double>& psi, const NldeProblem& prob);

std::pair<SpinorFunction<double>, SolveReport> solve_nlde(const NldeProblem& prob,
                                                          const SpinorFunction<double>& guess,
                                                          const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// Continuation along a limit schedule

struct MeshConfig {
    double step = 0.01;
    double nls_truncation = 30.0;  ///< half-line length for the NLS target
    double decay_lengths = 20.0;   ///< L_n = decay_lengths / decay rate, rounded up to the step
    int max_doublings = 2;         ///< retries with doubled L_n on boundary contamination
};

struct ContinuationStep {
    std::size_t index = 0;
    ScheduleEntry entry;
    MeshPtr mesh;
    SpinorFunction<double> psi;
    SolveReport report;
};

struct ContinuationResult {
    MeshPtr nls_mesh;
    GraphFunction<double> nls;
    SolveReport nls_report;
    std::vector<ContinuationStep> steps;  ///< converged steps only
    bool complete = false;
    std::string failure;  ///< reason and schedule index when incomplete
};

/// sqrt(m^2 c^4 - omega^2) / c.
double nlde_decay_rate(double m, double c, double omega);

/// Truncation length for one step (see MeshConfig::decay_lengths).
double truncation_for(const MeshConfig& cfg, double rate);

/// Solves the NLS target once (or takes `nls`), lifts it to seed the first
/// step and seeds every later step with the previous spinor. Stops at the
/// first failed step and keeps the earlier ones.
ContinuationResult continuation_solve(const LimitSchedule& schedule, const MetricGraph& graph, ModelPtr model,
                                      const MeshConfig& cfg, const SolverOptions& options = {},
                                      const std::optional<std::pair<MeshPtr, GraphFunction<double>>>& nls = {});

}  // namespace qgdirac
