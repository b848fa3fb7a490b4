#include "qgdirac/solvers.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace qgdirac {

const char* to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::not_converged: return "not_converged";
    case SolveStatus::singular_jacobian: return "singular_jacobian";
    case SolveStatus::trivial_solution: return "trivial_solution";
    case SolveStatus::boundary_contaminated: return "boundary_contaminated";
    }
    return "unknown";
}

void NlsProblem::validate() const
{
    if (!mesh) throw std::invalid_argument("NLS problem: no mesh");
    if (!model) throw std::invalid_argument("NLS problem: no nonlinearity");
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("NLS problem: mass must be positive");
    if (!(nu < 0.0) || !std::isfinite(nu)) throw std::invalid_argument("NLS problem: nu must be negative");
}

void NldeProblem::validate() const
{
    if (!mesh) throw std::invalid_argument("NLDE problem: no mesh");
    if (!model) throw std::invalid_argument("NLDE problem: no nonlinearity");
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("NLDE problem: mass must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("NLDE problem: speed of light must be positive");
    if (!(std::abs(omega) < m * c * c)) throw std::invalid_argument("NLDE problem: need -m c^2 < omega < m c^2");
}

// ---------------------------------------------------------------------------
// Potential quadrature

PotentialQuadrature::PotentialQuadrature(const SpinorLayout& layout) : size_(layout.size())
{
    const Mesh& mesh = *layout.mesh;
    points_.reserve(static_cast<std::size_t>(mesh.num_nodes + mesh.num_half_nodes));
    for (Index n = 0; n < mesh.num_nodes; ++n) {
        Point pt{0.5 * mesh.node_weight[n], {}};
        const Index free = mesh.free_index[static_cast<std::size_t>(n)];
        if (free >= 0) pt.terms.push_back({free, 1.0});
        for (const auto& nb : mesh.node_halves[static_cast<std::size_t>(n)])
            pt.terms.push_back({layout.half_slot(nb.half), nb.share / mesh.node_weight[n]});
        points_.push_back(std::move(pt));
    }
    for (Index k = 0; k < mesh.num_half_nodes; ++k) {
        Point pt{0.5 * mesh.half_weight[k], {{layout.half_slot(k), 1.0}}};
        for (Index node : mesh.half_nodes[static_cast<std::size_t>(k)]) {
            const Index free = mesh.free_index[static_cast<std::size_t>(node)];
            if (free >= 0) pt.terms.push_back({free, 0.5});
        }
        points_.push_back(std::move(pt));
    }
}

template <typename Vector>
double PotentialQuadrature::rho(const Point& pt, const Vector& x) const
{
    double r2 = 0.0;
    for (const auto& t : pt.terms) r2 += t.coeff * std::norm(x[t.slot]);
    return std::sqrt(r2);
}

template <typename Vector>
double PotentialQuadrature::value(const NonlinearityModel& model, const Vector& x) const
{
    double sum = 0.0;
    for (const auto& pt : points_) sum += pt.weight * model.primitive(rho(pt, x));
    return sum;
}

template <typename Vector>
double PotentialQuadrature::value_hat(const NonlinearityModel& model, const Vector& x) const
{
    double sum = 0.0;
    for (const auto& pt : points_) sum += pt.weight * model.g_hat(rho(pt, x));
    return sum;
}

template <typename Vector>
Vector PotentialQuadrature::gradient(const NonlinearityModel& model, const Vector& x) const
{
    if (x.size() != size_) throw std::invalid_argument("PotentialQuadrature: size mismatch");
    Vector grad = Vector::Zero(size_);
    for (const auto& pt : points_) {
        const double wg = pt.weight * model.g(rho(pt, x));
        for (const auto& t : pt.terms) grad[t.slot] += wg * t.coeff * x[t.slot];
    }
    return grad;
}

SparseMatrix<double> PotentialQuadrature::hessian(const NonlinearityModel& model, const Eigen::VectorXd& x) const
{
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(points_.size() * 6);
    for (const auto& pt : points_) {
        const double r = rho(pt, x);
        const double wg = pt.weight * model.g(r);
        for (const auto& t : pt.terms) triplets.emplace_back(t.slot, t.slot, wg * t.coeff);
        if (r == 0.0) continue;
        const double fac = pt.weight * model.g_prime(r) / r;
        for (const auto& ti : pt.terms)
            for (const auto& tl : pt.terms)
                triplets.emplace_back(ti.slot, tl.slot, fac * ti.coeff * x[ti.slot] * tl.coeff * x[tl.slot]);
    }
    SparseMatrix<double> h(size_, size_);
    h.setFromTriplets(triplets.begin(), triplets.end());
    return h;
}

template double PotentialQuadrature::value(const NonlinearityModel&, const Eigen::VectorXd&) const;
template double PotentialQuadrature::value(const NonlinearityModel&, const Eigen::VectorXcd&) const;
template double PotentialQuadrature::value_hat(const NonlinearityModel&, const Eigen::VectorXd&) const;
template double PotentialQuadrature::value_hat(const NonlinearityModel&, const Eigen::VectorXcd&) const;
template Eigen::VectorXd PotentialQuadrature::gradient(const NonlinearityModel&, const Eigen::VectorXd&) const;
template Eigen::VectorXcd PotentialQuadrature::gradient(const NonlinearityModel&, const Eigen::VectorXcd&) const;

// ---------------------------------------------------------------------------
// Damped Newton

namespace {

struct NewtonSystem {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;  // weak form
    std::function<SparseMatrix<double>(const Eigen::VectorXd&)> jacobian;
    Eigen::VectorXd weights;  // masses for the strong norm
};

double strong_norm(const Eigen::VectorXd& weak, const Eigen::VectorXd& weights)
{
    return std::sqrt((weak.array().square() / weights.array()).sum());
}

SolveReport newton(const NewtonSystem& sys, Eigen::VectorXd& x, const SolverOptions& opt)
{
    if (!(opt.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (opt.max_iter < 0) throw std::invalid_argument("solver iteration cap must be nonnegative");

    SolveReport rep;
    Eigen::VectorXd f = sys.residual(x);
    double r = strong_norm(f, sys.weights);
    rep.residual_history.push_back(r);

    Eigen::SparseLU<SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    while (r > opt.tol && rep.iterations < opt.max_iter) {
        SparseMatrix<double> jac = sys.jacobian(x);
        jac.makeCompressed();
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            rep.status = SolveStatus::singular_jacobian;
            rep.message = "Jacobian factorization failed at iteration " + std::to_string(rep.iterations + 1);
            break;
        }
        const Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) {
            rep.status = SolveStatus::singular_jacobian;
            rep.message = "Jacobian is numerically singular at iteration " + std::to_string(rep.iterations + 1);
            break;
        }

        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd trial, ft;
        double rt = 0.0;
        while (t >= opt.damping_floor) {
            trial = x + t * step;
            ft = sys.residual(trial);
            rt = strong_norm(ft, sys.weights);
            if (std::isfinite(rt) && rt <= (1.0 - opt.armijo * t) * r) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        ++rep.iterations;
        if (!accepted) {
            rep.status = SolveStatus::not_converged;
            rep.message = "damping floor reached at iteration " + std::to_string(rep.iterations);
            rep.damping_history.push_back(0.0);
            break;
        }
        x = std::move(trial);
        f = std::move(ft);
        r = rt;
        rep.damping_history.push_back(t);
        rep.residual_history.push_back(r);
    }

    rep.residual = r;
    rep.converged = r <= opt.tol;
    if (rep.converged) {
        rep.status = SolveStatus::converged;
        rep.message.clear();
    } else if (rep.message.empty()) {
        rep.status = SolveStatus::not_converged;
        rep.message = "iteration cap reached";
    }

    const auto& h = rep.residual_history;
    const std::size_t first = h.size() > 4 ? h.size() - 4 : 0;
    for (std::size_t k = first; k + 1 < h.size(); ++k)
        if (h[k] > 0.0) rep.newton_kappa = std::max(rep.newton_kappa, h[k + 1] / (h[k] * h[k]));
    return rep;
}

// |psi| right next to the truncation nodes, relative to the sup norm.
template <typename Boundary>
double boundary_ratio(const Mesh& mesh, double sup, Boundary&& at_edge)
{
    double b = 0.0;
    for (const auto& edge : mesh.edges)
        if (edge.halfline) b = std::max(b, at_edge(edge));
    return sup > 0.0 ? b / sup : 0.0;
}

void classify(SolveReport& rep, double h1, double boundary)
{
    rep.boundary_magnitude = boundary;
    if (!rep.converged) return;
    if (h1 < 1e-6) {
        rep.status = SolveStatus::trivial_solution;
        rep.message = "converged to the trivial solution (H1 norm below 1e-6)";
    } else if (boundary > 1e-6) {
        rep.status = SolveStatus::boundary_contaminated;
        rep.message = "solution does not decay before the truncation node; increase L";
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// NLS

GraphFunction<double> default_nls_guess(const NlsProblem& prob)
{
    prob.validate();
    const Mesh& mesh = *prob.mesh;
    const double p = prob.model->constants().p;
    const double a = std::pow(std::abs(prob.nu) * p / (4.0 * prob.m), 1.0 / (p - 2.0));
    const double b = 0.5 * (p - 2.0) * std::sqrt(std::abs(prob.nu));
    const Eigen::VectorXd d = node_distances(mesh, max_degree_vertex(mesh.graph));
    GraphFunction<double> u(prob.mesh);
    for (Index n = 0; n < mesh.num_nodes; ++n)
        u.values[n] = mesh.dirichlet[static_cast<std::size_t>(n)] ? 0.0
                                                                  : a * std::pow(1.0 / std::cosh(b * d[n]), 2.0 / (p - 2.0));
    return u;
}

namespace {

double g_times_s_prime(const NonlinearityModel& model, double s)
{
    return s > 0.0 ? model.g_prime(s) * s : 0.0;
}

}  // namespace

Eigen::VectorXd nls_weak_residual(const GraphFunction<double>& u, const NlsProblem& prob)
{
    prob.validate();
    const DiscreteLaplacian lap = assemble_nls_laplacian(prob.mesh);
    const Eigen::VectorXd x = lap.to_vector(u);
    Eigen::VectorXd f = lap.form * x - prob.nu * lap.weights.cwiseProduct(x);
    for (Index i = 0; i < x.size(); ++i)
        f[i] -= 2.0 * prob.m * lap.weights[i] * prob.model->g(std::abs(x[i])) * x[i];
    return f;
}

double nls_residual(const GraphFunction<double>& u, const NlsProblem& prob)
{
    const Eigen::VectorXd f = nls_weak_residual(u, prob);
    const DiscreteLaplacian lap = assemble_nls_laplacian(prob.mesh);
    return strong_norm(f, lap.weights);
}

double action_j(const GraphFunction<double>& u, const NlsProblem& prob)
{
    prob.validate();
    const DiscreteLaplacian lap = assemble_nls_laplacian(prob.mesh);
    const Eigen::VectorXd x = lap.to_vector(u);
    double potential = 0.0;
    for (Index i = 0; i < x.size(); ++i) potential += lap.weights[i] * prob.model->primitive(std::abs(x[i]));
    return 0.5 * x.dot(lap.form * x) - 0.5 * prob.nu * x.dot(lap.weights.cwiseProduct(x)) -
           2.0 * prob.m * potential;
}

std::pair<GraphFunction<double>, SolveReport> solve_nls(const NlsProblem& prob,
                                                        const std::optional<GraphFunction<double>>& guess,
                                                        const SolverOptions& options)
{
    prob.validate();
    if (guess && guess->mesh != prob.mesh) throw std::invalid_argument("solve_nls: guess lives on another mesh");
    const DiscreteLaplacian lap = assemble_nls_laplacian(prob.mesh);
    const NonlinearityModel& model = *prob.model;
    const double two_m = 2.0 * prob.m;

    NewtonSystem sys;
    sys.weights = lap.weights;
    sys.residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd f = lap.form * x - prob.nu * lap.weights.cwiseProduct(x);
        for (Index i = 0; i < x.size(); ++i) f[i] -= two_m * lap.weights[i] * model.g(std::abs(x[i])) * x[i];
        return f;
    };
    sys.jacobian = [&](const Eigen::VectorXd& x) {
        SparseMatrix<double> jac = lap.form;
        Eigen::VectorXd diag(x.size());
        for (Index i = 0; i < x.size(); ++i) {
            const double s = std::abs(x[i]);
            diag[i] = -prob.nu * lap.weights[i] - two_m * lap.weights[i] * (model.g(s) + g_times_s_prime(model, s));
        }
        SparseMatrix<double> d(x.size(), x.size());
        d.setIdentity();
        d = d * diag.asDiagonal();
        return SparseMatrix<double>(jac + d);
    };

    Eigen::VectorXd x = lap.to_vector(guess ? *guess : default_nls_guess(prob));
    SolveReport rep = newton(sys, x, options);
    GraphFunction<double> u = lap.from_vector(x);

    const double sup = norm(u, NormKind::Linf);
    const double boundary = boundary_ratio(*prob.mesh, sup, [&](const MeshEdge& e) {
        return std::abs(u.values[e.nodes[static_cast<std::size_t>(e.intervals - 1)]]);
    });
    classify(rep, norm(u, NormKind::H1), boundary);
    return {std::move(u), std::move(rep)};
}

// ---------------------------------------------------------------------------
// NLDE

SpinorFunction<double> lift_guess(const GraphFunction<double>& u, const NldeProblem& prob)
{
    prob.validate();
    if (u.mesh != prob.mesh) throw std::invalid_argument("lift_guess: u lives on another mesh");
    const Mesh& mesh = *prob.mesh;
    const double rest = prob.m * prob.c * prob.c;

    SpinorFunction<double> psi(prob.mesh);
    for (Index n = 0; n < mesh.num_nodes; ++n)
        psi.u.values[n] = mesh.dirichlet[static_cast<std::size_t>(n)] ? 0.0 : u.values[n];
    for (const auto& edge : mesh.edges) {
        for (Index k = 0; k < edge.intervals; ++k) {
            const double left = psi.u.values[edge.nodes[static_cast<std::size_t>(k)]];
            const double right = psi.u.values[edge.nodes[static_cast<std::size_t>(k + 1)]];
            const double du = (right - left) / edge.step;
            const double mean = std::abs(0.5 * (left + right));
            psi.w.values[edge.half(k)] = -prob.c * du / (rest + prob.omega + prob.model->g(mean));
        }
    }
    return psi;
}

Eigen::VectorXcd nlde_weak_residual(const SpinorFunction<Complex>& psi, const NldeProblem& prob,
                                    const DiscreteDirac& dirac)
{
    const Eigen::VectorXcd x = dirac.layout.to_vector(psi);
    const PotentialQuadrature pot(dirac.layout);
    return dirac.form * x - prob.omega * (dirac.weights.cast<Complex>().asDiagonal() * x) -
           pot.gradient(*prob.model, x);
}

double nlde_residual(const SpinorFunction<Complex>& psi, const NldeProblem& prob)
{
    prob.validate();
    const DiscreteDirac dirac = assemble_dirac(prob.mesh, prob.m, prob.c);
    const Eigen::VectorXcd f = nlde_weak_residual(psi, prob, dirac);
    return std::sqrt((f.cwiseAbs2().array() / dirac.weights.array()).sum());
}

double nlde_residual(const SpinorFunction<double>& psi, const NldeProblem& prob)
{
    return nlde_residual(to_complex(psi), prob);
}

double nlde_pairing(const SpinorFunction<Complex>& psi, const SpinorFunction<Complex>& phi, const NldeProblem& prob)
{
    prob.validate();
    const DiscreteDirac dirac = assemble_dirac(prob.mesh, prob.m, prob.c);
    const Eigen::VectorXcd f = nlde_weak_residual(psi, prob, dirac);
    return dirac.layout.to_vector(phi).dot(f).real();
}

double action_phi(const SpinorFunction<Complex>& psi, const NldeProblem& prob)
{
    prob.validate();
    const DiscreteDirac dirac = assemble_dirac(prob.mesh, prob.m, prob.c);
    const Eigen::VectorXcd x = dirac.layout.to_vector(psi);
    const PotentialQuadrature pot(dirac.layout);
    const double quadratic = x.dot(dirac.form * x).real();
    const double mass = (dirac.weights.array() * x.cwiseAbs2().array()).sum();
    return 0.5 * quadratic - 0.5 * prob.omega * mass - pot.value(*prob.model, x);
}

double action_phi(const SpinorFunction<double>& psi, const NldeProblem& prob)
{
    return action_phi(to_complex(psi), prob);
}

double potential_hat_integral(const SpinorFunction<double>& psi, const NldeProblem& prob)
{
    prob.validate();
    const SpinorLayout layout{prob.mesh};
    return PotentialQuadrature(layout).value_hat(*prob.model, layout.to_real(psi));
}

std::pair<SpinorFunction<double>, SolveReport> solve_nlde(const NldeProblem& prob,
                                                          const SpinorFunction<double>& guess,
                                                          const SolverOptions& options)
{
    prob.validate();
    if (guess.mesh() != prob.mesh) throw std::invalid_argument("solve_nlde: guess lives on another mesh");
    const DiscreteDirac dirac = assemble_dirac(prob.mesh, prob.m, prob.c);
    const PotentialQuadrature pot(dirac.layout);
    const NonlinearityModel& model = *prob.model;

    // K_r - omega M is fixed; only the potential Hessian changes.
    SparseMatrix<double> mass(dirac.layout.size(), dirac.layout.size());
    mass.setIdentity();
    mass = mass * dirac.weights.asDiagonal();
    const SparseMatrix<double> linear = dirac.real_form() - prob.omega * mass;

    NewtonSystem sys;
    sys.weights = dirac.weights;
    sys.residual = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(linear * x - pot.gradient(model, x)); };
    sys.jacobian = [&](const Eigen::VectorXd& x) { return SparseMatrix<double>(linear - pot.hessian(model, x)); };

    Eigen::VectorXd x = dirac.layout.to_real(guess);
    SolveReport rep = newton(sys, x, options);
    SpinorFunction<double> psi = dirac.layout.from_real(x);

    const double sup = norm(psi, NormKind::Linf);
    const double boundary = boundary_ratio(*prob.mesh, sup, [&](const MeshEdge& e) {
        return std::max(std::abs(psi.u.values[e.nodes[static_cast<std::size_t>(e.intervals - 1)]]),
                        std::abs(psi.w.values[e.half(e.intervals - 1)]));
    });
    classify(rep, norm(psi, NormKind::H1), boundary);
    if (!prob.in_limit_regime()) {
        if (!rep.message.empty()) rep.message += "; ";
        rep.message += "omega outside (0, m c^2): not the nonrelativistic-limit regime";
    }
    return {std::move(psi), std::move(rep)};
}

}  // namespace qgdirac
