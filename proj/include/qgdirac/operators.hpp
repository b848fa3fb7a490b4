#pragma once

#include "qgdirac/field.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>

namespace qgdirac {

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

/// Unknown layout shared by the Dirac operator and the solvers:
/// [u at free integer nodes | v = i*w at all half-nodes].
struct SpinorLayout {
    MeshPtr mesh;

    Index size() const { return mesh->num_free + mesh->num_half_nodes; }
    Index half_slot(Index k) const { return mesh->num_free + k; }

    /// Mass (quadrature) weights of every slot.
    Eigen::VectorXd weights() const;

    /// Complex coordinates (u, v) with v = i*w. Dirichlet nodes are dropped.
    Eigen::VectorXcd to_vector(const SpinorFunction<Complex>& psi) const;
    SpinorFunction<Complex> from_vector(const Eigen::VectorXcd& x) const;

    /// Real coordinates (u, w) of the real-reduced problem.
    Eigen::VectorXd to_real(const SpinorFunction<double>& psi) const;
    SpinorFunction<double> from_real(const Eigen::VectorXd& x) const;
};

/// Dirac operator with Kirchhoff-type vertex conditions in weak form.
///
/// `form` is the Hermitian matrix K of the sesquilinear form psi^H K phi, the
/// operator itself is M^{-1} K with the diagonal mass M = `weights`. Rows are
/// built edge by edge from the staggered stencil
///
///     u-row j      : -ic (v_{j+1/2} - v_{j-1/2}) + W_j m c^2 u_j
///     v-row j+1/2  : -ic (u_{j+1} - u_j)         - h   m c^2 v_{j+1/2}
///
/// so a vertex u-row collects c * (sum of signed v traces) from all incident
/// edges and the flux condition sum_e v_e(v)_+- = 0 is the natural condition
/// of the form. Truncation nodes are eliminated (u = 0).
struct DiscreteDirac {
    using Scalar = Complex;

    SpinorLayout layout;
    double mass = 0.0;
    double light_speed = 0.0;
    SparseMatrix<Complex> form;
    Eigen::VectorXd weights;

    /// M^{-1/2} K M^{-1/2}: Hermitian with the same spectrum as the operator.
    SparseMatrix<Complex> symmetric_matrix() const;

    /// S^H K S with S = diag(1, i): real symmetric form acting on (u, w).
    SparseMatrix<double> real_form() const;

    /// Strong action M^{-1} K psi.
    SpinorFunction<Complex> apply(const SpinorFunction<Complex>& psi) const;
};

DiscreteDirac assemble_dirac(const MeshPtr& mesh, double mass, double light_speed);

/// Kirchhoff Laplacian (-Delta) in weak form on the free integer nodes:
/// `form` = sum over cells of |u_{j+1} - u_j|^2 / h, `weights` = trapezoid
/// masses. A vertex row carries minus the sum of signed outgoing one-sided
/// differences of the incident edges.
struct DiscreteLaplacian {
    using Scalar = double;

    MeshPtr mesh;
    SparseMatrix<double> form;
    Eigen::VectorXd weights;

    SparseMatrix<double> symmetric_matrix() const;

    /// Strong action M^{-1} K u evaluated cell by cell; exact zero on constants
    /// when no Dirichlet node is present.
    GraphFunction<double> apply(const GraphFunction<double>& u) const;

    Eigen::VectorXd to_vector(const GraphFunction<double>& u) const;
    GraphFunction<double> from_vector(const Eigen::VectorXd& x) const;
};

DiscreteLaplacian assemble_nls_laplacian(const MeshPtr& mesh);

/// Eigenpairs of M^{-1} K. `vectors` are M-orthonormal coordinate vectors
/// in the operator's layout.
template <typename Scalar>
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
    Eigen::VectorXd residuals;  ///< ||A phi - lambda phi|| in the symmetric scaling
    Eigen::VectorXd weights;
    double operator_norm = 0.0;  ///< infinity-norm bound of the symmetric matrix
    bool full = false;
};

class EigenSolveError : public std::runtime_error {
public:
    EigenSolveError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double achieved_residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct EigenOptions {
    double tolerance = 1e-8;  ///< relative to the operator norm
    int max_iterations = 3000;
    unsigned seed = 20240607u;
};

/// The k eigenpairs of smallest magnitude, by shift-invert subspace
/// iteration with Rayleigh-Ritz about 0 (dense solve for small matrices).
template <typename Operator>
EigenDecomposition<typename Operator::Scalar> eigen_extremes(const Operator& op, Index k,
                                                             const EigenOptions& options = {});

/// Dense full decomposition; limited to coarse meshes (<= 2000 unknowns).
template <typename Operator>
EigenDecomposition<typename Operator::Scalar> full_eigendecomposition(const Operator& op);

inline constexpr Index kMaxDenseUnknowns = 2000;

/// (sum_i |lambda_i| |<phi_i, psi>|^2)^{1/2}; needs a full decomposition.
double energy_norm(const SpinorFunction<Complex>& psi, const DiscreteDirac& dirac,
                   const EigenDecomposition<Complex>& eig);

/// (P+ psi, P- psi) from the spectral projectors onto positive/negative
/// eigenvalues; needs a full decomposition.
std::pair<SpinorFunction<Complex>, SpinorFunction<Complex>> spectral_split(const SpinorFunction<Complex>& psi,
                                                                           const DiscreteDirac& dirac,
                                                                           const EigenDecomposition<Complex>& eig);

/// Eigenvector i as a spinor.
SpinorFunction<Complex> eigenvector_spinor(const DiscreteDirac& dirac, const EigenDecomposition<Complex>& eig,
                                           Index i);

}  // namespace qgdirac
