#include "qgdirac/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <numeric>
#include <random>

namespace qgdirac {

// ---------------------------------------------------------------------------
// Layout

Eigen::VectorXd SpinorLayout::weights() const
{
    Eigen::VectorXd w(size());
    for (Index i = 0; i < mesh->num_free; ++i) w[i] = mesh->node_weight[mesh->free_to_node[static_cast<std::size_t>(i)]];
    w.tail(mesh->num_half_nodes) = mesh->half_weight;
    return w;
}

Eigen::VectorXcd SpinorLayout::to_vector(const SpinorFunction<Complex>& psi) const
{
    if (psi.mesh() != mesh) throw std::invalid_argument("spinor lives on a different mesh");
    Eigen::VectorXcd x(size());
    for (Index i = 0; i < mesh->num_free; ++i) x[i] = psi.u.values[mesh->free_to_node[static_cast<std::size_t>(i)]];
    x.tail(mesh->num_half_nodes) = Complex(0.0, 1.0) * psi.w.values;
    return x;
}

SpinorFunction<Complex> SpinorLayout::from_vector(const Eigen::VectorXcd& x) const
{
    SpinorFunction<Complex> psi(mesh);
    for (Index i = 0; i < mesh->num_free; ++i) psi.u.values[mesh->free_to_node[static_cast<std::size_t>(i)]] = x[i];
    psi.w.values = Complex(0.0, -1.0) * x.tail(mesh->num_half_nodes);
    return psi;
}

Eigen::VectorXd SpinorLayout::to_real(const SpinorFunction<double>& psi) const
{
    if (psi.mesh() != mesh) throw std::invalid_argument("spinor lives on a different mesh");
    Eigen::VectorXd x(size());
    for (Index i = 0; i < mesh->num_free; ++i) x[i] = psi.u.values[mesh->free_to_node[static_cast<std::size_t>(i)]];
    x.tail(mesh->num_half_nodes) = psi.w.values;
    return x;
}

SpinorFunction<double> SpinorLayout::from_real(const Eigen::VectorXd& x) const
{
    SpinorFunction<double> psi(mesh);
    for (Index i = 0; i < mesh->num_free; ++i) psi.u.values[mesh->free_to_node[static_cast<std::size_t>(i)]] = x[i];
    psi.w.values = x.tail(mesh->num_half_nodes);
    return psi;
}

// ---------------------------------------------------------------------------
// Dirac operator

namespace {

template <typename Scalar>
SparseMatrix<Scalar> scale_symmetric(const SparseMatrix<Scalar>& form, const Eigen::VectorXd& weights)
{
    SparseMatrix<Scalar> a = form;
    for (Index col = 0; col < a.outerSize(); ++col)
        for (typename SparseMatrix<Scalar>::InnerIterator it(a, col); it; ++it)
            it.valueRef() /= std::sqrt(weights[it.row()] * weights[it.col()]);
    return a;
}

}  // namespace

DiscreteDirac assemble_dirac(const MeshPtr& mesh, double mass, double light_speed)
{
    if (!(mass > 0.0)) throw std::invalid_argument("assemble_dirac: mass must be positive");
    if (!(light_speed > 0.0)) throw std::invalid_argument("assemble_dirac: speed of light must be positive");

    DiscreteDirac d;
    d.layout.mesh = mesh;
    d.mass = mass;
    d.light_speed = light_speed;
    d.weights = d.layout.weights();

    const double rest = mass * light_speed * light_speed;
    const Complex hop(0.0, light_speed);  // i c
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(5 * d.layout.size()));

    for (Index i = 0; i < mesh->num_free; ++i)
        triplets.emplace_back(i, i, d.weights[i] * rest);

    for (const auto& edge : mesh->edges) {
        for (Index k = 0; k < edge.intervals; ++k) {
            const Index slot = d.layout.half_slot(edge.half(k));
            const Index left = mesh->free_index[static_cast<std::size_t>(edge.nodes[static_cast<std::size_t>(k)])];
            const Index right = mesh->free_index[static_cast<std::size_t>(edge.nodes[static_cast<std::size_t>(k + 1)])];
            triplets.emplace_back(slot, slot, -edge.step * rest);
            if (right >= 0) {
                triplets.emplace_back(slot, right, -hop);
                triplets.emplace_back(right, slot, std::conj(-hop));
            }
            if (left >= 0) {
                triplets.emplace_back(slot, left, hop);
                triplets.emplace_back(left, slot, std::conj(hop));
            }
        }
    }
    d.form.resize(d.layout.size(), d.layout.size());
    d.form.setFromTriplets(triplets.begin(), triplets.end());
    d.form.makeCompressed();
    return d;
}

SparseMatrix<Complex> DiscreteDirac::symmetric_matrix() const
{
    return scale_symmetric(form, weights);
}

SparseMatrix<double> DiscreteDirac::real_form() const
{
    const Index nu = layout.mesh->num_free;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(form.nonZeros()));
    const Complex i(0.0, 1.0);
    for (Index col = 0; col < form.outerSize(); ++col) {
        for (SparseMatrix<Complex>::InnerIterator it(form, col); it; ++it) {
            const Complex left = it.row() < nu ? Complex(1.0) : std::conj(i);
            const Complex right = it.col() < nu ? Complex(1.0) : i;
            const Complex value = left * it.value() * right;
            triplets.emplace_back(it.row(), it.col(), value.real());
        }
    }
    SparseMatrix<double> r(form.rows(), form.cols());
    r.setFromTriplets(triplets.begin(), triplets.end());
    r.makeCompressed();
    return r;
}

SpinorFunction<Complex> DiscreteDirac::apply(const SpinorFunction<Complex>& psi) const
{
    Eigen::VectorXcd y = form * layout.to_vector(psi);
    y.array() /= weights.array();
    return layout.from_vector(y);
}

// ---------------------------------------------------------------------------
// Kirchhoff Laplacian

DiscreteLaplacian assemble_nls_laplacian(const MeshPtr& mesh)
{
    DiscreteLaplacian lap;
    lap.mesh = mesh;
    lap.weights.resize(mesh->num_free);
    for (Index i = 0; i < mesh->num_free; ++i)
        lap.weights[i] = mesh->node_weight[mesh->free_to_node[static_cast<std::size_t>(i)]];

    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& edge : mesh->edges) {
        const double s = 1.0 / edge.step;
        for (Index k = 0; k < edge.intervals; ++k) {
            const Index a = mesh->free_index[static_cast<std::size_t>(edge.nodes[static_cast<std::size_t>(k)])];
            const Index b = mesh->free_index[static_cast<std::size_t>(edge.nodes[static_cast<std::size_t>(k + 1)])];
            if (a >= 0) triplets.emplace_back(a, a, s);
            if (b >= 0) triplets.emplace_back(b, b, s);
            if (a >= 0 && b >= 0) {
                triplets.emplace_back(a, b, -s);
                triplets.emplace_back(b, a, -s);
            }
        }
    }
    lap.form.resize(mesh->num_free, mesh->num_free);
    lap.form.setFromTriplets(triplets.begin(), triplets.end());
    lap.form.makeCompressed();
    return lap;
}

SparseMatrix<double> DiscreteLaplacian::symmetric_matrix() const
{
    return scale_symmetric(form, weights);
}

GraphFunction<double> DiscreteLaplacian::apply(const GraphFunction<double>& u) const
{
    GraphFunction<double> out(mesh);
    for (const auto& edge : mesh->edges) {
        for (Index k = 0; k < edge.intervals; ++k) {
            const Index a = edge.nodes[static_cast<std::size_t>(k)];
            const Index b = edge.nodes[static_cast<std::size_t>(k + 1)];
            const double flux = (u.values[b] - u.values[a]) / edge.step;
            out.values[a] -= flux;
            out.values[b] += flux;
        }
    }
    for (Index n = 0; n < mesh->num_nodes; ++n)
        out.values[n] = mesh->dirichlet[static_cast<std::size_t>(n)] ? 0.0 : out.values[n] / mesh->node_weight[n];
    return out;
}

Eigen::VectorXd DiscreteLaplacian::to_vector(const GraphFunction<double>& u) const
{
    Eigen::VectorXd x(mesh->num_free);
    for (Index i = 0; i < mesh->num_free; ++i) x[i] = u.values[mesh->free_to_node[static_cast<std::size_t>(i)]];
    return x;
}

GraphFunction<double> DiscreteLaplacian::from_vector(const Eigen::VectorXd& x) const
{
    GraphFunction<double> u(mesh);
    for (Index i = 0; i < mesh->num_free; ++i) u.values[mesh->free_to_node[static_cast<std::size_t>(i)]] = x[i];
    return u;
}

// ---------------------------------------------------------------------------
// Eigensolvers
//
// Both operators are solved through a real symmetric matrix: the Laplacian
// directly, the Dirac operator through S^H K S with S = diag(1, i), which is
// unitarily equivalent. Eigenvectors are mapped back afterwards.

namespace {

using DenseMatrix = Eigen::MatrixXd;

double infinity_norm(const SparseMatrix<double>& a)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (Index col = 0; col < a.outerSize(); ++col)
        for (SparseMatrix<double>::InnerIterator it(a, col); it; ++it) rows[it.row()] += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

std::vector<Index> order_by_magnitude(const Eigen::VectorXd& values, bool descending = false)
{
    std::vector<Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return descending ? std::abs(values[a]) > std::abs(values[b]) : std::abs(values[a]) < std::abs(values[b]);
    });
    return order;
}

struct RealPairs {
    Eigen::VectorXd values;
    DenseMatrix vectors;  // orthonormal in the symmetric scaling
    double norm = 0.0;
};

RealPairs dense_pairs(const SparseMatrix<double>& a, Index k, bool full)
{
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(a)};
    if (es.info() != Eigen::Success) throw EigenSolveError("dense eigensolver failed", -1.0);
    RealPairs out;
    out.norm = infinity_norm(a);
    if (full) {
        out.values = es.eigenvalues();
        out.vectors = es.eigenvectors();
        return out;
    }
    const auto order = order_by_magnitude(es.eigenvalues());
    out.values.resize(k);
    out.vectors.resize(a.rows(), k);
    for (Index i = 0; i < k; ++i) {
        out.values[i] = es.eigenvalues()[order[static_cast<std::size_t>(i)]];
        out.vectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

// Removes the components along the first `cols` columns of V (twice, for
// stability) and orthonormalizes the remainder; returns the kept columns.
DenseMatrix extend_basis(const DenseMatrix& v, Index cols, DenseMatrix w)
{
    for (int pass = 0; pass < 2; ++pass) w -= v.leftCols(cols) * (v.leftCols(cols).transpose() * w);
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(w);
    const double scale = w.cwiseAbs().maxCoeff();
    qr.setThreshold(1e-10);
    const Index rank = scale > 0.0 ? qr.rank() : 0;
    DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(w.rows(), rank);
    for (int pass = 0; pass < 2; ++pass) q -= v.leftCols(cols) * (v.leftCols(cols).transpose() * q);
    Eigen::HouseholderQR<DenseMatrix> qr2(q);
    return qr2.householderQ() * DenseMatrix::Identity(w.rows(), rank);
}

// Block Krylov subspace of (A - sigma)^{-1} with Rayleigh-Ritz and thick
// restarts; the wanted pairs are those of largest |mu| = 1 / |lambda - sigma|.
RealPairs krylov_pairs(const SparseMatrix<double>& a, Index k, const EigenOptions& options)
{
    const Index n = a.rows();
    const double norm_a = infinity_norm(a);

    SparseMatrix<double> identity(n, n);
    identity.setIdentity();
    double sigma = 0.0;
    Eigen::SparseLU<SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        // semidefinite operators (Laplacian without Dirichlet nodes)
        sigma = -1e-8 * norm_a;
        lu.compute(SparseMatrix<double>(a - sigma * identity));
        if (lu.info() != Eigen::Success) throw EigenSolveError("eigen_extremes: factorization failed", -1.0);
    }

    const Index block = std::min(n, std::max<Index>(k, 4));
    const Index max_basis = std::min(n, std::max<Index>(20 * k, 400));
    const Index keep = std::min(max_basis / 2, 2 * k + 2 * block);

    std::mt19937 rng(options.seed);
    std::normal_distribution<double> normal;
    DenseMatrix start(n, block);
    for (Index j = 0; j < block; ++j)
        for (Index i = 0; i < n; ++i) start(i, j) = normal(rng);

    DenseMatrix v(n, max_basis + block), z(n, max_basis + block);  // z = (A - sigma)^{-1} v
    Index cols = 0;
    DenseMatrix next = extend_basis(v, 0, start);

    RealPairs out;
    out.norm = norm_a;
    double worst = std::numeric_limits<double>::infinity();
    int solves = 0;
    while (solves < options.max_iterations) {
        if (next.cols() == 0) throw EigenSolveError("eigen_extremes: Krylov space exhausted", worst);
        const Index b = next.cols();
        v.middleCols(cols, b) = next;
        z.middleCols(cols, b) = lu.solve(next);
        solves += static_cast<int>(b);
        cols += b;

        DenseMatrix t = v.leftCols(cols).transpose() * z.leftCols(cols);
        t = (0.5 * (t + t.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(t);
        const auto order = order_by_magnitude(es.eigenvalues(), true);

        const Index wanted = std::min(k, cols);
        if (wanted == k) {
            out.values.resize(k);
            out.vectors.resize(n, k);
            for (Index i = 0; i < k; ++i) {
                const Index o = order[static_cast<std::size_t>(i)];
                out.values[i] = 1.0 / es.eigenvalues()[o] + sigma;
                out.vectors.col(i) = v.leftCols(cols) * es.eigenvectors().col(o);
            }
            const DenseMatrix r = a * out.vectors - out.vectors * out.values.asDiagonal();
            worst = r.colwise().norm().maxCoeff();
            if (worst <= options.tolerance * norm_a) return out;
        }

        if (cols + block > max_basis) {
            // thick restart on the best Ritz vectors
            const Index r = std::min(keep, cols);
            DenseMatrix s(cols, r);
            for (Index i = 0; i < r; ++i) s.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
            const DenseMatrix vr = v.leftCols(cols) * s;
            const DenseMatrix zr = z.leftCols(cols) * s;
            v.leftCols(r) = vr;
            z.leftCols(r) = zr;
            cols = r;
            next = extend_basis(v, cols, zr.leftCols(std::min(block, r)));
        } else {
            next = extend_basis(v, cols, z.middleCols(cols - b, b));
        }
    }
    throw EigenSolveError("eigen_extremes: no convergence within the iteration cap", worst);
}

SparseMatrix<double> real_symmetric(const DiscreteLaplacian& op)
{
    return op.symmetric_matrix();
}

SparseMatrix<double> real_symmetric(const DiscreteDirac& op)
{
    SparseMatrix<double> a = op.real_form();
    for (Index col = 0; col < a.outerSize(); ++col)
        for (SparseMatrix<double>::InnerIterator it(a, col); it; ++it)
            it.valueRef() /= std::sqrt(op.weights[it.row()] * op.weights[it.col()]);
    return a;
}

Eigen::MatrixXd to_operator_vectors(const DiscreteLaplacian&, const DenseMatrix& y)
{
    return y;
}

Eigen::MatrixXcd to_operator_vectors(const DiscreteDirac& op, const DenseMatrix& y)
{
    Eigen::MatrixXcd out = y.cast<Complex>();
    out.bottomRows(op.layout.mesh->num_half_nodes) *= Complex(0.0, 1.0);
    return out;
}

template <typename Operator>
EigenDecomposition<typename Operator::Scalar> package(const Operator& op, const SparseMatrix<double>& a,
                                                      const RealPairs& pairs, bool full)
{
    EigenDecomposition<typename Operator::Scalar> out;
    out.values = pairs.values;
    out.weights = op.weights;
    out.operator_norm = pairs.norm;
    out.full = full;
    const DenseMatrix r = a * pairs.vectors - pairs.vectors * pairs.values.asDiagonal();
    out.residuals = r.colwise().norm().transpose();
    out.vectors = op.weights.cwiseSqrt().cwiseInverse().asDiagonal() * to_operator_vectors(op, pairs.vectors);
    return out;
}

}  // namespace

template <typename Operator>
EigenDecomposition<typename Operator::Scalar> eigen_extremes(const Operator& op, Index k, const EigenOptions& options)
{
    const SparseMatrix<double> a = real_symmetric(op);
    if (k < 1 || k > a.rows()) throw std::invalid_argument("eigen_extremes: need 1 <= k <= dimension");
    const RealPairs pairs = a.rows() <= 600 ? dense_pairs(a, k, false) : krylov_pairs(a, k, options);
    return package(op, a, pairs, false);
}

template <typename Operator>
EigenDecomposition<typename Operator::Scalar> full_eigendecomposition(const Operator& op)
{
    const SparseMatrix<double> a = real_symmetric(op);
    if (a.rows() > kMaxDenseUnknowns)
        throw std::invalid_argument("full_eigendecomposition: too many unknowns for a dense solve");
    return package(op, a, dense_pairs(a, a.rows(), true), true);
}

template EigenDecomposition<Complex> eigen_extremes<DiscreteDirac>(const DiscreteDirac&, Index, const EigenOptions&);
template EigenDecomposition<double> eigen_extremes<DiscreteLaplacian>(const DiscreteLaplacian&, Index,
                                                                      const EigenOptions&);
template EigenDecomposition<Complex> full_eigendecomposition<DiscreteDirac>(const DiscreteDirac&);
template EigenDecomposition<double> full_eigendecomposition<DiscreteLaplacian>(const DiscreteLaplacian&);

// ---------------------------------------------------------------------------
// Spectral diagnostics

namespace {

Eigen::VectorXcd spectral_coefficients(const SpinorFunction<Complex>& psi, const DiscreteDirac& dirac,
                                       const EigenDecomposition<Complex>& eig)
{
    if (!eig.full) throw std::invalid_argument("a full eigendecomposition is required");
    if (eig.vectors.rows() != dirac.layout.size())
        throw std::invalid_argument("eigendecomposition does not match the operator");
    const Eigen::VectorXcd x = dirac.layout.to_vector(psi);
    return eig.vectors.adjoint() * (dirac.weights.cast<Complex>().asDiagonal() * x);
}

}  // namespace

double energy_norm(const SpinorFunction<Complex>& psi, const DiscreteDirac& dirac,
                   const EigenDecomposition<Complex>& eig)
{
    const Eigen::VectorXcd coeff = spectral_coefficients(psi, dirac, eig);
    return std::sqrt((eig.values.cwiseAbs().array() * coeff.cwiseAbs2().array()).sum());
}

std::pair<SpinorFunction<Complex>, SpinorFunction<Complex>> spectral_split(const SpinorFunction<Complex>& psi,
                                                                           const DiscreteDirac& dirac,
                                                                           const EigenDecomposition<Complex>& eig)
{
    const Eigen::VectorXcd coeff = spectral_coefficients(psi, dirac, eig);
    Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(dirac.layout.size());
    Eigen::VectorXcd minus = Eigen::VectorXcd::Zero(dirac.layout.size());
    for (Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values[i] > 0.0)
            plus += coeff[i] * eig.vectors.col(i);
        else
            minus += coeff[i] * eig.vectors.col(i);
    }
    return {dirac.layout.from_vector(plus), dirac.layout.from_vector(minus)};
}

SpinorFunction<Complex> eigenvector_spinor(const DiscreteDirac& dirac, const EigenDecomposition<Complex>& eig,
                                           Index i)
{
    return dirac.layout.from_vector(eig.vectors.col(i));
}

}  // namespace qgdirac
