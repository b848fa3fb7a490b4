#pragma once

#include "qgdirac/mesh.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace qgdirac {

using Complex = std::complex<double>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Samples at the integer nodes of a mesh. Vertex continuity is structural:
/// a glued vertex owns one value shared by all incident edges.
template <typename Scalar = double>
struct GraphFunction {
    using scalar_type = Scalar;

    MeshPtr mesh;
    VectorX<Scalar> values;

    GraphFunction() = default;
    explicit GraphFunction(MeshPtr m) : mesh(std::move(m)), values(VectorX<Scalar>::Zero(mesh->num_nodes)) {}
    GraphFunction(MeshPtr m, VectorX<Scalar> v) : mesh(std::move(m)), values(std::move(v))
    {
        if (values.size() != mesh->num_nodes) throw std::invalid_argument("GraphFunction: size mismatch");
    }

    Scalar& operator[](Index n) { return values[n]; }
    const Scalar& operator[](Index n) const { return values[n]; }
    Scalar at(Index edge, Index j) const
    {
        return values[mesh->edges[static_cast<std::size_t>(edge)].nodes[static_cast<std::size_t>(j)]];
    }
};

/// Samples at the staggered half-nodes of a mesh (no shared vertex value).
template <typename Scalar = double>
struct HalfNodeFunction {
    using scalar_type = Scalar;

    MeshPtr mesh;
    VectorX<Scalar> values;

    HalfNodeFunction() = default;
    explicit HalfNodeFunction(MeshPtr m)
        : mesh(std::move(m)), values(VectorX<Scalar>::Zero(mesh->num_half_nodes)) {}
    HalfNodeFunction(MeshPtr m, VectorX<Scalar> v) : mesh(std::move(m)), values(std::move(v))
    {
        if (values.size() != mesh->num_half_nodes) throw std::invalid_argument("HalfNodeFunction: size mismatch");
    }

    Scalar& operator[](Index k) { return values[k]; }
    const Scalar& operator[](Index k) const { return values[k]; }
    Scalar at(Index edge, Index k) const
    {
        return values[mesh->edges[static_cast<std::size_t>(edge)].half(k)];
    }
};

/// Two-component field psi = (u, v) with v = i*w: u lives on integer nodes,
/// w on half-nodes.
template <typename Scalar = double>
struct SpinorFunction {
    using scalar_type = Scalar;

    GraphFunction<Scalar> u;
    HalfNodeFunction<Scalar> w;

    SpinorFunction() = default;
    explicit SpinorFunction(const MeshPtr& m) : u(m), w(m) {}
    SpinorFunction(GraphFunction<Scalar> uu, HalfNodeFunction<Scalar> ww) : u(std::move(uu)), w(std::move(ww))
    {
        if (u.mesh != w.mesh) throw std::invalid_argument("SpinorFunction: components on different meshes");
    }
    const MeshPtr& mesh() const { return u.mesh; }
};

// ---------------------------------------------------------------------------
// Arithmetic (value semantics)

template <typename F>
concept MeshField = requires(F f) {
    f.mesh;
    f.values;
};

template <MeshField F>
F operator+(const F& a, const F& b)
{
    if (a.mesh != b.mesh) throw std::invalid_argument("fields live on different meshes");
    return F(a.mesh, a.values + b.values);
}

template <MeshField F>
F operator-(const F& a, const F& b)
{
    if (a.mesh != b.mesh) throw std::invalid_argument("fields live on different meshes");
    return F(a.mesh, a.values - b.values);
}

template <MeshField F>
F operator*(typename F::scalar_type alpha, const F& f)
{
    return F(f.mesh, alpha * f.values);
}

template <typename Scalar>
SpinorFunction<Scalar> operator+(const SpinorFunction<Scalar>& a, const SpinorFunction<Scalar>& b)
{
    return {a.u + b.u, a.w + b.w};
}

template <typename Scalar>
SpinorFunction<Scalar> operator-(const SpinorFunction<Scalar>& a, const SpinorFunction<Scalar>& b)
{
    return {a.u - b.u, a.w - b.w};
}

template <typename Scalar>
SpinorFunction<Scalar> operator*(Scalar alpha, const SpinorFunction<Scalar>& f)
{
    return {alpha * f.u, alpha * f.w};
}

template <typename Scalar>
SpinorFunction<Complex> to_complex(const SpinorFunction<Scalar>& f)
{
    return {GraphFunction<Complex>(f.mesh(), f.u.values.template cast<Complex>()),
            HalfNodeFunction<Complex>(f.mesh(), f.w.values.template cast<Complex>())};
}

// ---------------------------------------------------------------------------
// Sampling

/// Samples fn(edge, x) at every integer node. A vertex node takes the value
/// from the first edge that reaches it.
template <typename Fn>
auto sample(const MeshPtr& mesh, Fn&& fn)
{
    using Scalar = std::decay_t<decltype(fn(mesh->edges.front(), 0.0))>;
    GraphFunction<Scalar> f(mesh);
    std::vector<bool> done(static_cast<std::size_t>(mesh->num_nodes), false);
    for (const auto& edge : mesh->edges) {
        for (Index j = 0; j <= edge.intervals; ++j) {
            const Index n = edge.nodes[static_cast<std::size_t>(j)];
            if (done[static_cast<std::size_t>(n)]) continue;
            f.values[n] = fn(edge, edge.x(j));
            done[static_cast<std::size_t>(n)] = true;
        }
    }
    return f;
}

template <typename Fn>
auto sample_half(const MeshPtr& mesh, Fn&& fn)
{
    using Scalar = std::decay_t<decltype(fn(mesh->edges.front(), 0.0))>;
    HalfNodeFunction<Scalar> f(mesh);
    for (const auto& edge : mesh->edges)
        for (Index k = 0; k < edge.intervals; ++k) f.values[edge.half(k)] = fn(edge, edge.x_half(k));
    return f;
}

// ---------------------------------------------------------------------------
// Quadrature and norms

enum class NormKind { L2, Lp, Linf, H1 };

/// Trapezoid rule over all edges.
template <typename Scalar>
Scalar quadrature(const GraphFunction<Scalar>& f)
{
    return (f.mesh->node_weight.template cast<Scalar>().array() * f.values.array()).sum();
}

/// Midpoint rule over all edges.
template <typename Scalar>
Scalar quadrature(const HalfNodeFunction<Scalar>& f)
{
    return (f.mesh->half_weight.template cast<Scalar>().array() * f.values.array()).sum();
}

namespace detail {

template <typename Derived>
double weighted_power_sum(const Eigen::MatrixBase<Derived>& values, const Eigen::VectorXd& weight, double p)
{
    double sum = 0.0;
    for (Index i = 0; i < values.size(); ++i) sum += weight[i] * std::pow(std::abs(values[i]), p);
    return sum;
}

inline void check_exponent(double p)
{
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("norm: exponent must be finite and >= 1");
}

/// Centered differences on edge interiors, second-order one-sided stencils at
/// the edge ends. Returns sum over edges of the trapezoid integral of |f'|^2.
template <typename Scalar>
double derivative_energy(const GraphFunction<Scalar>& f)
{
    double sum = 0.0;
    for (const auto& edge : f.mesh->edges) {
        const Index N = edge.intervals;
        const double h = edge.step;
        auto val = [&](Index j) { return f.values[edge.nodes[static_cast<std::size_t>(j)]]; };
        for (Index j = 0; j <= N; ++j) {
            Scalar d;
            if (j == 0)
                d = (-3.0 * val(0) + 4.0 * val(1) - val(2)) / (2.0 * h);
            else if (j == N)
                d = (3.0 * val(N) - 4.0 * val(N - 1) + val(N - 2)) / (2.0 * h);
            else
                d = (val(j + 1) - val(j - 1)) / (2.0 * h);
            const double weight = (j == 0 || j == N) ? 0.5 * h : h;
            sum += weight * std::norm(d);
        }
    }
    return sum;
}

/// Differences of consecutive half-nodes, located at interior integer nodes.
template <typename Scalar>
double derivative_energy(const HalfNodeFunction<Scalar>& f)
{
    double sum = 0.0;
    for (const auto& edge : f.mesh->edges) {
        for (Index k = 1; k < edge.intervals; ++k) {
            const Scalar d = (f.values[edge.half(k)] - f.values[edge.half(k - 1)]) / edge.step;
            sum += edge.step * std::norm(d);
        }
    }
    return sum;
}

template <typename F>
double scalar_norm(const F& f, const Eigen::VectorXd& weight, NormKind kind, double p)
{
    switch (kind) {
    case NormKind::L2:
        return std::sqrt((weight.array() * f.values.cwiseAbs2().array()).sum());
    case NormKind::Lp:
        check_exponent(p);
        return std::pow(weighted_power_sum(f.values, weight, p), 1.0 / p);
    case NormKind::Linf:
        return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
    case NormKind::H1:
        return std::sqrt((weight.array() * f.values.cwiseAbs2().array()).sum() + derivative_energy(f));
    }
    return 0.0;
}

}  // namespace detail

template <typename Scalar>
double norm(const GraphFunction<Scalar>& f, NormKind kind, double p = 2.0)
{
    return detail::scalar_norm(f, f.mesh->node_weight, kind, p);
}

template <typename Scalar>
double norm(const HalfNodeFunction<Scalar>& f, NormKind kind, double p = 2.0)
{
    return detail::scalar_norm(f, f.mesh->half_weight, kind, p);
}

/// Pointwise modulus |psi| at the integer nodes. The second component enters
/// through the share-weighted mean of |w|^2 over the adjacent half-nodes,
/// which is orientation independent at vertices.
template <typename Scalar>
GraphFunction<double> modulus(const SpinorFunction<Scalar>& psi)
{
    const Mesh& mesh = *psi.mesh();
    GraphFunction<double> out(psi.mesh());
    for (Index n = 0; n < mesh.num_nodes; ++n) {
        double w2 = 0.0;
        for (const auto& nb : mesh.node_halves[static_cast<std::size_t>(n)])
            w2 += nb.share * std::norm(psi.w.values[nb.half]);
        w2 /= mesh.node_weight[n];
        out.values[n] = std::sqrt(std::norm(psi.u.values[n]) + w2);
    }
    return out;
}

/// Spinor norms: ||psi||_p^p = ||u||_p^p + ||v||_p^p, H1 likewise squared-summed,
/// L-infinity as the maximum of the pointwise modulus.
template <typename Scalar>
double norm(const SpinorFunction<Scalar>& psi, NormKind kind, double p = 2.0)
{
    if (psi.u.mesh != psi.w.mesh) throw std::invalid_argument("norm: spinor components on different meshes");
    switch (kind) {
    case NormKind::L2:
    case NormKind::H1:
        return std::hypot(norm(psi.u, kind), norm(psi.w, kind));
    case NormKind::Lp: {
        detail::check_exponent(p);
        const double sum = detail::weighted_power_sum(psi.u.values, psi.mesh()->node_weight, p) +
                           detail::weighted_power_sum(psi.w.values, psi.mesh()->half_weight, p);
        return std::pow(sum, 1.0 / p);
    }
    case NormKind::Linf:
        return norm(modulus(psi), NormKind::Linf);
    }
    return 0.0;
}

/// Discrete L2 inner product <a, b> (antilinear in a). Since v = i*w the
/// second components pair as conj(w_a) w_b.
template <typename Scalar>
Scalar inner_product(const SpinorFunction<Scalar>& a, const SpinorFunction<Scalar>& b)
{
    const Mesh& mesh = *a.mesh();
    Scalar s = (mesh.node_weight.template cast<Scalar>().array() * a.u.values.conjugate().array() *
                b.u.values.array())
                   .sum();
    s += (mesh.half_weight.template cast<Scalar>().array() * a.w.values.conjugate().array() *
          b.w.values.array())
             .sum();
    return s;
}

// ---------------------------------------------------------------------------
// Vertex traces

namespace detail {

template <typename Scalar>
Scalar vertex_trace(const MeshEdge& edge, std::size_t vertex, Scalar at_tail, Scalar at_head)
{
    bool incident = false;
    Scalar s{};
    if (edge.tail_vertex == vertex) {
        s += at_tail;
        incident = true;
    }
    if (edge.head_vertex && *edge.head_vertex == vertex) {
        s -= at_head;
        incident = true;
    }
    if (!incident) throw std::invalid_argument("edge '" + edge.id + "' is not incident at the vertex");
    return s;
}

}  // namespace detail

/// Linear extrapolation of w to the vertex from the two nearest half-nodes,
/// signed + at coordinate 0 and - at coordinate l_e. A self-loop contributes
/// both of its ends.
template <typename Scalar>
Scalar signed_vertex_value(const HalfNodeFunction<Scalar>& w, Index edge_index, std::size_t vertex)
{
    const MeshEdge& edge = w.mesh->edges.at(static_cast<std::size_t>(edge_index));
    const Index N = edge.intervals;
    const Scalar at_tail = 1.5 * w.values[edge.half(0)] - 0.5 * w.values[edge.half(1)];
    const Scalar at_head = 1.5 * w.values[edge.half(N - 1)] - 0.5 * w.values[edge.half(N - 2)];
    return detail::vertex_trace(edge, vertex, at_tail, at_head);
}

/// Outgoing derivative of u at the vertex along one edge (fourth-order
/// one-sided stencil), with the same sign convention as signed_vertex_value.
template <typename Scalar>
Scalar signed_vertex_derivative(const GraphFunction<Scalar>& u, Index edge_index, std::size_t vertex)
{
    const MeshEdge& edge = u.mesh->edges.at(static_cast<std::size_t>(edge_index));
    const Index N = edge.intervals;
    const double h = edge.step;
    // -(25, -48, 36, -16, 3) / 12h from the end inwards
    auto one_sided = [&](auto at) {
        return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h);
    };
    const Scalar at_tail = one_sided([&](Index j) { return u.at(edge_index, j); });
    const Scalar at_head = -one_sided([&](Index j) { return u.at(edge_index, N - j); });
    return detail::vertex_trace(edge, vertex, at_tail, at_head);
}

/// Sum of signed outgoing derivatives over all edges at a vertex.
template <typename Scalar>
Scalar kirchhoff_flux(const GraphFunction<Scalar>& u, std::size_t vertex)
{
    Scalar sum{};
    for (std::size_t e = 0; e < u.mesh->edges.size(); ++e) {
        const auto& edge = u.mesh->edges[e];
        if (edge.tail_vertex == vertex || (edge.head_vertex && *edge.head_vertex == vertex))
            sum += signed_vertex_derivative(u, static_cast<Index>(e), vertex);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Transfer between meshes of the same graph

namespace detail {

template <typename Scalar, typename Get>
Scalar interpolate(double pos, Index count, Get&& get)
{
    // pos is a fractional sample index; clamp inside [0, count-1]
    if (count == 1) return get(0);
    pos = std::clamp(pos, 0.0, static_cast<double>(count - 1));
    Index j = std::min(static_cast<Index>(pos), count - 2);
    const double t = pos - static_cast<double>(j);
    if (t == 0.0) return get(j);
    return (1.0 - t) * get(j) + t * get(j + 1);
}

}  // namespace detail

/// Linear interpolation edge by edge (edges matched by id). Points beyond the
/// end of a shorter truncated half-line are set to zero.
template <typename Scalar>
GraphFunction<Scalar> resample(const GraphFunction<Scalar>& f, const MeshPtr& target)
{
    const Mesh& source = *f.mesh;
    return sample(target, [&](const MeshEdge& edge, double x) -> Scalar {
        const MeshEdge& src = source.edge(edge.id);
        if (x > src.length * (1.0 + 1e-12)) return Scalar{};
        return detail::interpolate<Scalar>(x / src.step, src.intervals + 1, [&](Index j) {
            return f.values[src.nodes[static_cast<std::size_t>(j)]];
        });
    });
}

template <typename Scalar>
HalfNodeFunction<Scalar> resample(const HalfNodeFunction<Scalar>& f, const MeshPtr& target)
{
    const Mesh& source = *f.mesh;
    return sample_half(target, [&](const MeshEdge& edge, double x) -> Scalar {
        const MeshEdge& src = source.edge(edge.id);
        if (x > src.length * (1.0 + 1e-12)) return Scalar{};
        return detail::interpolate<Scalar>(x / src.step - 0.5, src.intervals,
                                           [&](Index k) { return f.values[src.half(k)]; });
    });
}

template <typename Scalar>
SpinorFunction<Scalar> resample(const SpinorFunction<Scalar>& psi, const MeshPtr& target)
{
    return {resample(psi.u, target), resample(psi.w, target)};
}

}  // namespace qgdirac
