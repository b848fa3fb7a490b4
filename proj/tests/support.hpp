#pragma once

#include "qgdirac/field.hpp"
#include "qgdirac/graph.hpp"

#include <random>
#include <string>

namespace qgdirac::testing {

inline std::string data_path(const std::string& file)
{
    return std::string(QGDIRAC_DATA_DIR) + "/" + file;
}

inline MetricGraph line_graph() { return read_graph(data_path("line.qg")); }
inline MetricGraph star3_graph() { return read_graph(data_path("star3.qg")); }
inline MetricGraph tadpole_graph() { return read_graph(data_path("tadpole.qg")); }

inline MetricGraph interval_graph(double length)
{
    return parse_graph("graph interval\nvertex a\nvertex b\nedge e a b " + std::to_string(length) + "\n");
}

inline MetricGraph halfline_graph()
{
    return parse_graph("graph ray\nvertex o\nhalfline r o\n");
}

/// Small seeded generator for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(unsigned seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    Eigen::VectorXd vector(Index n)
    {
        Eigen::VectorXd v(n);
        for (Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }
    Eigen::VectorXcd cvector(Index n)
    {
        Eigen::VectorXcd v(n);
        for (Index i = 0; i < n; ++i) v[i] = Complex(normal(), normal());
        return v;
    }

    /// Random real spinor, zero at truncation nodes.
    SpinorFunction<double> spinor(const MeshPtr& mesh)
    {
        SpinorFunction<double> psi(mesh);
        psi.u.values = vector(mesh->num_nodes);
        psi.w.values = vector(mesh->num_half_nodes);
        for (Index n = 0; n < mesh->num_nodes; ++n)
            if (mesh->dirichlet[static_cast<std::size_t>(n)]) psi.u.values[n] = 0.0;
        return psi;
    }
    SpinorFunction<Complex> cspinor(const MeshPtr& mesh)
    {
        SpinorFunction<Complex> psi(mesh);
        psi.u.values = cvector(mesh->num_nodes);
        psi.w.values = cvector(mesh->num_half_nodes);
        for (Index n = 0; n < mesh->num_nodes; ++n)
            if (mesh->dirichlet[static_cast<std::size_t>(n)]) psi.u.values[n] = 0.0;
        return psi;
    }

    /// Smooth random spinor: a few Gaussian bumps per component.
    SpinorFunction<double> smooth_spinor(const MeshPtr& mesh, int bumps = 3)
    {
        std::vector<std::array<double, 3>> pu, pw;
        for (int i = 0; i < bumps; ++i) {
            pu.push_back({normal(), uniform(0.0, 4.0), uniform(0.5, 2.0)});
            pw.push_back({normal(), uniform(0.0, 4.0), uniform(0.5, 2.0)});
        }
        auto eval = [](const std::vector<std::array<double, 3>>& p, double x) {
            double s = 0.0;
            for (const auto& b : p) s += b[0] * std::exp(-std::pow((x - b[1]) / b[2], 2));
            return s;
        };
        SpinorFunction<double> psi(mesh);
        psi.u = sample(mesh, [&](const MeshEdge&, double x) { return eval(pu, x); });
        psi.w = sample_half(mesh, [&](const MeshEdge&, double x) { return eval(pw, x); });
        for (Index n = 0; n < mesh->num_nodes; ++n)
            if (mesh->dirichlet[static_cast<std::size_t>(n)]) psi.u.values[n] = 0.0;
        return psi;
    }
};

}  // namespace qgdirac::testing
