#include "qgdirac/io.hpp"

#include <cmath>
#include <stdexcept>

namespace qgdirac {

namespace {

CsvTable node_rows(const Mesh& mesh, const Eigen::VectorXd& u, const Eigen::VectorXd* w)
{
    CsvTable t{{"edge_id", "x", "u", "w"}, {}};
    for (const auto& edge : mesh.edges) {
        for (Index j = 0; j <= edge.intervals; ++j) {
            t.rows.push_back({edge.id, format_real(edge.x(j)), format_real(u[edge.nodes[static_cast<std::size_t>(j)]]), ""});
            if (w && j < edge.intervals)
                t.rows.push_back({edge.id, format_real(edge.x_half(j)), "", format_real((*w)[edge.half(j)])});
        }
    }
    return t;
}

std::string flag(bool b)
{
    return b ? "true" : "false";
}

}  // namespace

CsvTable solution_table(const SpinorFunction<double>& psi)
{
    return node_rows(*psi.mesh(), psi.u.values, &psi.w.values);
}

CsvTable solution_table(const GraphFunction<double>& u)
{
    return node_rows(*u.mesh, u.values, nullptr);
}

SpinorFunction<double> parse_solution(const CsvTable& table, const MeshPtr& mesh)
{
    if (table.columns != std::vector<std::string>{"edge_id", "x", "u", "w"})
        throw std::invalid_argument("solution file: expected columns edge_id,x,u,w");
    SpinorFunction<double> psi(mesh);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = " (data row " + std::to_string(r + 1) + ")";
        const MeshEdge& edge = mesh->edge(row[0]);
        const double x = parse_real(row[1]);
        const bool has_u = !row[2].empty(), has_w = !row[3].empty();
        if (has_u == has_w) throw std::invalid_argument("solution file: exactly one of u, w per row" + where);
        const double tol = 1e-9 * std::max(1.0, std::abs(x));
        if (has_u) {
            const auto j = static_cast<Index>(std::llround(x / edge.step));
            if (j < 0 || j > edge.intervals || std::abs(edge.x(j) - x) > tol)
                throw std::invalid_argument("solution file: x is not an integer node" + where);
            psi.u.values[edge.nodes[static_cast<std::size_t>(j)]] = parse_real(row[2]);
        } else {
            const auto k = static_cast<Index>(std::llround(x / edge.step - 0.5));
            if (k < 0 || k >= edge.intervals || std::abs(edge.x_half(k) - x) > tol)
                throw std::invalid_argument("solution file: x is not a half-node" + where);
            psi.w.values[edge.half(k)] = parse_real(row[3]);
        }
    }
    return psi;
}

CsvTable report_table(const SolveReport& report, const std::vector<std::pair<std::string, std::string>>& extra)
{
    CsvTable t{{"key", "value"}, {}};
    t.rows.push_back({"status", to_string(report.status)});
    t.rows.push_back({"converged", flag(report.converged)});
    t.rows.push_back({"iterations", format_integer(report.iterations)});
    t.rows.push_back({"residual", format_real(report.residual)});
    t.rows.push_back({"boundary_magnitude", format_real(report.boundary_magnitude)});
    t.rows.push_back({"newton_kappa", format_real(report.newton_kappa)});
    t.rows.push_back({"message", report.message});
    for (const auto& [k, v] : extra) t.rows.push_back({k, v});
    return t;
}

CsvTable history_table(const SolveReport& report)
{
    CsvTable t{{"iteration", "residual", "damping"}, {}};
    for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
        const std::string damping = k == 0 ? "" : format_real(report.damping_history[k - 1]);
        t.rows.push_back({format_integer(static_cast<std::int64_t>(k)), format_real(report.residual_history[k]), damping});
    }
    return t;
}

CsvTable spectrum_table(const EigenDecomposition<Complex>& eig)
{
    CsvTable t{{"index", "eigenvalue", "residual"}, {}};
    for (Index i = 0; i < eig.values.size(); ++i)
        t.rows.push_back({format_integer(i), format_real(eig.values[i]), format_real(eig.residuals[i])});
    return t;
}

CsvTable experiment_table(const ExperimentTable& table)
{
    CsvTable t{{"n", "c", "omega", "a", "b", "v_L2", "v_H1", "u_err_H1", "psi_Linf", "psi_H1", "psi_L4", "u_H1",
                "decay_rate", "decay_expected", "decay_r2", "residual", "L", "iterations"},
               {}};
    for (const auto& r : table.rows) {
        t.rows.push_back({format_integer(static_cast<std::int64_t>(r.n)), format_real(r.c), format_real(r.omega),
                          format_real(r.a), format_real(r.b), format_real(r.v_L2), format_real(r.v_H1),
                          format_real(r.u_err_H1), format_real(r.psi_Linf), format_real(r.psi_H1),
                          format_real(r.psi_L4), format_real(r.u_H1), format_real(r.decay_rate),
                          format_real(r.decay_expected), format_real(r.decay_r2), format_real(r.residual),
                          format_real(r.L), format_integer(r.iterations)});
    }
    return t;
}

CsvTable fits_table(const std::vector<RateFitSummary>& fits)
{
    CsvTable t{{"quantity", "slope", "r2", "expected", "pass"}, {}};
    for (const auto& f : fits)
        t.rows.push_back({f.quantity, format_real(f.fit.slope), format_real(f.fit.r2), f.expected, flag(f.pass)});
    return t;
}

CsvTable hypothesis_table(const HypothesisReport& report, const GrowthBoundReport& growth)
{
    CsvTable t{{"hypothesis", "pass", "witness_s", "detail"}, {}};
    for (const auto& r : report.results)
        t.rows.push_back({r.hypothesis, flag(r.pass), r.witness ? format_real(*r.witness) : "", r.detail});
    std::string detail = growth.detail;
    if (growth.pass) detail += " with C = " + format_real(growth.constant);
    t.rows.push_back({"growth_bound", flag(growth.pass), growth.witness ? format_real(*growth.witness) : "", detail});
    return t;
}

}  // namespace qgdirac
