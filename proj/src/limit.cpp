#include "qgdirac/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qgdirac {

SweepResult run_limit_sweep(const LimitSchedule& schedule, const MetricGraph& graph, ModelPtr model,
                            const MeshConfig& cfg, const SolverOptions& options)
{
    SweepResult out;
    out.table.m = schedule.m;
    out.table.nu = schedule.nu;
    out.continuation = continuation_solve(schedule, graph, model, cfg, options);
    const ContinuationResult& cont = out.continuation;
    out.table.partial = !cont.complete;
    out.table.failure = cont.failure;
    if (cont.nls_mesh) {
        out.table.nls_residual = cont.nls_report.residual;
        if (graph.noncompact() && cont.nls_report.ok()) out.table.nls_decay_rate = fit_decay(cont.nls).rate;
    }

    for (const auto& step : cont.steps) {
        ExperimentRow row;
        row.n = step.index;
        row.c = step.entry.c;
        row.omega = step.entry.omega;
        row.a = step.entry.a;
        row.b = step.entry.b;
        row.v_L2 = norm(step.psi.w, NormKind::L2);
        row.v_H1 = norm(step.psi.w, NormKind::H1);
        row.u_err_H1 = norm(step.psi.u - resample(cont.nls, step.mesh), NormKind::H1);
        row.psi_Linf = norm(step.psi, NormKind::Linf);
        row.psi_H1 = norm(step.psi, NormKind::H1);
        row.psi_L4 = norm(step.psi, NormKind::Lp, 4.0);
        row.u_H1 = norm(step.psi.u, NormKind::H1);
        row.decay_expected = nlde_decay_rate(schedule.m, row.c, row.omega);
        if (graph.noncompact()) {
            const DecayFit fit = fit_decay(step.psi);
            row.decay_rate = fit.rate;
            row.decay_r2 = fit.r2;
        }
        row.residual = step.report.residual;
        row.L = step.mesh->truncation;
        row.iterations = step.report.iterations;
        out.table.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fits

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

const char* to_string(RateColumn column)
{
    switch (column) {
    case RateColumn::v_H1: return "v_H1";
    case RateColumn::v_L2: return "v_L2";
    case RateColumn::u_err: return "u_err_H1";
    }
    return "unknown";
}

LineFit fit_rate(const ExperimentTable& table, RateColumn column)
{
    if (table.rows.size() < 3) throw std::invalid_argument("fit_rate: need at least three converged rows");
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
        double value = 0.0;
        switch (column) {
        case RateColumn::v_H1: value = row.v_H1; break;
        case RateColumn::v_L2: value = row.v_L2; break;
        case RateColumn::u_err: value = row.u_err_H1; break;
        }
        if (!(value > 0.0)) throw std::invalid_argument("fit_rate: column must be positive");
        x.push_back(std::log(row.c));
        y.push_back(std::log(value));
    }
    return fit_line(x, y);
}

namespace {

DecayFit fit_decay_modulus(const GraphFunction<double>& modulus, double tail_fraction)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5))
        throw std::invalid_argument("fit_decay: tail fraction must lie in (0, 0.5]");
    const Mesh& mesh = *modulus.mesh;
    const double floor = 10.0 * std::numeric_limits<double>::epsilon() * norm(modulus, NormKind::Linf);

    DecayFit out;
    bool any_halfline = false;
    for (const auto& edge : mesh.edges) {
        if (!edge.halfline) continue;
        any_halfline = true;
        const Index N = edge.intervals;
        const auto first = static_cast<Index>(std::floor((1.0 - tail_fraction) * static_cast<double>(N)));
        const auto last = static_cast<Index>(std::floor(0.9 * static_cast<double>(N)));
        std::vector<double> x, y;
        for (Index j = first; j <= last && j < N; ++j) {
            const double value = modulus.values[edge.nodes[static_cast<std::size_t>(j)]];
            if (!(value > floor)) continue;
            x.push_back(edge.x(j));
            y.push_back(std::log(value));
        }
        if (x.size() < 3) continue;
        const LineFit fit = fit_line(x, y);
        out.rates.push_back(-fit.slope);
        out.r2 += fit.r2;
    }
    if (!any_halfline) throw std::invalid_argument("fit_decay: graph has no half-line");
    if (out.rates.empty()) throw std::invalid_argument("fit_decay: tail is entirely below the rounding floor");
    for (double r : out.rates) out.rate += r;
    out.rate /= static_cast<double>(out.rates.size());
    out.r2 /= static_cast<double>(out.rates.size());
    return out;
}

}  // namespace

DecayFit fit_decay(const GraphFunction<double>& f, double tail_fraction)
{
    GraphFunction<double> m(f.mesh, f.values.cwiseAbs());
    return fit_decay_modulus(m, tail_fraction);
}

DecayFit fit_decay(const SpinorFunction<double>& psi, double tail_fraction)
{
    return fit_decay_modulus(modulus(psi), tail_fraction);
}

BoundsReport bounds_report(const ExperimentTable& table)
{
    if (table.rows.size() < 2) throw std::invalid_argument("bounds_report: need at least two rows");
    BoundsReport rep;
    auto check = [&](auto get, double& max_out, bool& pass) {
        const auto& rows = table.rows;
        max_out = 0.0;
        for (const auto& r : rows) max_out = std::max(max_out, get(r));
        const double head = std::max(get(rows[0]), get(rows[1]));
        pass = get(rows.back()) <= 1.05 * head;
    };
    check([](const ExperimentRow& r) { return r.psi_Linf; }, rep.max_Linf, rep.pass_Linf);
    check([](const ExperimentRow& r) { return r.psi_H1; }, rep.max_H1, rep.pass_H1);
    check([](const ExperimentRow& r) { return r.psi_L4; }, rep.max_L4, rep.pass_L4);
    return rep;
}

std::vector<RateFitSummary> summarize_rates(const ExperimentTable& table)
{
    std::vector<RateFitSummary> out;
    if (table.rows.size() < 3) return out;
    for (RateColumn col : {RateColumn::v_H1, RateColumn::v_L2}) {
        RateFitSummary s{to_string(col), fit_rate(table, col), "-1", false};
        s.pass = s.fit.slope >= -1.3 && s.fit.slope <= -0.7 && s.fit.r2 >= 0.98;
        out.push_back(s);
    }
    RateFitSummary u{to_string(RateColumn::u_err), fit_rate(table, RateColumn::u_err), "<0", false};
    u.pass = u.fit.slope < 0.0;
    out.push_back(u);
    return out;
}

GagliardoNirenberg gagliardo_nirenberg_ratio(const MeshPtr& mesh, double q, int samples, unsigned seed)
{
    if (!(q >= 2.0)) throw std::invalid_argument("gagliardo_nirenberg_ratio: need q >= 2");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal;

    GagliardoNirenberg out;
    out.q = q;
    for (int s = 0; s < samples; ++s) {
        GraphFunction<double> f(mesh);
        if (s % 2 == 0) {
            // smooth: a few Gaussian bumps
            const int bumps = 1 + static_cast<int>(unit(rng) * 3.0);
            for (int b = 0; b < bumps; ++b) {
                const auto& edge = mesh->edges[static_cast<std::size_t>(unit(rng) * mesh->edges.size()) %
                                               mesh->edges.size()];
                const double center = unit(rng) * std::min(edge.length, 10.0);
                const double width = 0.2 + 3.0 * unit(rng);
                const double amp = normal(rng);
                const std::string id = edge.id;
                f = f + sample(mesh, [&](const MeshEdge& e, double x) {
                        return e.id == id ? amp * std::exp(-std::pow((x - center) / width, 2)) : 0.0;
                    });
            }
        } else {
            for (Index n = 0; n < mesh->num_nodes; ++n) f.values[n] = normal(rng);
        }
        for (Index n = 0; n < mesh->num_nodes; ++n)
            if (mesh->dirichlet[static_cast<std::size_t>(n)]) f.values[n] = 0.0;
        const double l2 = norm(f, NormKind::L2);
        const double d2 = std::sqrt(detail::derivative_energy(f));
        if (!(l2 > 0.0 && d2 > 0.0)) continue;
        const double ratio = norm(f, NormKind::Lp, q) / (std::pow(l2, 0.5 + 1.0 / q) * std::pow(d2, 0.5 - 1.0 / q));
        out.max_ratio = std::max(out.max_ratio, ratio);
        ++out.samples;
    }
    return out;
}

}  // namespace qgdirac
