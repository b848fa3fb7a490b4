#include "qgdirac/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qgdirac {

namespace {

ScheduleEntry make_entry(double m, double c, double omega)
{
    ScheduleEntry e;
    e.c = c;
    e.omega = omega;
    e.b = (m * c * c + omega) / (c * c);
    e.a = (m * c * c - omega) * e.b;
    return e;
}

void check_entries(const LimitSchedule& s)
{
    if (!(s.m > 0.0) || !std::isfinite(s.m)) throw std::invalid_argument("schedule: mass must be positive");
    if (!(s.nu < 0.0) || !std::isfinite(s.nu)) throw std::invalid_argument("schedule: nu must be negative");
    for (std::size_t n = 0; n < s.entries.size(); ++n) {
        const auto& e = s.entries[n];
        const std::string where = " (entry " + std::to_string(n) + ")";
        if (!(e.c > 0.0) || !std::isfinite(e.c)) throw std::invalid_argument("schedule: c must be positive" + where);
        if (n > 0 && !(e.c > s.entries[n - 1].c))
            throw std::invalid_argument("schedule: c must be strictly increasing" + where);
        if (!(e.omega > 0.0 && e.omega < s.m * e.c * e.c))
            throw std::invalid_argument("schedule: need 0 < omega < m c^2; c too small" + where);
    }
}

}  // namespace

LimitSchedule make_schedule(double m, double nu, const std::vector<double>& c_list)
{
    LimitSchedule s;
    s.m = m;
    s.nu = nu;
    s.default_rule = true;
    for (double c : c_list) s.entries.push_back(make_entry(m, c, m * c * c + nu / (2.0 * m)));
    check_entries(s);
    return s;
}

LimitSchedule make_schedule_from_pairs(double m, double nu, const std::vector<std::pair<double, double>>& pairs)
{
    LimitSchedule s;
    s.m = m;
    s.nu = nu;
    s.default_rule = false;
    for (const auto& [c, omega] : pairs) s.entries.push_back(make_entry(m, c, omega));
    check_entries(s);
    return s;
}

// ---------------------------------------------------------------------------

double nlde_decay_rate(double m, double c, double omega)
{
    const double rest = m * c * c;
    return std::sqrt((rest - omega) * (rest + omega)) / c;
}

double truncation_for(const MeshConfig& cfg, double rate)
{
    if (!(rate > 0.0)) throw std::invalid_argument("truncation_for: decay rate must be positive");
    const double L = cfg.step * std::ceil(cfg.decay_lengths / (rate * cfg.step));
    return std::max(L, 10.0 * cfg.step);
}

ContinuationResult continuation_solve(const LimitSchedule& schedule, const MetricGraph& graph, ModelPtr model,
                                      const MeshConfig& cfg, const SolverOptions& options,
                                      const std::optional<std::pair<MeshPtr, GraphFunction<double>>>& nls)
{
    check_entries(schedule);
    ContinuationResult out;
    if (schedule.empty()) {
        out.complete = true;
        return out;
    }

    if (nls) {
        out.nls_mesh = nls->first;
        out.nls = nls->second;
        out.nls_report.status = SolveStatus::converged;
        out.nls_report.converged = true;
        out.nls_report.message = "supplied by caller";
    } else {
        const double L = std::max(cfg.nls_truncation, truncation_for(cfg, std::sqrt(-schedule.nu)));
        out.nls_mesh = build_mesh(graph, cfg.step, L);
        NlsProblem prob{out.nls_mesh, model, schedule.m, schedule.nu};
        auto [u, rep] = solve_nls(prob, std::nullopt, options);
        out.nls = std::move(u);
        out.nls_report = std::move(rep);
        if (!out.nls_report.ok()) {
            out.failure = std::string("NLS target: ") + to_string(out.nls_report.status) + " - " +
                          out.nls_report.message;
            return out;
        }
    }

    for (std::size_t n = 0; n < schedule.size(); ++n) {
        const ScheduleEntry& entry = schedule.entries[n];
        double L = truncation_for(cfg, nlde_decay_rate(schedule.m, entry.c, entry.omega));
        ContinuationStep step;
        for (int attempt = 0;; ++attempt) {
            MeshPtr mesh = build_mesh(graph, cfg.step, L);
            NldeProblem prob{mesh, model, schedule.m, entry.c, entry.omega};
            const SpinorFunction<double> guess =
                n == 0 ? lift_guess(resample(out.nls, mesh), prob) : resample(out.steps.back().psi, mesh);
            auto [psi, rep] = solve_nlde(prob, guess, options);
            step = {n, entry, mesh, std::move(psi), std::move(rep)};
            if (step.report.status != SolveStatus::boundary_contaminated || attempt >= cfg.max_doublings ||
                !graph.noncompact())
                break;
            L *= 2.0;
        }
        if (!step.report.ok()) {
            out.failure = "step " + std::to_string(n) + " (c = " + std::to_string(entry.c) +
                          "): " + to_string(step.report.status) + " - " + step.report.message;
            return out;
        }
        out.steps.push_back(std::move(step));
    }
    out.complete = true;
    return out;
}

}  // namespace qgdirac
