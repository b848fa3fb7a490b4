#include "qgdirac/cli.hpp"
#include "qgdirac/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

namespace qgdirac {

namespace {

struct RunConfig {
    std::string graph;
    double m = 0.2;
    double nu = -1.0;
    std::optional<double> omega;
    double c = 0.0;
    double p = 4.0;
    double h = 0.01;
    double L = 30.0;
    double tol = 1e-10;
    int max_iter = 50;
    std::string out;
    std::string c_list = "4,8,16,32";
    int k = 4;
    std::string model = "power";
    int grid_points = 241;
};

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw std::invalid_argument("--c-list: empty entry");
        values.push_back(parse_real(item.substr(b, e - b + 1)));
    }
    return values;
}

SolverOptions solver_options(const RunConfig& cfg)
{
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("--max-iter must be at least 1");
    SolverOptions o;
    o.tol = cfg.tol;
    o.max_iter = cfg.max_iter;
    return o;
}

void write_outputs(const std::string& prefix, const SolveReport& rep, const CsvTable& solution,
                   const std::vector<std::pair<std::string, std::string>>& extra)
{
    write_csv(solution, prefix + "_solution.csv");
    write_csv(report_table(rep, extra), prefix + "_report.csv");
    write_csv(history_table(rep), prefix + "_history.csv");
}

std::pair<MeshPtr, NlsProblem> nls_setup(const RunConfig& cfg, const MetricGraph& graph)
{
    MeshPtr mesh = build_mesh(graph, cfg.h, cfg.L);
    NlsProblem prob{mesh, std::make_shared<PowerLaw>(cfg.p), cfg.m, cfg.nu};
    prob.validate();
    return {mesh, prob};
}

int cmd_solve_nls(const RunConfig& cfg, std::ostream& out)
{
    const MetricGraph graph = read_graph(cfg.graph);
    auto [mesh, prob] = nls_setup(cfg, graph);
    const SolverOptions opt = solver_options(cfg);
    auto [u, rep] = solve_nls(prob, std::nullopt, opt);
    write_outputs(cfg.out, rep, solution_table(u),
                  {{"m", format_real(cfg.m)}, {"nu", format_real(cfg.nu)}, {"p", format_real(cfg.p)},
                   {"h", format_real(cfg.h)}, {"L", format_real(cfg.L)}, {"action_J", format_real(action_j(u, prob))},
                   {"u_H1", format_real(norm(u, NormKind::H1))}});
    out << "solve-nls: " << to_string(rep.status) << " after " << rep.iterations
        << " iterations, residual " << format_real(rep.residual) << "\n";
    if (!rep.ok()) throw SolverFailure(rep.message);
    return exit_ok;
}

int cmd_solve_nlde(const RunConfig& cfg, std::ostream& out)
{
    if (!(cfg.c > 0.0)) throw std::invalid_argument("--c must be positive");
    const MetricGraph graph = read_graph(cfg.graph);
    auto [mesh, nls] = nls_setup(cfg, graph);
    const double omega = cfg.omega ? *cfg.omega : cfg.m * cfg.c * cfg.c + cfg.nu / (2.0 * cfg.m);
    NldeProblem prob{mesh, nls.model, cfg.m, cfg.c, omega};
    prob.validate();
    const SolverOptions opt = solver_options(cfg);

    // seed: lift of the NLS bound state on the same mesh
    auto [u, nls_rep] = solve_nls(nls, std::nullopt, opt);
    if (!nls_rep.ok()) throw SolverFailure("NLS seed: " + nls_rep.message);
    auto [psi, rep] = solve_nlde(prob, lift_guess(u, prob), opt);
    write_outputs(cfg.out, rep, solution_table(psi),
                  {{"m", format_real(cfg.m)}, {"c", format_real(cfg.c)}, {"omega", format_real(omega)},
                   {"p", format_real(cfg.p)}, {"h", format_real(cfg.h)}, {"L", format_real(cfg.L)},
                   {"limit_regime", prob.in_limit_regime() ? "true" : "false"},
                   {"action_phi", format_real(action_phi(psi, prob))},
                   {"ghat_integral", format_real(potential_hat_integral(psi, prob))},
                   {"v_H1", format_real(norm(psi.w, NormKind::H1))},
                   {"psi_Linf", format_real(norm(psi, NormKind::Linf))}});
    out << "solve-nlde: " << to_string(rep.status) << " after " << rep.iterations
        << " iterations, residual " << format_real(rep.residual) << "\n";
    if (!rep.message.empty()) out << "  note: " << rep.message << "\n";
    if (!rep.ok()) throw SolverFailure(rep.message);
    return exit_ok;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out)
{
    if (!(cfg.c > 0.0)) throw std::invalid_argument("--c must be positive");
    const MetricGraph graph = read_graph(cfg.graph);
    const DiscreteDirac dirac = assemble_dirac(build_mesh(graph, cfg.h, cfg.L), cfg.m, cfg.c);
    EigenDecomposition<Complex> eig;
    try {
        eig = eigen_extremes(dirac, cfg.k);
    } catch (const EigenSolveError& e) {
        throw SolverFailure(std::string(e.what()) + " (residual " + format_real(e.achieved_residual()) + ")");
    }
    const std::string text = format_csv(spectrum_table(eig));
    if (cfg.out.empty())
        out << text;
    else
        write_text_file(cfg.out + "_spectrum.csv", text);
    return exit_ok;
}

int cmd_limit_sweep(const RunConfig& cfg, std::ostream& out)
{
    const MetricGraph graph = read_graph(cfg.graph);
    const LimitSchedule schedule = make_schedule(cfg.m, cfg.nu, parse_list(cfg.c_list));
    MeshConfig mesh_cfg;
    mesh_cfg.step = cfg.h;
    mesh_cfg.nls_truncation = cfg.L;
    const SweepResult sweep =
        run_limit_sweep(schedule, graph, std::make_shared<PowerLaw>(cfg.p), mesh_cfg, solver_options(cfg));
    const ExperimentTable& table = sweep.table;

    write_csv(experiment_table(table), cfg.out + "_table.csv");
    write_csv(fits_table(summarize_rates(table)), cfg.out + "_fits.csv");
    if (sweep.continuation.nls_mesh) write_csv(solution_table(sweep.continuation.nls), cfg.out + "_nls.csv");
    for (const auto& step : sweep.continuation.steps)
        write_csv(solution_table(step.psi), cfg.out + "_n" + std::to_string(step.index) + ".csv");

    out << "limit-sweep: " << table.rows.size() << " of " << schedule.size() << " steps converged\n";
    for (const auto& f : summarize_rates(table))
        out << "  slope(" << f.quantity << ") = " << format_real(f.fit.slope) << ", r2 = " << format_real(f.fit.r2)
            << (f.pass ? "  [pass]" : "  [fail]") << "\n";
    if (table.rows.size() >= 2) {
        const BoundsReport b = bounds_report(table);
        out << "  uniform bounds (" << b.criterion << "): " << (b.pass() ? "pass" : "fail") << "\n";
    }
    if (table.partial) throw SolverFailure(table.failure);
    return exit_ok;
}

int cmd_check_nonlinearity(const RunConfig& cfg, std::ostream& out)
{
    std::shared_ptr<const NonlinearityModel> model;
    if (cfg.model == "power") {
        model = std::make_shared<PowerLaw>(cfg.p);
    } else {
        HypothesisConstants k;
        k.p = k.theta = cfg.p;
        k.c1 = 0.5 - 1.0 / cfg.p;
        if (cfg.model == "negative")
            model = std::make_shared<FunctionModel>("negative", [](double s) { return -s; }, k,
                                                    [](double) { return -1.0; },
                                                    [](double s) { return -s * s * s / 3.0; });
        else if (cfg.model == "steep")
            model = std::make_shared<FunctionModel>("steep", [](double s) { return std::pow(s, 6.0); }, k,
                                                    [](double s) { return 6.0 * std::pow(s, 5.0); },
                                                    [](double s) { return std::pow(s, 8.0) / 8.0; });
        else
            throw std::invalid_argument("--model must be one of power, negative, steep");
    }
    if (cfg.grid_points < 200) throw std::invalid_argument("--grid-points must be at least 200");
    const auto grid = log_grid(1e-4, 1e4, cfg.grid_points);
    const std::string text = format_csv(hypothesis_table(check_hypotheses(*model, grid), check_growth_bound(*model, grid)));
    if (cfg.out.empty())
        out << text;
    else
        write_text_file(cfg.out + "_hypotheses.csv", text);
    return exit_ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Bound states of the nonlinear Dirac equation on metric graphs", "qgdirac"};
    app.set_help_flag("--help", "print this help and exit");  // -h is not free: --h is the mesh step
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    auto add_graph = [&](CLI::App* sub) { sub->add_option("--graph", cfg.graph, "graph description file")->required(); };
    auto add_solver = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "Newton residual tolerance")->capture_default_str();
        sub->add_option("--max-iter", cfg.max_iter, "Newton iteration cap")->capture_default_str();
    };

    auto* nls = app.add_subcommand("solve-nls", "bound state of -u'' - nu u = 2m g(|u|) u");
    add_graph(nls);
    nls->add_option("--m", cfg.m, "mass")->capture_default_str();
    nls->add_option("--nu", cfg.nu, "frequency (negative)")->capture_default_str();
    nls->add_option("--p", cfg.p, "power-law exponent")->capture_default_str();
    add_solver(nls);
    nls->add_option("--out", cfg.out, "output prefix")->required();

    auto* nlde = app.add_subcommand("solve-nlde", "bound state of D psi - omega psi = g(|psi|) psi");
    add_graph(nlde);
    nlde->add_option("--m", cfg.m, "mass")->capture_default_str();
    nlde->add_option("--c", cfg.c, "speed of light")->required();
    nlde->add_option("--omega", cfg.omega, "frequency (default m c^2 + nu/(2m))");
    nlde->add_option("--nu", cfg.nu, "NLS frequency of the seed")->capture_default_str();
    nlde->add_option("--p", cfg.p, "power-law exponent")->capture_default_str();
    add_solver(nlde);
    nlde->add_option("--out", cfg.out, "output prefix")->required();

    auto* spec = app.add_subcommand("spectrum", "eigenvalues of the Dirac operator nearest 0");
    add_graph(spec);
    spec->add_option("--m", cfg.m, "mass")->capture_default_str();
    spec->add_option("--c", cfg.c, "speed of light")->required();
    spec->add_option("-k", cfg.k, "number of eigenvalues")->capture_default_str();
    spec->add_option("--out", cfg.out, "output prefix (default: CSV on stdout)");

    auto* sweep = app.add_subcommand("limit-sweep", "nonrelativistic-limit experiment along c_n");
    add_graph(sweep);
    sweep->add_option("--m", cfg.m, "mass")->capture_default_str();
    sweep->add_option("--nu", cfg.nu, "NLS frequency (negative)")->capture_default_str();
    sweep->add_option("--p", cfg.p, "power-law exponent")->capture_default_str();
    sweep->add_option("--c-list", cfg.c_list, "comma-separated increasing speeds of light")->capture_default_str();
    add_solver(sweep);
    sweep->add_option("--out", cfg.out, "output prefix")->required();

    auto* check = app.add_subcommand("check-nonlinearity", "sampled check of the hypotheses on g");
    check->add_option("--model", cfg.model, "power | negative | steep")->capture_default_str();
    check->add_option("--p", cfg.p, "exponent (declared growth for the other models)")->capture_default_str();
    check->add_option("--grid-points", cfg.grid_points, "samples on [1e-4, 1e4]")->capture_default_str();
    check->add_option("--out", cfg.out, "output prefix (default: CSV on stdout)");

    // Mesh flags: spectrum defaults to the coarser gap-check mesh.
    for (auto* sub : {nls, nlde, sweep}) {
        sub->add_option("--h", cfg.h, "target mesh step (default 0.01)");
        sub->add_option("--L", cfg.L, "half-line truncation length (default 30)");
    }
    spec->add_option("--h", cfg.h, "target mesh step (default 0.05)");
    spec->add_option("--L", cfg.L, "half-line truncation length (default 40)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*spec) {
            if (spec->count("--h") == 0) cfg.h = 0.05;
            if (spec->count("--L") == 0) cfg.L = 40.0;
        }
        if (*nls) return cmd_solve_nls(cfg, out);
        if (*nlde) return cmd_solve_nlde(cfg, out);
        if (*spec) return cmd_spectrum(cfg, out);
        if (*sweep) return cmd_limit_sweep(cfg, out);
        if (*check) return cmd_check_nonlinearity(cfg, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << "\n";
        return exit_solver;
    } catch (const GraphError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_validation;
}

}  // namespace qgdirac
