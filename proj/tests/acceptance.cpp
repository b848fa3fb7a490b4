// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "qgdirac/cli.hpp"
#include "qgdirac/io.hpp"
#include "qgdirac/limit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace qgdirac;
namespace fs = std::filesystem;

namespace {

const double kSqrt5 = std::sqrt(5.0);

std::string data_path(const std::string& file) { return std::string(QGDIRAC_DATA_DIR) + "/" + file; }

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    Verdict() { detail.precision(10); }

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int number, const std::string& title, const std::function<void(Verdict&)>& body)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << number << ": " << title << " -" << v.detail.str()
              << " (" << secs << " s)" << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Rng {
    std::mt19937_64 rng;
    explicit Rng(unsigned seed) : rng(seed) {}
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    SpinorFunction<Complex> cspinor(const MeshPtr& mesh)
    {
        SpinorFunction<Complex> psi(mesh);
        for (Index n = 0; n < mesh->num_nodes; ++n)
            psi.u.values[n] = mesh->dirichlet[static_cast<std::size_t>(n)] ? Complex(0.0) : Complex(normal(), normal());
        for (Index k = 0; k < mesh->num_half_nodes; ++k) psi.w.values[k] = Complex(normal(), normal());
        return psi;
    }
};

double hermitian_defect(const SparseMatrix<Complex>& a)
{
    const SparseMatrix<Complex> d = a - SparseMatrix<Complex>(a.adjoint());
    double worst = 0.0;
    for (Index col = 0; col < d.outerSize(); ++col)
        for (SparseMatrix<Complex>::InnerIterator it(d, col); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "qgdirac");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != exit_ok) std::cerr << err.str();
    return code;
}

const std::vector<double> kSweep{4.0, 8.0, 16.0, 32.0};
const std::vector<std::pair<double, double>> kGapCases{{1.0, 1.0}, {1.0, 2.0}, {0.2, 4.0}};

}  // namespace

int main()
{
    std::cout.precision(6);
    const MetricGraph line = read_graph(data_path("line.qg"));
    const MetricGraph star3 = read_graph(data_path("star3.qg"));

    criterion(1, "spectral gap |lambda| >= 0.99 m c^2 on line and 3-star", [&](Verdict& v) {
        for (const auto* g : {&line, &star3}) {
            auto mesh = build_mesh(*g, 0.05, 40.0);
            for (auto [m, c] : kGapCases) {
                const auto t0 = std::chrono::steady_clock::now();
                auto eig = eigen_extremes(assemble_dirac(mesh, m, c), 4);
                const double secs = seconds_since(t0);
                const double ratio = eig.values.cwiseAbs().minCoeff() / (m * c * c);
                v.detail << " " << g->name << "(m=" << m << ",c=" << c << "): min|l|/mc2=" << ratio << " in " << secs << " s;";
                v.require(eig.values.size() == 4 && ratio >= 0.99, "gap " + g->name);
                v.require(secs < 30.0, "runtime " + g->name);
            }
        }
    });

    criterion(2, "Dirac matrix exactly Hermitian, weak-form symmetry <= 1e-12", [&](Verdict& v) {
        double defect = 0.0;
        for (const auto* g : {&line, &star3})
            for (auto [m, c] : kGapCases) defect = std::max(defect, hermitian_defect(assemble_dirac(build_mesh(*g, 0.05, 40.0), m, c).form));
        v.require(defect == 0.0, "K != K^H");

        Rng rng(2);
        auto mesh = build_mesh(star3, 0.05, 10.0);
        auto d = assemble_dirac(mesh, 1.0, 2.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            auto psi = rng.cspinor(mesh), phi = rng.cspinor(mesh);
            auto dpsi = d.apply(psi), dphi = d.apply(phi);
            const double scale = norm(dpsi, NormKind::L2) * norm(phi, NormKind::L2) +
                                 norm(psi, NormKind::L2) * norm(dphi, NormKind::L2);
            worst = std::max(worst, std::abs(inner_product(dpsi, phi) - inner_product(psi, dphi)) / scale);
        }
        v.detail << " max|K-K^H|=" << defect << ", symmetry defect=" << worst;
        v.require(worst <= 1e-12, "weak symmetry");
    });

    criterion(3, "energy norm bounds the mass-weighted L2 norm", [&](Verdict& v) {
        Rng rng(3);
        auto mesh = build_mesh(line, 0.2, 20.0);
        for (auto [m, c] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}}) {
            auto d = assemble_dirac(mesh, m, c);
            auto eig = full_eigendecomposition(d);
            const double gap = eig.values.cwiseAbs().minCoeff();
            double worst = std::numeric_limits<double>::infinity();
            for (int trial = 0; trial < 100; ++trial) {
                auto psi = rng.cspinor(mesh);
                const double e = energy_norm(psi, d, eig), l2 = norm(psi, NormKind::L2);
                worst = std::min(worst, e * e / (gap * l2 * l2));
            }
            v.detail << " (m=" << m << ",c=" << c << "): min|l|/mc2=" << gap / (m * c * c)
                     << ", min E^2/(min|l| L2^2)=" << worst;
            v.require(worst >= 1.0 - 1e-12, "inequality");
            v.require(std::abs(gap / (m * c * c) - 1.0) <= 0.01, "gap within 1%");
        }
    });

    criterion(4, "NLS solution matches sqrt5 sech(x)", [&](Verdict& v) {
        // closed form checked first: -u'' + u - 0.4 u^3 = 0 with u'' written analytically
        double analytic = 0.0;
        for (double x = -12.0; x <= 12.0; x += 0.0071) {
            const double s = 1.0 / std::cosh(x), u = kSqrt5 * s;
            analytic = std::max(analytic, std::abs(-kSqrt5 * (s - 2.0 * s * s * s) + u - 0.4 * u * u * u));
        }
        v.require(analytic < 1e-8, "closed-form residual");

        auto mesh = build_mesh(line, 0.01, 30.0);
        auto [u, rep] = solve_nls({mesh, std::make_shared<PowerLaw>(4.0), 0.2, -1.0}, std::nullopt);
        auto exact = sample(mesh, [](const MeshEdge&, double x) { return kSqrt5 / std::cosh(x); });
        const double err = norm(u - exact, NormKind::Linf);
        v.detail << " closed-form residual=" << analytic << ", Linf error=" << err << ", Newton residual="
                 << rep.residual;
        v.require(rep.ok(), "NLS solve");
        v.require(err <= 1e-3, "Linf error");
    });

    // The sweep of criteria 5-9: in process (for the solutions) and twice through the CLI (criterion 11).
    const auto sweep_t0 = std::chrono::steady_clock::now();
    auto model = std::make_shared<PowerLaw>(4.0);
    const SweepResult sweep = run_limit_sweep(make_schedule(0.2, -1.0, kSweep), line, model, MeshConfig{});
    const double sweep_secs = seconds_since(sweep_t0);
    const ExperimentTable& table = sweep.table;
    const bool complete = !table.partial && table.rows.size() == kSweep.size();

    criterion(5, "log-log slope of ||v_n||_H1 vs c_n in [-1.3, -0.7]", [&](Verdict& v) {
        v.require(complete, "sweep incomplete: " + table.failure);
        const auto fit = fit_rate(table, RateColumn::v_H1);
        v.detail << " slope=" << fit.slope << ", r2=" << fit.r2 << ", v_H1 =";
        for (const auto& r : table.rows) v.detail << " " << r.v_H1;
        v.require(fit.slope >= -1.3 && fit.slope <= -0.7, "slope");
        v.require(fit.r2 >= 0.98, "r2");
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            v.require(table.rows[i].v_H1 < table.rows[i - 1].v_H1, "strictly decreasing");
        v.detail << ", sweep " << sweep_secs << " s";
        v.require(sweep_secs < 600.0, "runtime");
    });

    criterion(6, "||u_n - u_NLS||_H1 decreasing, final <= 0.05", [&](Verdict& v) {
        v.require(complete, "sweep incomplete");
        v.detail << " u_err_H1 =";
        for (const auto& r : table.rows) v.detail << " " << r.u_err_H1;
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            v.require(table.rows[i].u_err_H1 < table.rows[i - 1].u_err_H1, "decreasing");
        v.require(!table.rows.empty() && table.rows.back().u_err_H1 <= 0.05, "final value");
    });

    criterion(7, "uniform L-infinity and H1 bounds along the sweep", [&](Verdict& v) {
        v.require(complete, "sweep incomplete");
        const auto b = bounds_report(table);
        v.detail << " max Linf=" << b.max_Linf << ", max H1=" << b.max_H1;
        v.require(b.pass_Linf && b.pass_H1, "growth");
        v.require(std::abs(b.max_Linf / kSqrt5 - 1.0) <= 0.2, "Linf max vs sqrt5");
    });

    criterion(8, "tail decay rate matches sqrt(m^2c^4 - omega^2)/c and increases toward 1", [&](Verdict& v) {
        v.require(complete, "sweep incomplete");
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& r = table.rows[i];
            v.detail << " c=" << r.c << ": " << r.decay_rate << "/" << r.decay_expected;
            v.require(std::abs(r.decay_rate / r.decay_expected - 1.0) <= 0.1, "rate at c=" + format_real(r.c));
            v.require(r.decay_expected == nlde_decay_rate(table.m, r.c, r.omega), "expected rate formula");
            if (i > 0) {
                v.require(r.decay_rate > table.rows[i - 1].decay_rate, "measured rate increasing");
                v.require(r.decay_expected > table.rows[i - 1].decay_expected, "expected rate increasing");
            }
            v.require(r.decay_expected < 1.0, "below the limit rate");
        }
        if (!table.rows.empty())
            v.require(std::abs(table.rows.back().decay_rate - 1.0) < std::abs(table.rows.front().decay_rate - 1.0),
                      "approaches 1");
    });

    criterion(9, "criticality: directional derivatives of Phi and Phi = int Ghat", [&](Verdict& v) {
        v.require(complete, "sweep incomplete");
        const SolverOptions options;
        const double eps = 1e-5;
        Rng rng(9);
        for (const auto& step : sweep.continuation.steps) {
            const NldeProblem prob{step.mesh, model, 0.2, step.entry.c, step.entry.omega};
            const double phi = action_phi(step.psi, prob);
            const double ghat = potential_hat_integral(step.psi, prob);
            const auto cpsi = to_complex(step.psi);
            double worst = 0.0;
            for (int trial = 0; trial < 20; ++trial) {
                auto dir = rng.cspinor(step.mesh);
                dir = Complex(1.0 / norm(dir, NormKind::L2)) * dir;
                const double fd = (action_phi(cpsi + Complex(eps) * dir, prob) -
                                   action_phi(cpsi - Complex(eps) * dir, prob)) / (2.0 * eps);
                worst = std::max(worst, std::abs(fd - nlde_pairing(cpsi, dir, prob)));
            }
            const double rel = std::abs(phi - ghat) / std::abs(ghat);
            v.detail << " c=" << step.entry.c << ": max|FD-pairing|=" << worst << ", |Phi-intGhat|/intGhat=" << rel;
            v.require(worst <= 10.0 * (options.tol + eps), "directional derivative");
            v.require(rel <= 1e-6, "critical value identity");
        }
    });

    criterion(10, "hypothesis checks: power laws pass, broken models fail with witnesses", [&](Verdict& v) {
        const auto grid = log_grid(1e-4, 1e4, 241);
        for (double p : {2.5, 3.0, 4.0, 5.0}) {
            PowerLaw law(p);
            v.require(check_hypotheses(law, grid).all_pass(), "power p=" + format_real(p));
            v.require(check_growth_bound(law, grid).pass, "growth bound p=" + format_real(p));
        }
        HypothesisConstants k;
        k.p = k.theta = 4.0;
        k.c1 = 0.25;
        FunctionModel negative("negative", [](double s) { return -s; }, k, [](double) { return -1.0; },
                               [](double s) { return -s * s * s / 3.0; });
        const auto neg = check_hypotheses(negative, grid);
        v.require(!neg.at("g4").pass && neg.at("g4").witness == grid.front(), "negative model g4 witness");
        v.require(!neg.at("g5").pass && neg.at("g5").witness == grid.front(), "negative model g5 witness");
        v.require(!check_growth_bound(negative, grid).pass, "negative model growth bound");

        FunctionModel steep("steep", [](double s) { return std::pow(s, 6.0); }, k,
                            [](double s) { return 6.0 * std::pow(s, 5.0); }, [](double s) { return std::pow(s, 8.0) / 8.0; });
        const auto g3 = check_hypotheses(steep, grid).at("g3");
        const auto first = std::find_if(grid.begin(), grid.end(), [](double s) { return std::pow(s, 6.0) > 1.0 + s * s; });
        v.require(!g3.pass && g3.witness && first != grid.end() && *g3.witness == *first, "steep model g3 witness");
        v.detail << " negative witness=" << grid.front() << ", steep witness=" << (g3.witness ? *g3.witness : 0.0);
    });

    criterion(11, "deterministic sweep CSVs and exact file round trips", [&](Verdict& v) {
        const fs::path dir = fs::temp_directory_path() / "qgdirac_acceptance";
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::vector<std::string> files;
        for (const char* run : {"a", "b"}) {
            const int code = run_cli({"limit-sweep", "--graph", data_path("line.qg"), "--out", (dir / run).string()});
            v.require(code == exit_ok, std::string("CLI sweep ") + run);
        }
        std::size_t compared = 0;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("a_", 0) != 0) continue;
            const std::string a = read_text_file(entry.path());
            const std::string b = read_text_file(dir / ("b" + name.substr(1)));
            v.require(!a.empty() && a == b, "byte-identical " + name);
            ++compared;
        }
        v.detail << " " << compared << " CSV pairs identical";
        v.require(compared == 3 + kSweep.size(), "file count");

        // the CLI table reproduces the in-process sweep
        const auto cli_table = read_csv(dir / "a_table.csv");
        v.require(format_csv(cli_table) == format_csv(experiment_table(table)), "CLI table matches library sweep");

        // graph files
        Rng rng(11);
        double graph_err = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            MetricGraph g;
            g.name = "g" + std::to_string(trial);
            g.vertices = {"a", "b", "c"};
            g.edges = {{"e1", 0, 1, std::exp(rng.uniform(-7.0, 7.0))},
                       {"e2", 1, 2, std::exp(rng.uniform(-7.0, 7.0))},
                       {"loop", 2, 2, std::exp(rng.uniform(-7.0, 7.0))}};
            g.halflines = {{"h", 0}};
            write_text_file(dir / "g.qg", format_graph(g));
            const MetricGraph back = read_graph(dir / "g.qg");
            for (std::size_t e = 0; e < g.edges.size(); ++e)
                graph_err = std::max(graph_err, std::abs(back.edges[e].length - g.edges[e].length) / g.edges[e].length);
            v.require(back.vertices == g.vertices && back.halflines.size() == 1, "graph structure");
        }
        // solution files, including every spinor of the sweep
        double sol_err = 0.0;
        auto relative = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            const double scale = b.cwiseAbs().maxCoeff();
            return scale == 0.0 ? (a - b).cwiseAbs().maxCoeff() : (a - b).cwiseAbs().maxCoeff() / scale;
        };
        for (const auto& step : sweep.continuation.steps) {
            write_csv(solution_table(step.psi), dir / "s.csv");
            const auto back = parse_solution(read_csv(dir / "s.csv"), step.mesh);
            sol_err = std::max({sol_err, relative(back.u.values, step.psi.u.values), relative(back.w.values, step.psi.w.values)});
        }
        v.detail << ", graph round-trip error=" << graph_err << ", solution round-trip error=" << sol_err;
        v.require(graph_err <= 1e-15 && sol_err <= 1e-15, "round trips");
        fs::remove_all(dir);
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
