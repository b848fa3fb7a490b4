#include "qgdirac/nonlinearity.hpp"
#include "qgdirac/csv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgdirac {

namespace {

struct GaussRule {
    Eigen::VectorXd nodes;    // on [-1, 1]
    Eigen::VectorXd weights;
};

// Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre
// recurrence.
GaussRule make_gauss_legendre(int n)
{
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return rule;
}

const GaussRule& gauss_rule()
{
    static const GaussRule rule = make_gauss_legendre(10);
    return rule;
}

// int_0^s g(t) t dt on 64 uniform panels.
double integrate_primitive(const NonlinearityModel& model, double s)
{
    if (s == 0.0) return 0.0;
    const GaussRule& rule = gauss_rule();
    constexpr int panels = 64;
    const double width = s / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = (k + 0.5) * width;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
            const double t = mid + 0.5 * width * rule.nodes[i];
            sum += rule.weights[i] * model.g(t) * t;
        }
    }
    return 0.5 * width * sum;
}

}  // namespace

double NonlinearityModel::g_prime(double s) const
{
    const double step = 1e-6 * std::max(s, 1.0);
    if (s < step) return (g(s + step) - g(s)) / step;
    return (g(s + step) - g(s - step)) / (2.0 * step);
}

double NonlinearityModel::primitive(double s) const
{
    return integrate_primitive(*this, s);
}

// ---------------------------------------------------------------------------

namespace {

HypothesisConstants power_constants(double p)
{
    if (!(p > 2.0 && p < 6.0)) throw std::invalid_argument("PowerLaw: exponent must lie in (2, 6)");
    HypothesisConstants c;
    c.p = p;
    c.theta = p;
    c.xi = 1.9;
    c.R = 1.0;
    c.c1 = 0.5 - 1.0 / p;
    c.C1 = 1.0;
    return c;
}

}  // namespace

PowerLaw::PowerLaw(double p) : NonlinearityModel(power_constants(p)), p_(p) {}

std::string PowerLaw::name() const
{
    return "power(p=" + format_real(p_) + ")";
}

double PowerLaw::g(double s) const
{
    return std::pow(s, p_ - 2.0);
}

double PowerLaw::g_prime(double s) const
{
    if (s == 0.0) {
        if (p_ > 3.0) return 0.0;
        if (p_ == 3.0) return 1.0;
        return std::numeric_limits<double>::infinity();
    }
    return (p_ - 2.0) * std::pow(s, p_ - 3.0);
}

double PowerLaw::primitive(double s) const
{
    return std::pow(s, p_) / p_;
}

FunctionModel::FunctionModel(std::string name, Fn g, HypothesisConstants constants, Fn g_prime, Fn primitive)
    : NonlinearityModel(constants), name_(std::move(name)), g_(std::move(g)), g_prime_(std::move(g_prime)),
      primitive_(std::move(primitive))
{
    if (!g_) throw std::invalid_argument("FunctionModel: g is required");
}

double FunctionModel::g_prime(double s) const
{
    return g_prime_ ? g_prime_(s) : NonlinearityModel::g_prime(s);
}

double FunctionModel::primitive(double s) const
{
    return primitive_ ? primitive_(s) : NonlinearityModel::primitive(s);
}

double eval(const NonlinearityModel& model, Quantity which, double s)
{
    if (!(s >= 0.0)) throw std::invalid_argument("eval: argument must be nonnegative");
    switch (which) {
    case Quantity::g: return model.g(s);
    case Quantity::g_prime: return model.g_prime(s);
    case Quantity::G: return model.primitive(s);
    case Quantity::G_hat: return model.g_hat(s);
    }
    return 0.0;
}

std::vector<double> log_grid(double lo, double hi, int count)
{
    if (!(lo > 0.0 && hi > lo) || count < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, count >= 2");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

// ---------------------------------------------------------------------------
// Hypothesis checks

bool HypothesisReport::all_pass() const
{
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

const HypothesisResult& HypothesisReport::at(const std::string& hypothesis) const
{
    for (const auto& r : results)
        if (r.hypothesis == hypothesis) return r;
    throw std::out_of_range("no hypothesis '" + hypothesis + "' in report");
}

namespace {

constexpr double kRelTol = 1e-9;

HypothesisResult first_violation(std::string name, const std::vector<double>& grid,
                                 const std::function<bool(double)>& holds, std::string ok, std::string bad)
{
    for (double s : grid)
        if (!holds(s)) return {std::move(name), false, s, std::move(bad)};
    return {std::move(name), true, std::nullopt, std::move(ok)};
}

HypothesisResult check_g1(const NonlinearityModel& m, const std::vector<double>& grid)
{
    return first_violation(
        "g1", grid,
        [&](double s) {
            const double d = m.g_prime(s);
            if (!std::isfinite(d) || !std::isfinite(m.g(s))) return false;
            const double step = 1e-4 * s;
            const double fd = (m.g(s + step) - m.g(s - step)) / (2.0 * step);
            const double scale = std::max({std::abs(d), std::abs(m.g(s)) / s, 1e-300});
            return std::abs(d - fd) <= 1e-5 * scale;
        },
        "g' finite and consistent with finite differences", "g' not finite or inconsistent with g");
}

HypothesisResult check_g2(const NonlinearityModel& m)
{
    const double small = std::abs(m.g(1e-4));
    const double unit = std::abs(m.g(1.0));
    if (!(small <= 1e-2 * unit * (1.0 + kRelTol)))
        return {"g2", false, 1e-4, "|g(1e-4)| exceeds 1e-2 |g(1)|"};
    // |g| must not grow as s decreases through the first decade
    const auto decade = log_grid(1e-4, 1e-3, 21);
    for (std::size_t i = 1; i < decade.size(); ++i)
        if (std::abs(m.g(decade[i - 1])) > std::abs(m.g(decade[i])) * (1.0 + kRelTol))
            return {"g2", false, decade[i - 1], "|g| increases as s decreases towards 0"};
    return {"g2", true, std::nullopt, "g small and decreasing near 0"};
}

}  // namespace

HypothesisReport check_hypotheses(const NonlinearityModel& model, const std::vector<double>& grid)
{
    if (grid.empty()) throw std::invalid_argument("check_hypotheses: empty grid");
    const HypothesisConstants& k = model.constants();
    HypothesisReport report;

    {
        HypothesisResult r{"constants", true, std::nullopt, "p > 2, theta > 2, 0 < xi < 2, R > 0, c1 > 0, C1 > 0"};
        if (!(k.p > 2.0 && k.theta > 2.0 && k.xi > 0.0 && k.xi < 2.0 && k.R > 0.0 && k.c1 > 0.0 && k.C1 > 0.0)) {
            r.pass = false;
            r.detail = "declared constants outside their admissible ranges";
        }
        report.results.push_back(r);
    }
    report.results.push_back(check_g1(model, grid));
    report.results.push_back(check_g2(model));
    report.results.push_back(first_violation(
        "g3", grid,
        [&](double s) { return model.g(s) <= k.C1 * (1.0 + std::pow(s, k.p - 2.0)) * (1.0 + kRelTol); },
        "g(s) <= C1 (1 + s^(p-2))", "g(s) exceeds C1 (1 + s^(p-2))"));
    report.results.push_back(first_violation(
        "g4", grid,
        [&](double s) {
            const double lhs = k.theta * model.primitive(s);
            const double rhs = model.g(s) * s * s;
            return lhs > 0.0 && lhs <= rhs + kRelTol * std::abs(rhs);
        },
        "0 < theta G(s) <= g(s) s^2", "theta G(s) not in (0, g(s) s^2]"));
    report.results.push_back(first_violation(
        "g5", grid,
        [&](double s) {
            const double gh = model.g_hat(s);
            if (!(gh > 0.0)) return false;
            if (s < k.R) return true;
            const double bound = k.c1 * std::pow(s, k.xi);
            return gh >= bound * (1.0 - kRelTol);
        },
        "Ghat > 0 and Ghat(s) >= c1 s^xi for s >= R", "Ghat not positive or below c1 s^xi"));
    return report;
}

GrowthBoundReport check_growth_bound(const NonlinearityModel& model, const std::vector<double>& grid)
{
    constexpr double cap = 1e6;
    const double theta = model.constants().theta;
    double hi = cap, lo = 0.0;
    std::optional<double> hi_witness, lo_witness;
    for (double s : grid) {
        const double gap = std::pow(s, theta) - s * s;
        const double G = model.primitive(s);
        if (gap > 0.0) {
            const double c = G / gap;
            if (c < hi) {
                hi = c;
                hi_witness = s;
            }
        } else if (gap < 0.0 && G < 0.0) {
            const double c = G / gap;
            if (c > lo) {
                lo = c;
                lo_witness = s;
            }
        } else if (gap == 0.0 && G < 0.0) {
            return {false, 0.0, s, "G < 0 where s^theta = s^2"};
        }
    }
    GrowthBoundReport r;
    if (hi > 0.0 && hi >= lo) {
        r.pass = true;
        r.constant = hi;
        r.detail = "G(s) >= C s^theta - C s^2 on the grid";
        return r;
    }
    r.witness = hi <= 0.0 ? hi_witness : lo_witness;
    r.detail = "no C in (0, 1e6] satisfies the bound on the grid";
    return r;
}

}  // namespace qgdirac
