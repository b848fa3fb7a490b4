#include "support.hpp"

#include "qgdirac/limit.hpp"

#include <doctest.h>

#include <cmath>

using namespace qgdirac;
using namespace qgdirac::testing;

namespace {

ExperimentTable synthetic(const std::vector<double>& cs, const std::function<double(double)>& f)
{
    ExperimentTable t;
    t.m = 0.2;
    t.nu = -1.0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        ExperimentRow r;
        r.n = i;
        r.c = cs[i];
        r.v_H1 = r.v_L2 = r.u_err_H1 = f(cs[i]);
        r.psi_Linf = r.psi_H1 = r.psi_L4 = 1.0;
        t.rows.push_back(r);
    }
    return t;
}

}  // namespace

TEST_CASE("schedule arithmetic")
{
    auto s = make_schedule(1.0, -1.0, {10.0, 1000.0});
    REQUIRE(s.size() == 2);
    CHECK(s.default_rule);
    CHECK(s.entries[0].omega == doctest::Approx(99.5).epsilon(1e-15));
    CHECK(s.entries[0].b == doctest::Approx(1.995).epsilon(1e-14));
    CHECK(s.entries[0].a == doctest::Approx(0.9975).epsilon(1e-14));
    CHECK(s.entries[1].b == doctest::Approx(1.9999995).epsilon(1e-12));
    CHECK(s.entries[1].a == doctest::Approx(0.99999975).epsilon(1e-12));

    CHECK_THROWS_AS(make_schedule(0.2, -1.0, {1.0}), std::invalid_argument);  // omega <= 0
    CHECK_THROWS_AS(make_schedule(0.2, -1.0, {8.0, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(0.2, -1.0, {8.0, 8.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(0.0, -1.0, {8.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(0.2, 1.0, {8.0}), std::invalid_argument);
    CHECK(make_schedule(0.2, -1.0, {}).empty());

    CHECK_THROWS_AS(make_schedule_from_pairs(0.2, -1.0, {{4.0, 3.2}}), std::invalid_argument);  // omega = m c^2
    auto custom = make_schedule_from_pairs(0.2, -1.0, {{4.0, 0.5}, {8.0, 11.0}});
    CHECK_FALSE(custom.default_rule);
    CHECK(custom.entries[1].b == doctest::Approx((12.8 + 11.0) / 64.0));
}

TEST_CASE("schedule limits (property)")
{
    Gen gen(2);
    for (int trial = 0; trial < 100; ++trial) {
        const double m = gen.uniform(0.05, 3.0), nu = -gen.uniform(0.05, 5.0);
        std::vector<double> cs;
        double c = std::sqrt(-nu / (2.0 * m * m)) * gen.uniform(1.1, 3.0);
        for (int k = 0; k < 6; ++k, c *= gen.uniform(1.2, 3.0)) cs.push_back(c);
        auto s = make_schedule(m, nu, cs);
        double last_gap = std::numeric_limits<double>::infinity();
        for (const auto& e : s.entries) {
            CHECK(std::abs(e.b - 2.0 * m - nu / (2.0 * m * e.c * e.c)) <= 1e-12 * e.b);
            CHECK(e.a == doctest::Approx((m * e.c * e.c - e.omega) * e.b).epsilon(1e-12));
            const double gap = std::abs(e.a + nu);
            CHECK(gap <= last_gap);
            last_gap = gap;
        }
    }
}

TEST_CASE("line fits and rates")
{
    auto fit = fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_line({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_line({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);

    const std::vector<double> cs{4.0, 8.0, 16.0, 32.0};
    for (double beta : {0.5, 1.0, 2.0}) {
        auto t = synthetic(cs, [beta](double c) { return 7.0 * std::pow(c, -beta); });
        for (auto col : {RateColumn::v_H1, RateColumn::v_L2, RateColumn::u_err}) {
            auto r = fit_rate(t, col);
            CHECK(r.slope == doctest::Approx(-beta).epsilon(1e-8));
            CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(fit_rate(synthetic({4.0, 8.0}, [](double c) { return 1.0 / c; }), RateColumn::v_H1),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_rate(synthetic(cs, [](double) { return 0.0; }), RateColumn::v_H1), std::invalid_argument);
    CHECK(std::string(to_string(RateColumn::u_err)) == "u_err_H1");

    auto summary = summarize_rates(synthetic(cs, [](double c) { return 3.0 / c; }));
    REQUIRE(summary.size() == 3);
    for (const auto& s : summary) CHECK(s.pass);
    auto steep = summarize_rates(synthetic(cs, [](double c) { return 3.0 / (c * c); }));
    CHECK_FALSE(steep[0].pass);
    CHECK(steep[2].pass);  // only a negative slope is expected of u_err
}

TEST_CASE("decay fit on a synthetic exponential")
{
    auto mesh = build_mesh(line_graph(), 0.01, 30.0);
    auto f = sample(mesh, [](const MeshEdge&, double x) { return 3.0 * std::exp(-2.0 * x); });
    auto fit = fit_decay(f);
    CHECK(fit.rate == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(fit.rates.size() == 2);

    SpinorFunction<double> psi(mesh);
    psi.u = f;
    psi.w = sample_half(mesh, [](const MeshEdge&, double x) { return 0.5 * std::exp(-2.0 * x); });
    CHECK(fit_decay(psi).rate == doctest::Approx(2.0).epsilon(1e-4));

    CHECK_THROWS_AS(fit_decay(GraphFunction<double>(mesh)), std::invalid_argument);
    auto compact = build_mesh(interval_graph(2.0), 0.01, 1.0);
    CHECK_THROWS_AS(fit_decay(sample(compact, [](const MeshEdge&, double x) { return std::exp(-x); })),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_decay(f, 0.7), std::invalid_argument);
}

TEST_CASE("bounds report")
{
    ExperimentTable t;
    for (int i = 0; i < 4; ++i) {
        ExperimentRow r;
        r.psi_Linf = 2.2;
        r.psi_H1 = 3.0 + 0.01 * i;
        r.psi_L4 = 2.0;
        t.rows.push_back(r);
    }
    auto b = bounds_report(t);
    CHECK(b.pass());
    CHECK(b.max_H1 == doctest::Approx(3.03));
    t.rows.back().psi_L4 = 4.0;
    b = bounds_report(t);
    CHECK_FALSE(b.pass_L4);
    CHECK(b.pass_Linf);
    CHECK_FALSE(b.pass());
    t.rows.resize(1);
    CHECK_THROWS_AS(bounds_report(t), std::invalid_argument);
}

TEST_CASE("empty schedule gives an empty table")
{
    auto sweep = run_limit_sweep(make_schedule(0.2, -1.0, {}), line_graph(), std::make_shared<PowerLaw>(4.0),
                                 MeshConfig{0.05, 30.0, 20.0, 2});
    CHECK(sweep.table.rows.empty());
    CHECK_FALSE(sweep.table.partial);
}

TEST_CASE("coarse limit sweep on the line")
{
    MeshConfig cfg;
    cfg.step = 0.02;
    auto sweep = run_limit_sweep(make_schedule(0.2, -1.0, {4.0, 8.0, 16.0, 32.0}), line_graph(),
                                 std::make_shared<PowerLaw>(4.0), cfg);
    const auto& t = sweep.table;
    REQUIRE_FALSE(t.partial);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.nls_residual <= 1e-10);
    CHECK(t.nls_decay_rate == doctest::Approx(1.0).epsilon(0.05));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        CHECK(r.residual <= 1e-10);
        CHECK(r.decay_rate == doctest::Approx(r.decay_expected).epsilon(0.1));
        CHECK(r.decay_expected == doctest::Approx(nlde_decay_rate(0.2, r.c, r.omega)));
        CHECK(r.psi_L4 > 0.0);
        if (i > 0) {
            CHECK(r.v_H1 < t.rows[i - 1].v_H1);
            CHECK(r.u_err_H1 < t.rows[i - 1].u_err_H1);
            CHECK(r.decay_expected > t.rows[i - 1].decay_expected);
        }
    }
    auto rate = fit_rate(t, RateColumn::v_H1);
    CHECK(rate.slope == doctest::Approx(-1.0).epsilon(0.3));
    CHECK(bounds_report(t).pass());
}

TEST_CASE("Gagliardo-Nirenberg ratio is a finite diagnostic")
{
    auto mesh = build_mesh(star3_graph(), 0.05, 10.0);
    auto gn = gagliardo_nirenberg_ratio(mesh, 4.0, 50);
    CHECK(gn.samples == 50);
    CHECK(std::isfinite(gn.max_ratio));
    CHECK(gn.max_ratio > 0.0);
    CHECK(gagliardo_nirenberg_ratio(mesh, 4.0, 50).max_ratio == gn.max_ratio);  // seeded
    CHECK_THROWS_AS(gagliardo_nirenberg_ratio(mesh, 1.5, 5), std::invalid_argument);
}
