#include "support.hpp"

#include "qgdirac/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace qgdirac;
using namespace qgdirac::testing;

TEST_CASE("real formatting is lossless and locale independent")
{
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(-2.5) == "-2.5");
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1e-5) == "1.0000000000000001e-05");
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(format_integer(-42) == "-42");

    Gen gen(1);
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = gen.normal() * std::pow(10.0, gen.integer(-300, 300));
        CHECK(parse_real(format_real(x)) == x);
    }
    CHECK_THROWS_AS(parse_real("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_real(""), std::invalid_argument);
}

TEST_CASE("csv golden text")
{
    CsvTable t{{"c", "omega", "note"}, {}};
    t.rows.push_back({format_real(4.0), format_real(0.7), "plain"});
    t.rows.push_back({format_real(32.0), format_real(202.3), "has,comma"});
    t.rows.push_back({"", "", "say \"hi\""});
    const std::string golden = "c,omega,note\n"
                               "4,0.69999999999999996,plain\n"
                               "32,202.30000000000001,\"has,comma\"\n"
                               ",,\"say \"\"hi\"\"\"\n";
    CHECK(format_csv(t) == golden);

    auto back = parse_csv(golden);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);

    CsvTable empty{{"a", "b"}, {}};
    CHECK(format_csv(empty) == "a,b\n");
    CHECK(parse_csv("a,b\n").rows.empty());
    CHECK(parse_csv("a,b\r\n1,2\r\n").rows.size() == 1);

    CHECK_THROWS_AS(parse_csv(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv("a\n\"open\n"), std::invalid_argument);
    CsvTable ragged{{"a", "b"}, {{"1"}}};
    CHECK_THROWS(format_csv(ragged));
}

TEST_CASE("csv files")
{
    const auto dir = std::filesystem::temp_directory_path() / "qgdirac_test_io";
    std::filesystem::create_directories(dir);
    CsvTable t{{"x"}, {{"1"}, {"2"}}};
    write_csv(t, dir / "t.csv");
    CHECK(read_csv(dir / "t.csv").rows == t.rows);
    CHECK_THROWS_AS(write_csv(t, dir / "missing" / "t.csv"), IoError);
    CHECK_THROWS_AS(read_csv(dir / "absent.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("solution files round-trip exactly")
{
    Gen gen(17);
    for (const auto& g : {line_graph(), star3_graph(), tadpole_graph()}) {
        auto mesh = build_mesh(g, 0.07, 3.0);
        for (int trial = 0; trial < 5; ++trial) {
            SpinorFunction<double> psi(mesh);
            psi.u.values = gen.vector(mesh->num_nodes) * std::pow(10.0, gen.integer(-20, 20));
            psi.w.values = gen.vector(mesh->num_half_nodes);
            const std::string text = format_csv(solution_table(psi));
            auto back = parse_solution(parse_csv(text), mesh);
            CHECK(back.u.values == psi.u.values);
            CHECK(back.w.values == psi.w.values);
            CHECK(format_csv(solution_table(back)) == text);
        }
    }
}

TEST_CASE("solution table layout")
{
    auto mesh = build_mesh(interval_graph(1.0), 0.2, 1.0);
    GraphFunction<double> u = sample(mesh, [](const MeshEdge&, double x) { return x; });
    auto t = solution_table(u);
    CHECK(t.columns == std::vector<std::string>{"edge_id", "x", "u", "w"});
    REQUIRE(t.rows.size() == 6);
    CHECK(t.rows[1] == std::vector<std::string>{"e", "0.20000000000000001", "0.20000000000000001", ""});

    SpinorFunction<double> psi(mesh);
    auto st = solution_table(psi);
    CHECK(st.rows.size() == 11);
    CHECK(st.rows[1][1] == "0.10000000000000001");  // first half-node
    CHECK(st.rows[1][2].empty());
}

TEST_CASE("malformed solution files")
{
    auto mesh = build_mesh(interval_graph(1.0), 0.2, 1.0);
    auto parse = [&](const std::string& body) { return parse_solution(parse_csv("edge_id,x,u,w\n" + body), mesh); };
    CHECK_THROWS_AS(parse("e,0.2,1,2\n"), std::invalid_argument);    // both components
    CHECK_THROWS_AS(parse("e,0.25,1,\n"), std::invalid_argument);    // not a node
    CHECK_THROWS_AS(parse("e,0.2,,1\n"), std::invalid_argument);     // not a half-node
    CHECK_THROWS_AS(parse("f,0.2,1,\n"), std::invalid_argument);     // unknown edge
    CHECK_THROWS_AS(parse_solution(parse_csv("a,b\n"), mesh), std::invalid_argument);
    CHECK(parse("e,0.4,3,\n").u.values[mesh->edges[0].nodes[2]] == 3.0);
}

TEST_CASE("report and history tables")
{
    SolveReport rep;
    rep.status = SolveStatus::converged;
    rep.converged = true;
    rep.iterations = 2;
    rep.residual = 1e-12;
    rep.residual_history = {1.0, 1e-3, 1e-12};
    rep.damping_history = {0.5, 1.0};
    auto r = report_table(rep, {{"c", "8"}});
    CHECK(r.rows.front() == std::vector<std::string>{"status", "converged"});
    CHECK(r.rows.back() == std::vector<std::string>{"c", "8"});
    auto h = history_table(rep);
    REQUIRE(h.rows.size() == 3);
    CHECK(h.rows[0][2].empty());
    CHECK(h.rows[1][2] == "0.5");
    CHECK(std::string(to_string(SolveStatus::boundary_contaminated)) == "boundary_contaminated");
}

TEST_CASE("hypothesis table")
{
    PowerLaw model(4.0);
    const auto grid = log_grid();
    auto t = hypothesis_table(check_hypotheses(model, grid), check_growth_bound(model, grid));
    CHECK(t.columns == std::vector<std::string>{"hypothesis", "pass", "witness_s", "detail"});
    REQUIRE(t.rows.size() == 7);
    CHECK(t.rows.back()[0] == "growth_bound");
    for (const auto& row : t.rows) CHECK(row[1] == "true");
}
