#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chronon/experiments.hpp"

using namespace chronon;
using nlohmann::json;

namespace {

json scalar_schedule(double omega) {
    return json{{"kind", "constant"},
                {"h0", {{"dim", 1}, {"data", {{omega, 0.0}}}}}};
}

json harmonic_schedule_json() {
    return json::parse(R"({
      "kind": "harmonic",
      "omega": 3.0,
      "h0": {"dim": 2, "data": [[0.5,0],[0.2,-0.1],[0.2,0.1],[-0.3,0]]},
      "h1": {"dim": 2, "data": [[0.1,0],[0.4,0],[0.4,0],[0.2,0]]}
    })");
}

}  // namespace

TEST_CASE("matrix json round trip") {
    CMatrix m(2, 2);
    m(0, 0) = cplx(1.0, -2.0);
    m(0, 1) = cplx(0.25, 0.5);
    m(1, 0) = cplx(0.25, -0.5);
    m(1, 1) = cplx(-3.0, 0.0);
    const CMatrix back = matrix_from_json(matrix_to_json(m), "m");
    CHECK(max_abs_diff(m, back) == 0.0);
}

TEST_CASE("matrix json validation paths") {
    CHECK_THROWS_WITH_AS(matrix_from_json(json{{"dim", 2}}, "schedule.h0"),
                         doctest::Contains("schedule.h0.data"), ConfigError);
    json bad = json{{"dim", 1}, {"data", {{1.0}}}};
    CHECK_THROWS_WITH_AS(matrix_from_json(bad, "schedule.h0"),
                         doctest::Contains("schedule.h0.data[0]"), ConfigError);
    json wrong_count = json{{"dim", 2}, {"data", {{1.0, 0.0}}}};
    CHECK_THROWS_WITH_AS(matrix_from_json(wrong_count, "x"), doctest::Contains("4"), ConfigError);
}

TEST_CASE("schedule from json") {
    const HamiltonianSchedule h = schedule_from_json(harmonic_schedule_json(), "schedule");
    CHECK(h.kind() == ScheduleKind::harmonic);
    CHECK(h.dim() == 2);
    // non-Hermitian input is rejected through the schedule validator
    json bad = harmonic_schedule_json();
    bad["h0"]["data"][1] = {0.2, 0.1};  // breaks conjugate symmetry
    CHECK_THROWS_AS(schedule_from_json(bad, "schedule"), ConfigError);

    const json pw = json::parse(R"({
      "kind": "piecewise_constant",
      "pieces": [
        {"until": 0.5, "h": {"dim": 1, "data": [[1.0, 0.0]]}},
        {"until": 1.0, "h": {"dim": 1, "data": [[2.0, 0.0]]}}
      ]})");
    const HamiltonianSchedule p = schedule_from_json(pw, "schedule");
    CHECK(p.horizon() == 1.0);
    CHECK(p.hamiltonian(0.75)(0, 0) == cplx(2.0, 0.0));
}

TEST_CASE("intensity and chain json") {
    const IntensityProfile p =
        intensity_from_json(json{{"kind", "constant"}, {"value", 2.0}}, "intensity");
    CHECK(p.value(0.3) == 2.0);
    const IntensityProfile back = intensity_from_json(intensity_to_json(p), "intensity");
    CHECK(back.value(0.1) == 2.0);

    const Chain c = chain_from_json(json::array({0.1, 0.4}), "chain");
    CHECK(c.size() == 2);
    CHECK(chain_to_json(c) == json::array({0.1, 0.4}));
    CHECK_THROWS_AS(chain_from_json(json::array({0.4, 0.1}), "chain"), ConfigError);
}

TEST_CASE("estimate json carries exactly the method metadata") {
    PropagatorEstimate e;
    e.matrix = CMatrix::identity(2);
    e.method = PropagatorMethod::poisson_mc;
    e.mc_samples = 1000;
    e.mc_stderr = 0.25;
    e.seed = 42;
    const json j = estimate_to_json(e);
    CHECK(j.at("method") == "poisson_mc");
    CHECK(j.contains("samples"));
    CHECK(j.contains("stderr"));
    CHECK(j.contains("seed"));
    CHECK_FALSE(j.contains("order"));

    PropagatorEstimate r;
    r.matrix = CMatrix::identity(2);
    r.method = PropagatorMethod::reference;
    const json jr = estimate_to_json(r);
    CHECK_FALSE(jr.contains("samples"));
    CHECK_FALSE(jr.contains("order"));

    const PropagatorEstimate round = estimate_from_json(j, "estimate");
    CHECK(round.method == PropagatorMethod::poisson_mc);
    CHECK(round.mc_samples == 1000);
    CHECK(max_abs_diff(round.matrix, e.matrix) == 0.0);
}

TEST_CASE("config validation fails before computation") {
    json cfg{{"experiment", "compare"}};
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("schedule"), ConfigError);

    cfg["schedule"] = scalar_schedule(1.0);
    cfg["horizon"] = -1.0;
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("horizon"), ConfigError);

    cfg["horizon"] = 1.0;
    cfg["experiment"] = "unknown-thing";
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("compare experiment on the scalar oracle") {
    json cfg{{"experiment", "compare"},
             {"schedule", scalar_schedule(1.0)},
             {"horizon", 1.0},
             {"mc", {{"samples", 20000}}},
             {"seed", 20260808}};
    const ExperimentResult res = run_compare(cfg);
    CHECK(res.gates_passed);

    double dyson_defect = -1.0, mc_defect = -1.0, mc_stderr = -1.0;
    for (const auto& row : res.table.rows) {
        if (row.params == "method=dyson" && row.metric == "defect") dyson_defect = row.value;
        if (row.params == "method=poisson_mc" && row.metric == "defect") mc_defect = row.value;
        if (row.metric == "stderr_max") mc_stderr = row.value;
    }
    CHECK(dyson_defect >= 0.0);
    CHECK(dyson_defect < 1e-9);
    CHECK(mc_defect <= 5.0 * mc_stderr);
}

TEST_CASE("compare on the free Hamiltonian: all defects and variance vanish") {
    json cfg{{"experiment", "compare"},
             {"schedule", json{{"kind", "constant"},
                               {"h0", {{"dim", 2}, {"data", {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}}}}}},
             {"mc", {{"samples", 5000}}}};
    const ExperimentResult res = run_compare(cfg);
    for (const auto& row : res.table.rows) {
        if (row.metric == "defect" || row.metric == "stderr_max") CHECK(row.value == 0.0);
    }
}

TEST_CASE("header echoes defaulted parameters") {
    json cfg{{"experiment", "compare"},
             {"schedule", scalar_schedule(1.0)},
             {"mc", {{"samples", 5000}}}};
    const ExperimentResult res = run_compare(cfg);
    CHECK(res.table.header.contains("horizon"));           // defaulted
    CHECK(res.table.header.contains("reference_steps"));   // defaulted
    CHECK(res.table.header.contains("dyson.order"));       // defaulted
    CHECK(res.table.header.at("mc.samples") == 5000);      // explicit
    CHECK(res.table.header.at("norm") == "max-entry");
}

TEST_CASE("csv output is byte identical across runs and thread counts") {
    json cfg{{"experiment", "mc-sweep"},
             {"schedule", scalar_schedule(1.0)},
             {"samples_list", {500, 1000, 2000}},
             {"seed", 99},
             {"gates", false}};
    const std::string a = run_experiment(cfg).table.to_csv();
    const std::string b = run_experiment(cfg).table.to_csv();
    CHECK(a == b);

    json cfg4 = cfg;
    cfg4["threads"] = 4;
    std::string c = run_experiment(cfg4).table.to_csv();
    // thread count appears in the header; rows must be identical
    const auto rows_of = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    CHECK(rows_of(a) == rows_of(c));
}

TEST_CASE("mc sweep gates on the error scaling law") {
    json cfg{{"experiment", "mc-sweep"},
             {"schedule", scalar_schedule(1.0)},
             {"samples_list", {1000, 10000, 100000}},
             {"intensities", {0.5, 1.0, 2.0}},
             {"seed", 20260808}};
    const ExperimentResult res = run_mc_sweep(cfg);
    double slope = 0.0;
    int within = 0;
    for (const auto& row : res.table.rows) {
        if (row.metric == "stderr_loglog_slope") slope = row.value;
        if (row.metric == "within_5_stderr" && row.value == 1.0) ++within;
    }
    CHECK(std::abs(slope + 0.5) < 0.1);
    CHECK(within == 3);
    CHECK(res.gates_passed);
}

TEST_CASE("dyson converge monotone gate") {
    json cfg{{"experiment", "dyson-converge"},
             {"schedule", harmonic_schedule_json()},
             {"orders", {0, 1, 2, 3, 4, 6, 8}},
             {"horizon", 1.0}};
    const ExperimentResult res = run_dyson_converge(cfg);
    CHECK(res.gates_passed);
    // order 0 row is the distance of the reference from the identity
    double d0 = -1.0;
    for (const auto& row : res.table.rows)
        if (row.params == "order=0" && row.metric == "defect") d0 = row.value;
    CHECK(d0 > 0.1);
}
