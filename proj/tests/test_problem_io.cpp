#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

#include "plangame/problem_io.hpp"
#include "plangame/rng.hpp"
#include "support/test_support.hpp"

using namespace plangame;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

ProblemSpec workshop_spec() { return load_problem_file(testsupport::problems_dir() + "/workshop.json"); }

SolutionReport workshop_report() {
    const ProblemSpec spec = workshop_spec();
    const NormalFormGame game = build_matrix(spec.problem, spec.util, spec.solve);
    return make_report(spec, game, pure_nash(game), mixed_nash_2p(game), pareto_front(game),
                       max_welfare(game));
}

}  // namespace

TEST_CASE("the shipped problem files parse") {
    const ProblemSpec workshop = workshop_spec();
    CHECK(workshop.problem.name == "workshop");
    REQUIRE(workshop.problem.agents.size() == 2);
    CHECK(workshop.problem.agents[0].plans.size() == 2);
    CHECK(workshop.problem.agents[1].plans.size() == 2);
    CHECK(workshop.problem.init.literals.size() == 2);
    CHECK(workshop.util.goal_reward == 10.0);
    CHECK(workshop.util.infeasible_payoff == -1000.0);

    const ProblemSpec handoff = load_problem_file(testsupport::problems_dir() + "/tool_handoff.json");
    CHECK(handoff.util.goal_reward == 12.0);
    CHECK(handoff.problem.agents[0].plans[0].actions.size() == 2);
    CHECK(handoff.problem.agents[0].plans[0].owner == "A");

    const ProblemSpec couriers = load_problem_file(testsupport::problems_dir() + "/three_couriers.json");
    CHECK(couriers.problem.agents.size() == 3);
}

TEST_CASE("a minimal problem with one empty plan is valid") {
    const ProblemSpec spec = parse_problem(R"({
        "format": 1,
        "agents": [{ "name": "A", "plans": [{ "name": "idle" }] }]
    })");
    CHECK(spec.problem.agents.size() == 1);
    CHECK(spec.problem.agents[0].plans[0].actions.empty());
    CHECK(spec.util.goal_reward == 10.0);  // defaults applied
    CHECK(spec.util.delay_penalty == 1.0);
    CHECK(spec.util.infeasible_payoff == -1000.0);
}

TEST_CASE("semantic errors name the offending element") {
    const std::string shared_literal = error_of(R"({
        "format": 1,
        "agents": [{ "name": "A", "plans": [{ "name": "p", "actions": [
            { "name": "broken", "add": ["x"], "del": ["x"] }
        ]}]}]
    })");
    CHECK(shared_literal.find("broken") != std::string::npos);
    CHECK(shared_literal.find("agents[0].plans[0].actions[0]") != std::string::npos);

    const std::string duplicate_agent = error_of(R"({
        "format": 1,
        "agents": [{ "name": "A", "plans": [] }, { "name": "A", "plans": [] }]
    })");
    CHECK(duplicate_agent.find("duplicate agent name 'A'") != std::string::npos);

    const std::string duplicate_plan = error_of(R"({
        "format": 1,
        "agents": [{ "name": "A", "plans": [{ "name": "p" }, { "name": "p" }] }]
    })");
    CHECK(duplicate_plan.find("duplicate plan name 'p'") != std::string::npos);

    const std::string unknown_field = error_of(R"({
        "format": 1,
        "agents": [],
        "bogus": true
    })");
    CHECK(unknown_field.find("unknown field 'bogus'") != std::string::npos);

    const std::string unknown_config = error_of(R"({
        "format": 1,
        "config": { "goal_bonus": 3 },
        "agents": [{ "name": "A", "plans": [] }]
    })");
    CHECK(unknown_config.find("unknown field 'goal_bonus'") != std::string::npos);
    CHECK(unknown_config.find("config") != std::string::npos);

    CHECK(error_of(R"({"format": 2, "agents": []})").find("unsupported format") != std::string::npos);
    CHECK(error_of(R"({"agents": []})").find("missing required field 'format'") != std::string::npos);
    CHECK(error_of(R"({"format": 1, "agents": []})").find("non-empty") != std::string::npos);
    CHECK(error_of(R"({"format": 1, "config": {"goal_reward": 0}, "agents": [{"name":"A","plans":[]}]})")
              .find("positive") != std::string::npos);
    CHECK(error_of(R"({"format": 1, "init": [""], "agents": [{"name":"A","plans":[]}]})")
              .find("non-empty") != std::string::npos);
}

TEST_CASE("malformed json reports the source position") {
    try {
        parse_problem("{\n  \"format\": 1,\n  \"agents\": [\n");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() >= 3);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("problem files round-trip through serialization") {
    for (const char* file : {"/workshop.json", "/tool_handoff.json", "/deadlock_pair.json",
                             "/three_couriers.json"}) {
        const ProblemSpec spec = load_problem_file(testsupport::problems_dir() + file);
        const std::string text = serialize_problem(spec);
        const ProblemSpec reparsed = parse_problem(text);
        CHECK(reparsed == spec);
        CHECK(serialize_problem(reparsed) == text);
    }
}

TEST_CASE("validate_goals produces warnings in the parsed spec") {
    const ProblemSpec spec = parse_problem(R"({
        "format": 1,
        "config": { "validate_goals": true },
        "agents": [{ "name": "A", "plans": [{
            "name": "p", "goals": ["never_added"],
            "actions": [{ "name": "a", "add": ["something"] }]
        }]}]
    })");
    REQUIRE(spec.warnings.size() == 1);
    CHECK(spec.warnings[0].find("never_added") != std::string::npos);
}

TEST_CASE("render_matrix lays out payoffs, delays and markers") {
    const NormalFormGame game = testsupport::problem1_matrix();
    const std::string text = render_matrix(game, pure_nash(game));
    CHECK(text.find("15,16 (2,2) *") != std::string::npos);
    CHECK(text.find("7,18 (2,0)") != std::string::npos);
    CHECK(text.find("piB3") != std::string::npos);

    // Grid shape: one header row plus one row per first-agent strategy.
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);

    const NormalFormGame heavy = testsupport::problem2_heavy_penalty_matrix(-1000.0);
    const std::string heavy_text = render_matrix(heavy);
    CHECK(heavy_text.find("-inf,-inf") != std::string::npos);
    CHECK(heavy_text.find("7.5,9 (3,2)") != std::string::npos);
    CHECK(heavy_text.find("-1.5,16 (3,0)") != std::string::npos);
}

TEST_CASE("render_matrix grid always matches the strategy counts") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(4));
        const int cols = 1 + static_cast<int>(rng.below(4));
        const NormalFormGame game = testsupport::random_matrix(rng, {rows, cols}, -1000.0);
        const std::string text = render_matrix(game);
        CHECK(std::count(text.begin(), text.end(), '\n') == rows + 1);
    }
}

TEST_CASE("render_schedule draws one row per agent and one column per step") {
    Plan a;
    a.name = "pa";
    for (int i = 1; i <= 3; ++i) {
        a.actions.push_back(testsupport::make_action("a" + std::to_string(i), {}, {}, {}));
    }
    Plan b;
    b.name = "pb";

    ScheduleProfile profile;
    profile.feasible = true;
    profile.agents.resize(2);
    profile.agents[0].moves = {Move::real(0), Move::empty(), Move::empty(), Move::real(1), Move::real(2)};
    profile.agents[1].moves = std::vector<Move>(5, Move::empty());
    const std::string text = render_schedule({"A", "B"}, {&a, &b}, profile);
    CHECK(text.find("A  a1  \xc2\xb7  \xc2\xb7  a2  a3\n") != std::string::npos);
    CHECK(text.find("B  \xc2\xb7") != std::string::npos);

    ScheduleProfile single;
    single.feasible = true;
    single.agents.resize(1);
    single.agents[0].moves = {Move::real(0)};
    CHECK(render_schedule({"A"}, {&a}, single) == "A  a1\n");

    ScheduleProfile infeasible;
    CHECK_THROWS_AS(render_schedule({"A", "B"}, {&a, &b}, infeasible), std::invalid_argument);
}

TEST_CASE("export_nfg writes the payoff list with the first agent fastest") {
    NormalFormGame tiny({"A", "B"}, {{"s"}, {"t"}});
    tiny.at({0, 0}).payoffs = {5.0, 7.0};
    const std::string tiny_text = export_nfg(tiny, "tiny");
    CHECK(tiny_text.find("NFG 1 R \"tiny\" { \"A\" \"B\" } { 1 1 }") == 0);
    CHECK(tiny_text.find("\n\n5 7\n") != std::string::npos);

    testsupport::MatrixSpec spec;
    spec.a_payoffs = {{1, 2}, {3, 4}};
    spec.b_payoffs = {{5, 6}, {7, 8}};
    const NormalFormGame game = testsupport::make_bimatrix({"a1", "a2"}, {"b1", "b2"}, spec);
    const std::string text = export_nfg(game, "ordering");
    CHECK(text.find("{ 2 2 }") != std::string::npos);
    CHECK(text.substr(text.find("\n\n") + 2) == "1 5 3 7 2 6 4 8\n");

    NormalFormGame with_sentinel = testsupport::problem2_matrix(-1000.0);
    const std::string sentinel_text = export_nfg(with_sentinel, "sentinel");
    CHECK(sentinel_text.find("-1000 -1000") != std::string::npos);
}

TEST_CASE("exported nfg files parse back to the exact tensor") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(4));
        const int cols = 1 + static_cast<int>(rng.below(4));
        NormalFormGame game = testsupport::random_matrix(rng, {rows, cols}, -1000.0);
        // Make a few payoffs non-integral to exercise exact float text.
        game.at_flat(0).payoffs[0] = 7.5;
        game.at_flat(0).payoffs[1] = 1.0 / 1015.0;

        const NfgGame parsed = parse_nfg(export_nfg(game, "round trip \"quoted\""));
        CHECK(parsed.title == "round trip \"quoted\"");
        CHECK(parsed.players == game.agents());
        CHECK(parsed.extents == game.extents());
        REQUIRE(parsed.payoffs.size() == game.cell_count());
        for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
            CHECK(parsed.payoffs[flat] == game.at_flat(flat).payoffs);
        }
    }

    CHECK_THROWS_AS(parse_nfg("NFG 2 R \"x\" { \"A\" } { 1 }\n\n1"), ParseError);
    CHECK_THROWS_AS(parse_nfg("NFG 1 R \"x\" { \"A\" } { 2 }\n\n1"), ParseError);
    CHECK_THROWS_AS(parse_nfg("NFG 1 R \"x\" { \"A\" } { 1 }\n\n1 2"), ParseError);
}

TEST_CASE("solution reports round-trip through json") {
    const SolutionReport report = workshop_report();
    REQUIRE(report.pure.size() == 2);
    CHECK(report.mixed.size() == 1);
    CHECK(report.cells.size() == 4);
    REQUIRE(report.pure[1].schedules.size() == 2);
    CHECK(report.pure[1].schedules[0].moves.size() == 4);
    CHECK_FALSE(report.pure[1].schedules[0].moves[0].has_value());

    const std::string text = serialize_report(report);
    const SolutionReport reparsed = parse_report(text);
    CHECK(reparsed == report);
    CHECK(serialize_report(reparsed) == text);
}

TEST_CASE("report text includes the matrix, equilibria and annotations") {
    const SolutionReport report = workshop_report();
    const std::string text = render_report_text(report);
    CHECK(text.find("problem: workshop") != std::string::npos);
    CHECK(text.find("seed=0") != std::string::npos);
    CHECK(text.find("-inf,-inf") != std::string::npos);
    CHECK(text.find("16,9 (1,0) *") != std::string::npos);
    CHECK(text.find("pure equilibria: 2") != std::string::npos);
    CHECK(text.find("mixed equilibria: 1") != std::string::npos);
    CHECK(text.find("pareto front: (shelf, bench_rig) (frame, glue_mount)") != std::string::npos);
    CHECK(text.find("max welfare: (shelf, bench_rig)") != std::string::npos);
    CHECK(text.find("glue_part") != std::string::npos);
}

TEST_CASE("format_real is shortest-round-trip exact") {
    CHECK(format_real(15.0) == "15");
    CHECK(format_real(-1000.0) == "-1000");
    CHECK(format_real(0.5) == "0.5");
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const double value =
            (static_cast<double>(rng.below(2000001)) - 1000000.0) / static_cast<double>(1 + rng.below(997));
        const std::string text = format_real(value);
        CHECK(std::strtod(text.c_str(), nullptr) == value);
    }
}

TEST_CASE("format_display renders integers bare and fractions with one decimal") {
    CHECK(format_display(16.0) == "16");
    CHECK(format_display(-1000.0) == "-1000");
    CHECK(format_display(7.5) == "7.5");
    CHECK(format_display(-1.5) == "-1.5");
    CHECK(format_display(0.0) == "0");
}
