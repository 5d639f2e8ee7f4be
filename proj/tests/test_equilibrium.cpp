#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <future>

#include "plangame/equilibrium.hpp"
#include "plangame/rng.hpp"
#include "support/test_support.hpp"

using namespace plangame;
using testsupport::make_action;
using testsupport::matching_pennies;
using testsupport::problem1_matrix;
using testsupport::problem2_heavy_penalty_matrix;
using testsupport::problem2_matrix;

namespace {

const MixedProfile* find_support(const std::vector<MixedProfile>& profiles,
                                 const std::vector<std::vector<int>>& support) {
    for (const MixedProfile& profile : profiles) {
        if (!profile.degenerate && profile.support == support) {
            return &profile;
        }
    }
    return nullptr;
}

Problem workshop_problem() {
    Problem problem;
    problem.name = "workshop";
    problem.init.literals = testsupport::lits({"jig", "bench"});

    AgentPlans a;
    a.name = "A";
    Plan frame;
    frame.name = "frame";
    frame.owner = "A";
    frame.goals = {"frame_built", "frame_painted"};
    frame.actions = {make_action("weld_frame", {"jig"}, {"frame_tacked"}, {"bench"}),
                     make_action("bolt_frame", {"frame_tacked"}, {"frame_built"}, {}),
                     make_action("paint_frame", {"frame_built"}, {"frame_painted"}, {})};
    Plan shelf;
    shelf.name = "shelf";
    shelf.owner = "A";
    shelf.goals = {"shelf_up"};
    shelf.actions = {make_action("screw_shelf", {}, {"shelf_up"}, {})};
    a.plans = {frame, shelf};

    AgentPlans b;
    b.name = "B";
    Plan rig;
    rig.name = "bench_rig";
    rig.owner = "B";
    rig.goals = {"rig_mounted", "rig_tuned"};
    rig.actions = {make_action("saw_plate", {"bench"}, {"plate_cut"}, {"jig"}),
                   make_action("mount_rig", {"plate_cut"}, {"rig_mounted"}, {}),
                   make_action("tune_rig", {"rig_mounted"}, {"rig_tuned"}, {})};
    Plan glue;
    glue.name = "glue_mount";
    glue.owner = "B";
    glue.goals = {"mounted"};
    glue.actions = {make_action("glue_part", {"bench"}, {"mounted"}, {})};
    b.plans = {rig, glue};

    problem.agents = {a, b};
    return problem;
}

}  // namespace

TEST_CASE("the 3x3 reference matrix has the single equilibrium (0,0)") {
    const NormalFormGame game = problem1_matrix();
    const std::vector<Cell> equilibria = pure_nash(game);
    REQUIRE(equilibria.size() == 1);
    CHECK(equilibria[0] == Cell{0, 0});
    CHECK(game.at(equilibria[0]).payoffs == std::vector<double>{15.0, 16.0});
}

TEST_CASE("the 4x4 matrix with an unsolvable cell has two pure equilibria") {
    const NormalFormGame game = problem2_matrix(-1000.0);
    const std::vector<Cell> equilibria = pure_nash(game);
    REQUIRE(equilibria.size() == 2);
    CHECK(equilibria[0] == Cell{1, 0});
    CHECK(equilibria[1] == Cell{0, 1});
    CHECK(game.at({0, 1}).payoffs == std::vector<double>{15.0, 14.0});
    CHECK(game.at({1, 0}).payoffs == std::vector<double>{14.0, 15.0});
}

TEST_CASE("raising the delay penalty moves the equilibria") {
    const NormalFormGame game = problem2_heavy_penalty_matrix(-1000.0);
    const std::vector<Cell> equilibria = pure_nash(game);
    // Under the weak-inequality deviation check, (piA2, piB4) with payoffs
    // (16,9) ties (piA2, piB2) for the column player and is an equilibrium
    // as well.
    REQUIRE(equilibria.size() == 2);
    CHECK(equilibria[0] == Cell{1, 1});
    CHECK(equilibria[1] == Cell{1, 3});
    CHECK(game.at({1, 1}).payoffs == std::vector<double>{9.0, 9.0});
    CHECK(game.at({1, 3}).payoffs == std::vector<double>{16.0, 9.0});
    CHECK(verify_equilibrium(game, {1, 1}));
    CHECK(verify_equilibrium(game, {1, 3}));
}

TEST_CASE("infeasible cells are never reported as equilibria") {
    NormalFormGame game({"A", "B"}, {{"x"}, {"y"}});
    CellOutcome& cell = game.at({0, 0});
    cell.feasible = false;
    cell.payoffs = {-1000.0, -1000.0};
    CHECK(pure_nash(game).empty());
    CHECK(pareto_front(game).empty());
    CHECK(max_welfare(game).empty());
    CHECK_FALSE(verify_equilibrium(game, {0, 0}));
}

TEST_CASE("pareto front of the heavy-penalty matrix") {
    const NormalFormGame game = problem2_heavy_penalty_matrix(-1000.0);
    const std::vector<Cell> front = pareto_front(game);
    CHECK(std::count(front.begin(), front.end(), Cell{1, 3}) == 1);  // payoffs (16,9)
    for (const Cell& cell : {Cell{0, 2}, Cell{1, 3}, Cell{2, 1}, Cell{3, 0}}) {
        CHECK(std::count(front.begin(), front.end(), cell) == 1);
    }
    CHECK(front.size() == 4);
}

TEST_CASE("equal payoff vectors stay on the pareto front together") {
    NormalFormGame game({"A", "B"}, {{"x1", "x2"}, {"y"}});
    game.at({0, 0}).payoffs = {3.0, 3.0};
    game.at({1, 0}).payoffs = {3.0, 3.0};
    const std::vector<Cell> front = pareto_front(game);
    CHECK(front.size() == 2);
}

TEST_CASE("max welfare scans feasible cells") {
    CHECK(max_welfare(problem1_matrix()) == std::vector<Cell>{{0, 0}});  // sum 31
    CHECK(max_welfare(problem2_heavy_penalty_matrix(-1000.0)) == std::vector<Cell>{{1, 3}});  // sum 25

    NormalFormGame flat({"A", "B"}, {{"x1", "x2"}, {"y1", "y2"}});
    for (std::size_t i = 0; i < flat.cell_count(); ++i) {
        flat.at_flat(i).payoffs = {2.0, 2.0};
    }
    CHECK(max_welfare(flat).size() == 4);
}

TEST_CASE("support enumeration finds the sentinel-driven mixed equilibrium") {
    const double sentinel = -1000.0;
    const NormalFormGame game = problem2_matrix(sentinel);
    const std::vector<MixedProfile> profiles = mixed_nash_2p(game);

    const MixedProfile* mixed = find_support(profiles, {{0, 1}, {0, 1}});
    REQUIRE(mixed != nullptr);
    const double q = 1.0 / (std::fabs(sentinel) + 15.0);
    CHECK(testsupport::close(mixed->probabilities[0][0], q));
    CHECK(testsupport::close(mixed->probabilities[0][1], 1.0 - q));
    CHECK(testsupport::close(mixed->probabilities[1][0], q));
    CHECK(testsupport::close(mixed->probabilities[1][1], 1.0 - q));
    CHECK(testsupport::close(mixed->payoffs[0], 14.0));
    CHECK(testsupport::close(mixed->payoffs[1], 14.0));
    CHECK(verify_equilibrium(game, *mixed));

    // The two pure equilibria appear as singleton supports.
    CHECK(find_support(profiles, {{0}, {1}}) != nullptr);
    CHECK(find_support(profiles, {{1}, {0}}) != nullptr);
}

TEST_CASE("matching pennies mixes uniformly") {
    const NormalFormGame game = matching_pennies();
    CHECK(pure_nash(game).empty());
    const std::vector<MixedProfile> profiles = mixed_nash_2p(game);
    REQUIRE(profiles.size() == 1);
    const MixedProfile& mixed = profiles[0];
    CHECK_FALSE(mixed.degenerate);
    for (int agent = 0; agent < 2; ++agent) {
        CHECK(testsupport::close(mixed.probabilities[agent][0], 0.5));
        CHECK(testsupport::close(mixed.probabilities[agent][1], 0.5));
    }
    CHECK(verify_equilibrium(game, mixed));

    MixedProfile skewed = mixed;
    skewed.probabilities[0] = {0.6, 0.4};
    CHECK_FALSE(verify_equilibrium(game, skewed));
}

TEST_CASE("strictly dominant strategies leave only the pure profile") {
    testsupport::MatrixSpec spec;
    spec.a_payoffs = {{5, 4}, {1, 0}};
    spec.b_payoffs = {{3, 1}, {2, 0}};
    const NormalFormGame game = testsupport::make_bimatrix({"a1", "a2"}, {"b1", "b2"}, spec);
    const std::vector<MixedProfile> profiles = mixed_nash_2p(game);
    REQUIRE(profiles.size() == 1);
    CHECK(profiles[0].support == std::vector<std::vector<int>>{{0}, {0}});
    CHECK(pure_nash(game) == std::vector<Cell>{{0, 0}});
}

TEST_CASE("verify_equilibrium rechecks unilateral deviations") {
    const NormalFormGame game = problem1_matrix();
    CHECK(verify_equilibrium(game, {0, 0}));
    CHECK_FALSE(verify_equilibrium(game, {2, 2}));  // the row player prefers row 0
}

TEST_CASE("pure_nash matches the brute-force oracle on random matrices") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(5));
        const int cols = 1 + static_cast<int>(rng.below(5));
        const NormalFormGame game = testsupport::random_matrix(rng, {rows, cols}, -1000.0);
        CHECK(pure_nash(game) == testsupport::brute_force_pure_nash(game));
    }
    for (int trial = 0; trial < 30; ++trial) {
        const NormalFormGame game = testsupport::random_matrix(
            rng,
            {1 + static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(3)),
             1 + static_cast<int>(rng.below(3))},
            -1000.0);
        CHECK(pure_nash(game) == testsupport::brute_force_pure_nash(game));
    }
}

TEST_CASE("positive affine payoff transformations preserve the equilibrium set") {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(5));
        const int cols = 1 + static_cast<int>(rng.below(5));
        NormalFormGame game = testsupport::random_matrix(rng, {rows, cols}, -1000.0);
        const std::vector<Cell> before = pure_nash(game);

        const double scale_a = 0.5 + 0.25 * static_cast<double>(rng.below(8));
        const double scale_b = 0.5 + 0.25 * static_cast<double>(rng.below(8));
        const double shift_a = static_cast<double>(rng.below(21)) - 10.0;
        const double shift_b = static_cast<double>(rng.below(21)) - 10.0;
        for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
            CellOutcome& cell = game.at_flat(flat);
            cell.payoffs[0] = scale_a * cell.payoffs[0] + shift_a;
            cell.payoffs[1] = scale_b * cell.payoffs[1] + shift_b;
        }
        CHECK(pure_nash(game) == before);
    }
}

TEST_CASE("all reported mixed profiles survive verification on random games") {
    Rng rng(7777);
    int produced = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int rows = 2 + static_cast<int>(rng.below(2));
        const int cols = 2 + static_cast<int>(rng.below(2));
        const NormalFormGame game = testsupport::random_matrix(rng, {rows, cols}, -1000.0);
        for (const MixedProfile& profile : mixed_nash_2p(game)) {
            if (profile.degenerate) {
                continue;
            }
            ++produced;
            CHECK(verify_equilibrium(game, profile));
            double sum0 = 0.0, sum1 = 0.0;
            for (double p : profile.probabilities[0]) {
                sum0 += p;
            }
            for (double p : profile.probabilities[1]) {
                sum1 += p;
            }
            CHECK(std::fabs(sum0 - 1.0) <= 1e-9);
            CHECK(std::fabs(sum1 - 1.0) <= 1e-9);
        }
    }
    CHECK(produced > 50);
}

TEST_CASE("mixed_nash_2p rejects games without exactly two agents") {
    Rng rng(1);
    const NormalFormGame game = testsupport::random_matrix(rng, {2, 2, 2}, -1000.0);
    CHECK_THROWS_AS(mixed_nash_2p(game), std::invalid_argument);
}

TEST_CASE("build_matrix fills every cell from the internal game") {
    const Problem problem = workshop_problem();
    UtilityConfig cfg;
    SolveOptions opts;
    const NormalFormGame game = build_matrix(problem, cfg, opts);

    REQUIRE(game.extents() == std::vector<int>{2, 2});
    CHECK_FALSE(game.at({0, 0}).feasible);
    CHECK(game.at({0, 0}).payoffs == std::vector<double>{-1000.0, -1000.0});
    CHECK(game.at({0, 1}).payoffs == std::vector<double>{16.0, 9.0});
    CHECK(game.at({0, 1}).delays == std::vector<int>{1, 0});
    CHECK(game.at({1, 0}).payoffs == std::vector<double>{9.0, 17.0});
    CHECK(game.at({1, 0}).delays == std::vector<int>{0, 0});
    CHECK(game.at({1, 1}).payoffs == std::vector<double>{9.0, 9.0});

    const std::vector<Cell> equilibria = pure_nash(game);
    REQUIRE(equilibria.size() == 2);
    CHECK(equilibria[0] == Cell{1, 0});
    CHECK(equilibria[1] == Cell{0, 1});

    // Per-cell details carry the equilibrium schedules.
    REQUIRE(game.at({0, 1}).detail.has_value());
    CHECK(game.at({0, 1}).detail->profile.agents[0].delay == 1);
}

TEST_CASE("a single-agent problem yields a one-dimensional tensor") {
    Problem problem;
    problem.name = "solo";
    AgentPlans agent;
    agent.name = "A";
    for (int i = 0; i < 3; ++i) {
        Plan plan;
        plan.name = "p" + std::to_string(i);
        plan.owner = "A";
        plan.goals = {"g"};
        for (int k = 0; k <= i; ++k) {
            plan.actions.push_back(make_action("a" + std::to_string(k), {}, {}, {}));
        }
        agent.plans.push_back(plan);
    }
    problem.agents = {agent};
    const NormalFormGame game = build_matrix(problem, UtilityConfig{}, SolveOptions{});
    REQUIRE(game.extents() == std::vector<int>{3});
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        CHECK(game.at_flat(flat).delays == std::vector<int>{0});
        CHECK(game.at_flat(flat).feasible);
    }
    CHECK(game.at({0}).payoffs == std::vector<double>{9.0});
    CHECK(game.at({2}).payoffs == std::vector<double>{7.0});
}

TEST_CASE("non-interacting three-plan agents give a full 3x3 matrix") {
    Problem problem;
    problem.name = "independent";
    for (const char* agent_name : {"A", "B"}) {
        const std::string name = agent_name;
        AgentPlans agent;
        agent.name = name;
        for (int i = 0; i < 3; ++i) {
            Plan plan;
            plan.name = name + "_p" + std::to_string(i);
            plan.owner = name;
            plan.goals = {"g_" + name};
            plan.actions.push_back(make_action(name + "_act" + std::to_string(i), {}, {name + "_done"}, {}));
            agent.plans.push_back(plan);
        }
        problem.agents.push_back(agent);
    }
    const NormalFormGame game = build_matrix(problem, UtilityConfig{}, SolveOptions{});
    REQUIRE(game.extents() == std::vector<int>{3, 3});
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        CHECK(game.at_flat(flat).feasible);
        CHECK(game.at_flat(flat).payoffs == std::vector<double>{9.0, 9.0});
    }
}

TEST_CASE("build_matrix rejects empty strategy sets and bad sentinels") {
    Problem problem = workshop_problem();
    problem.agents[1].plans.clear();
    CHECK_THROWS_AS(build_matrix(problem, UtilityConfig{}, SolveOptions{}), std::invalid_argument);

    Problem ok = workshop_problem();
    UtilityConfig bad_sentinel;
    bad_sentinel.infeasible_payoff = 5.0;  // not below the lowest reachable utility
    CHECK_THROWS_AS(build_matrix(ok, bad_sentinel, SolveOptions{}), std::invalid_argument);
}

TEST_CASE("cells are pure functions: concurrent evaluation matches the build") {
    const Problem problem = workshop_problem();
    UtilityConfig cfg;
    SolveOptions opts;
    opts.seed = 42;
    const NormalFormGame game = build_matrix(problem, cfg, opts);

    std::vector<std::future<SolveResult>> futures;
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        futures.push_back(std::async(std::launch::async, [&, flat] {
            const Cell cell = game.cell_at(flat);
            std::vector<const Plan*> profile;
            for (std::size_t i = 0; i < cell.size(); ++i) {
                profile.push_back(&problem.agents[i].plans[cell[i]]);
            }
            SolveOptions cell_opts = opts;
            cell_opts.seed = cell_seed(opts.seed, flat);
            return solve_schedule_game(profile, problem.init, cfg, cell_opts);
        }));
    }
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const SolveResult result = futures[flat].get();
        CHECK(result.payoffs == game.at_flat(flat).payoffs);
        CHECK(result.profile.feasible == game.at_flat(flat).feasible);
        CHECK(result.agent_order == game.at_flat(flat).detail->agent_order);
    }
}
