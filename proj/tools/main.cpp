#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plangame/equilibrium.hpp"
#include "plangame/problem_io.hpp"
#include "plangame/schedule_game.hpp"
#include "plangame/strips.hpp"

namespace {

using namespace plangame;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoEquilibrium = 2;
constexpr int kExitVerifyFailed = 3;

struct CommonOptions {
    std::string input;
    std::string output;
    std::string format = "text";
    bool verify = false;

    // Overrides; only applied when the flag was passed.
    double penalty = 0.0;
    double goal_reward = 0.0;
    double sentinel = 0.0;
    std::uint64_t seed = 0;
    std::string agent_order;
    std::string tie_break;

    CLI::Option* penalty_opt = nullptr;
    CLI::Option* goal_reward_opt = nullptr;
    CLI::Option* sentinel_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("input", opts.input, "problem file")->required();
    opts.penalty_opt = cmd->add_option("--penalty", opts.penalty, "delay penalty override");
    opts.goal_reward_opt = cmd->add_option("--goal-reward", opts.goal_reward, "goal reward override");
    opts.sentinel_opt = cmd->add_option("--sentinel", opts.sentinel, "infeasible payoff override");
    opts.seed_opt = cmd->add_option("--seed", opts.seed, "seed override");
    cmd->add_option("--agent-order", opts.agent_order, "agent order mode")
        ->check(CLI::IsMember({"seeded", "declared"}));
    cmd->add_option("--tie-break", opts.tie_break, "tie-break mode")
        ->check(CLI::IsMember({"action-first", "seeded"}));
    cmd->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"text", "structured"}));
    cmd->add_flag("--verify", opts.verify, "re-check every reported equilibrium");
    cmd->add_option("--output", opts.output, "write output to this path instead of stdout");
}

ProblemSpec load_with_overrides(const CommonOptions& opts) {
    ProblemSpec spec = load_problem_file(opts.input);
    if (opts.penalty_opt->count() > 0) {
        if (opts.penalty < 0.0) {
            throw std::runtime_error("--penalty must be non-negative");
        }
        spec.util.delay_penalty = opts.penalty;
    }
    if (opts.goal_reward_opt->count() > 0) {
        if (opts.goal_reward <= 0.0) {
            throw std::runtime_error("--goal-reward must be positive");
        }
        spec.util.goal_reward = opts.goal_reward;
    }
    if (opts.sentinel_opt->count() > 0) {
        spec.util.infeasible_payoff = opts.sentinel;
    }
    if (opts.seed_opt->count() > 0) {
        spec.solve.seed = opts.seed;
    }
    if (!opts.agent_order.empty()) {
        spec.solve.agent_order =
            opts.agent_order == "seeded" ? AgentOrderMode::seeded : AgentOrderMode::declared;
    }
    if (!opts.tie_break.empty()) {
        spec.solve.tie_break =
            opts.tie_break == "action-first" ? TieBreakMode::action_first : TieBreakMode::seeded;
    }
    return spec;
}

int emit(const CommonOptions& opts, const std::string& text) {
    if (opts.output.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(opts.output, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write to " << opts.output << "\n";
        return kExitInputError;
    }
    out << text;
    return kExitOk;
}

int cmd_solve(const CommonOptions& opts, bool render_matrix_only) {
    const ProblemSpec spec = load_with_overrides(opts);
    const NormalFormGame game = build_matrix(spec.problem, spec.util, spec.solve);
    const std::vector<Cell> pure = pure_nash(game);
    std::vector<MixedProfile> mixed;
    if (game.num_agents() == 2) {
        mixed = mixed_nash_2p(game);
    }
    const std::vector<Cell> pareto = pareto_front(game);
    const std::vector<Cell> welfare = max_welfare(game);
    const SolutionReport report = make_report(spec, game, pure, mixed, pareto, welfare);

    if (opts.verify) {
        for (const Cell& cell : pure) {
            if (!verify_equilibrium(game, cell)) {
                std::cerr << "verification failed for a reported pure equilibrium\n";
                return kExitVerifyFailed;
            }
        }
        for (const MixedProfile& profile : mixed) {
            if (!profile.degenerate && !verify_equilibrium(game, profile)) {
                std::cerr << "verification failed for a reported mixed equilibrium\n";
                return kExitVerifyFailed;
            }
        }
    }

    std::string text;
    if (render_matrix_only) {
        text = render_matrix(game, pure);
    } else if (opts.format == "structured") {
        text = serialize_report(report);
    } else {
        text = render_report_text(report);
    }
    const int status = emit(opts, text);
    if (status != kExitOk) {
        return status;
    }
    if (render_matrix_only) {
        return kExitOk;
    }
    const bool any_equilibrium = !report.pure.empty() || !report.mixed.empty();
    return any_equilibrium ? kExitOk : kExitNoEquilibrium;
}

int cmd_spe(const CommonOptions& opts, const std::vector<std::string>& selections) {
    const ProblemSpec spec = load_with_overrides(opts);
    std::map<std::string, std::string> chosen;
    for (const std::string& selection : selections) {
        const std::size_t eq = selection.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --plan expects AGENT=PLAN, got '" << selection << "'\n";
            return kExitInputError;
        }
        chosen[selection.substr(0, eq)] = selection.substr(eq + 1);
    }

    Cell cell;
    std::vector<const Plan*> profile;
    for (const AgentPlans& agent : spec.problem.agents) {
        auto it = chosen.find(agent.name);
        if (it == chosen.end()) {
            std::cerr << "error: no plan selected for agent '" << agent.name << "' (use --plan "
                      << agent.name << "=<plan>)\n";
            return kExitInputError;
        }
        int index = -1;
        for (std::size_t p = 0; p < agent.plans.size(); ++p) {
            if (agent.plans[p].name == it->second) {
                index = static_cast<int>(p);
                break;
            }
        }
        if (index < 0) {
            std::cerr << "error: agent '" << agent.name << "' has no plan named '" << it->second
                      << "'; valid plans:";
            for (const Plan& plan : agent.plans) {
                std::cerr << " " << plan.name;
            }
            std::cerr << "\n";
            return kExitInputError;
        }
        cell.push_back(index);
        profile.push_back(&agent.plans[index]);
        chosen.erase(it);
    }
    if (!chosen.empty()) {
        std::cerr << "error: unknown agent '" << chosen.begin()->first << "' in --plan selection\n";
        return kExitInputError;
    }

    // Match the per-cell seed that a full matrix build would use for this cell.
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        flat += stride * static_cast<std::size_t>(cell[i]);
        stride *= spec.problem.agents[i].plans.size();
    }
    SolveOptions solve_opts = spec.solve;
    solve_opts.seed = cell_seed(spec.solve.seed, flat);

    const SolveResult result = solve_schedule_game(profile, spec.problem.init, spec.util, solve_opts);

    std::vector<std::string> agent_names;
    for (const AgentPlans& agent : spec.problem.agents) {
        agent_names.push_back(agent.name);
    }

    std::ostringstream out;
    out << "profile:";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        out << " " << agent_names[i] << "=" << profile[i]->name;
    }
    out << "\n";
    if (result.profile.feasible) {
        out << render_schedule(agent_names, profile, result.profile);
    } else {
        out << "infeasible: no valid joint schedule exists for this profile\n";
    }
    out << "payoffs:";
    for (double payoff : result.payoffs) {
        out << " " << format_display(payoff);
    }
    out << "\ndelays:";
    for (const AgentSchedule& sched : result.profile.agents) {
        out << " " << sched.delay;
    }
    out << "\nagent order:";
    for (int agent : result.agent_order) {
        out << " " << agent_names[agent];
    }
    out << "\ntree: " << result.stats.nodes << " nodes, " << result.stats.terminals << " terminals, "
        << result.stats.pruned << " pruned\n";
    return emit(opts, out.str());
}

int cmd_export(const CommonOptions& opts) {
    const ProblemSpec spec = load_with_overrides(opts);
    const NormalFormGame game = build_matrix(spec.problem, spec.util, spec.solve);
    const std::string title =
        (spec.problem.name.empty() ? std::filesystem::path(opts.input).stem().string() : spec.problem.name) +
        " (seed " + std::to_string(spec.solve.seed) + ")";
    const std::string text = export_nfg(game, title);

    std::string destination = opts.output;
    if (destination.empty()) {
        destination = std::filesystem::path(opts.input).replace_extension(".nfg").string();
    }
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write to " << destination << "\n";
        return kExitInputError;
    }
    out << text;
    std::cout << "wrote " << destination << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium analysis of joint plan schedules for self-interested agents"};
    app.require_subcommand(1);

    CommonOptions solve_opts, matrix_opts, spe_opts, export_opts;
    std::vector<std::string> plan_selections;

    CLI::App* solve = app.add_subcommand("solve", "build the payoff matrix and report all equilibria");
    add_common_options(solve, solve_opts);
    CLI::App* matrix = app.add_subcommand("matrix", "build and render the payoff matrix only");
    add_common_options(matrix, matrix_opts);
    CLI::App* spe = app.add_subcommand("spe", "solve the internal game of one plan profile");
    add_common_options(spe, spe_opts);
    spe->add_option("--plan", plan_selections, "AGENT=PLAN selection (repeat per agent)");
    CLI::App* exporter = app.add_subcommand("export", "write the matrix as a normal-form .nfg file");
    add_common_options(exporter, export_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return cmd_solve(solve_opts, false);
        }
        if (matrix->parsed()) {
            return cmd_solve(matrix_opts, true);
        }
        if (spe->parsed()) {
            return cmd_spe(spe_opts, plan_selections);
        }
        if (exporter->parsed()) {
            return cmd_export(export_opts);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
