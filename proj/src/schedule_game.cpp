#include "plangame/schedule_game.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "plangame/rng.hpp"

namespace plangame {

GameContext make_context(std::vector<const Plan*> plans, std::vector<int> order) {
    GameContext ctx;
    ctx.plans = std::move(plans);
    ctx.order = std::move(order);
    if (ctx.order.size() != ctx.plans.size()) {
        throw std::invalid_argument("agent order size does not match profile size");
    }
    std::vector<bool> seen(ctx.plans.size(), false);
    for (int agent : ctx.order) {
        if (agent < 0 || agent >= ctx.num_agents() || seen[agent]) {
            throw std::invalid_argument("agent order is not a permutation");
        }
        seen[agent] = true;
    }
    for (const Plan* plan : ctx.plans) {
        ctx.total_actions += plan->length();
    }
    return ctx;
}

std::vector<int> agent_order_for(int num_agents, const SolveOptions& opts) {
    std::vector<int> order(num_agents);
    std::iota(order.begin(), order.end(), 0);
    if (opts.agent_order == AgentOrderMode::seeded) {
        Rng rng(mix_seed(opts.seed, 1));
        rng.shuffle(order);
    }
    return order;
}

GameNode root_node(const GameContext& ctx, const State& init) {
    GameNode node;
    node.state = init;
    node.progress.assign(ctx.plans.size(), 0);
    return node;
}

int mover(const GameContext& ctx, const GameNode& node) {
    assert(node.pending.size() < ctx.plans.size());
    return ctx.order[node.pending.size()];
}

bool is_terminal(const GameContext& ctx, const GameNode& node) {
    if (!node.pending.empty()) {
        return false;
    }
    for (int i = 0; i < ctx.num_agents(); ++i) {
        if (node.progress[i] < ctx.plans[i]->length()) {
            return false;
        }
    }
    return true;
}

std::vector<Move> legal_moves(const GameContext& ctx, const GameNode& node) {
    const int position = static_cast<int>(node.pending.size());
    const int agent = ctx.order[position];
    const Plan& plan = *ctx.plans[agent];
    std::vector<Move> moves;

    const int next = node.progress[agent];
    if (next < plan.length()) {
        const Action& action = plan.actions[next];
        bool ok = is_applicable(node.state, action);
        for (int k = 0; ok && k < position; ++k) {
            if (!node.pending[k].is_real()) {
                continue;
            }
            const Action& other = ctx.plans[ctx.order[k]]->actions[node.pending[k].action_index];
            if (mutex(action, other)) {
                ok = false;
            }
        }
        if (ok) {
            moves.push_back(Move::real(next));
        }
    }

    const bool step_empty_so_far =
        std::all_of(node.pending.begin(), node.pending.end(), [](Move m) { return !m.is_real(); });
    const bool completes_empty_step = step_empty_so_far && position == ctx.num_agents() - 1;
    if (!completes_empty_step) {
        moves.push_back(Move::empty());
    }
    return moves;
}

GameNode commit_move(const GameContext& ctx, const GameNode& node, Move move) {
    const int agent = mover(ctx, node);
    GameNode child = node;
    if (move.is_real()) {
        assert(move.action_index == node.progress[agent]);
        ++child.progress[agent];
    }
    child.pending.push_back(move);
    return child;
}

GameNode advance_step(const GameContext& ctx, const GameNode& node) {
    if (node.pending.size() != ctx.plans.size()) {
        throw std::logic_error("advance_step called before all agents committed");
    }
    std::vector<const Action*> actions;
    for (std::size_t k = 0; k < node.pending.size(); ++k) {
        if (node.pending[k].is_real()) {
            actions.push_back(&ctx.plans[ctx.order[k]]->actions[node.pending[k].action_index]);
        }
    }
    GameNode next;
    next.state = apply_joint(node.state, actions);
    next.time = node.time + 1;
    next.progress = node.progress;
    return next;
}

int compute_delay(std::span<const Move> moves, int plan_length) {
    if (plan_length == 0) {
        return 0;
    }
    int last_real = -1;
    int reals = 0;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (moves[i].is_real()) {
            last_real = static_cast<int>(i);
            ++reals;
        }
    }
    assert(reals == plan_length);
    (void)reals;
    return (last_real + 1) - plan_length;
}

double compute_utility(double beta, int delay_steps, const UtilityConfig& cfg) {
    return beta - cfg.delay_penalty * static_cast<double>(delay_steps);
}

namespace {

struct Outcome {
    std::vector<double> payoffs;                // per agent
    std::vector<std::vector<Move>> schedules;   // per agent, one move per step
};

ScheduleProfile profile_from(const GameContext& ctx, Outcome&& outcome) {
    ScheduleProfile profile;
    profile.feasible = true;
    profile.agents.resize(ctx.plans.size());
    for (int i = 0; i < ctx.num_agents(); ++i) {
        AgentSchedule& sched = profile.agents[i];
        sched.moves = std::move(outcome.schedules[i]);
        int last_real = -1;
        for (std::size_t t = 0; t < sched.moves.size(); ++t) {
            if (sched.moves[t].is_real()) {
                last_real = static_cast<int>(t);
            }
        }
        sched.finish_time = last_real + 1;
        sched.delay = compute_delay(sched.moves, ctx.plans[i]->length());
        sched.utility = outcome.payoffs[i];
    }
    return profile;
}

/// Shared depth-first walk over the game tree. Drives both the backward
/// induction solve and the exhaustive terminal enumeration.
class TreeWalk {
public:
    TreeWalk(const GameContext& ctx, const UtilityConfig& cfg) : ctx_(ctx), cfg_(cfg) {
        histories_.resize(ctx.plans.size());
    }

    TreeStats stats;

    Outcome terminal_outcome(const GameNode& node) const {
        Outcome outcome;
        outcome.schedules = histories_;
        outcome.payoffs.resize(ctx_.plans.size());
        for (int i = 0; i < ctx_.num_agents(); ++i) {
            const Plan& plan = *ctx_.plans[i];
            const int delay = compute_delay(outcome.schedules[i], plan.length());
            outcome.payoffs[i] = compute_utility(benefit(plan, cfg_), delay, cfg_);
        }
        (void)node;
        return outcome;
    }

protected:
    const GameContext& ctx_;
    const UtilityConfig& cfg_;
    std::vector<std::vector<Move>> histories_;  // per agent: committed moves so far

    // Called for non-terminal step boundaries only. Every completed step holds
    // at least one real action, so a live game always satisfies
    // time < total_actions.
    void check_horizon(const GameNode& node) const {
        if (node.time >= ctx_.total_actions) {
            throw HorizonExceededError("schedule game exceeded the step bound of " +
                                       std::to_string(ctx_.total_actions) + " (tree expansion bug)");
        }
    }
};

class Solver : public TreeWalk {
public:
    Solver(const GameContext& ctx, const UtilityConfig& cfg, const SolveOptions& opts)
        : TreeWalk(ctx, cfg), tie_(opts.tie_break), tie_rng_(mix_seed(opts.seed, 2)) {}

    std::optional<Outcome> visit(const GameNode& node) {
        ++stats.nodes;
        if (node.pending.size() == ctx_.plans.size()) {
            return visit(advance_step(ctx_, node));
        }
        if (node.pending.empty()) {
            if (is_terminal(ctx_, node)) {
                ++stats.terminals;
                return terminal_outcome(node);
            }
            check_horizon(node);
        }

        const int agent = mover(ctx_, node);
        std::optional<Outcome> best;
        double best_seen = 0.0;
        bool any_child = false;
        for (Move move : legal_moves(ctx_, node)) {
            histories_[agent].push_back(move);
            std::optional<Outcome> child = visit(commit_move(ctx_, node, move));
            histories_[agent].pop_back();
            if (!child) {
                continue;
            }
            best_seen = any_child ? std::max(best_seen, child->payoffs[agent]) : child->payoffs[agent];
            any_child = true;
            if (!best) {
                best = std::move(child);
            } else if (child->payoffs[agent] > best->payoffs[agent]) {
                best = std::move(child);
            } else if (child->payoffs[agent] == best->payoffs[agent] &&
                       tie_ == TieBreakMode::seeded && tie_rng_.coin()) {
                best = std::move(child);
            }
            // legal_moves lists the real action before the empty move, so
            // keeping the incumbent on ties prefers the real action and lets
            // depth-first order decide deeper ties.
        }
        // Backward-induction consistency: the backed-up value is the maximum
        // of the mover's component over the live children.
        if (best && best->payoffs[agent] != best_seen) {
            throw std::logic_error("backward induction backed up a non-maximal value");
        }
        if (!best) {
            ++stats.pruned;
        }
        return best;
    }

private:
    TieBreakMode tie_;
    Rng tie_rng_;
};

class Enumerator : public TreeWalk {
public:
    Enumerator(const GameContext& ctx, const UtilityConfig& cfg, std::int64_t budget)
        : TreeWalk(ctx, cfg), budget_(budget) {}

    std::vector<ScheduleProfile> results;

    void visit(const GameNode& node) {
        if (++stats.nodes > budget_) {
            throw NodeBudgetError("schedule enumeration exceeded the node budget of " +
                                  std::to_string(budget_));
        }
        if (node.pending.size() == ctx_.plans.size()) {
            visit(advance_step(ctx_, node));
            return;
        }
        if (node.pending.empty()) {
            if (is_terminal(ctx_, node)) {
                ++stats.terminals;
                results.push_back(profile_from(ctx_, terminal_outcome(node)));
                return;
            }
            check_horizon(node);
        }
        const int agent = mover(ctx_, node);
        for (Move move : legal_moves(ctx_, node)) {
            histories_[agent].push_back(move);
            visit(commit_move(ctx_, node, move));
            histories_[agent].pop_back();
        }
    }

private:
    std::int64_t budget_;
};

}  // namespace

SolveResult solve_schedule_game(const std::vector<const Plan*>& profile, const State& init,
                                const UtilityConfig& cfg, const SolveOptions& opts) {
    return solve_schedule_game(profile, init, cfg, opts,
                               agent_order_for(static_cast<int>(profile.size()), opts));
}

SolveResult solve_schedule_game(const std::vector<const Plan*>& profile, const State& init,
                                const UtilityConfig& cfg, const SolveOptions& opts,
                                std::vector<int> order) {
    GameContext ctx = make_context(profile, std::move(order));
    Solver solver(ctx, cfg, opts);
    std::optional<Outcome> outcome = solver.visit(root_node(ctx, init));

    SolveResult result;
    result.agent_order = ctx.order;
    result.stats = solver.stats;
    if (outcome) {
        result.payoffs = outcome->payoffs;
        result.profile = profile_from(ctx, std::move(*outcome));
    } else {
        result.profile.feasible = false;
        result.profile.agents.resize(profile.size());
        result.payoffs.assign(profile.size(), cfg.infeasible_payoff);
        for (AgentSchedule& sched : result.profile.agents) {
            sched.utility = cfg.infeasible_payoff;
        }
    }
    return result;
}

std::vector<ScheduleProfile> enumerate_schedules(const std::vector<const Plan*>& profile, const State& init,
                                                 const UtilityConfig& cfg, const SolveOptions& opts,
                                                 std::int64_t node_budget) {
    GameContext ctx = make_context(profile, agent_order_for(static_cast<int>(profile.size()), opts));
    Enumerator enumerator(ctx, cfg, node_budget);
    enumerator.visit(root_node(ctx, init));
    return std::move(enumerator.results);
}

}  // namespace plangame
