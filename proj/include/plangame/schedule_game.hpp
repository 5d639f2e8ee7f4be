#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "plangame/strips.hpp"

namespace plangame {

/// One move of one agent at one time step: either the next unplayed action of
/// the agent's plan (identified by its plan index) or the empty move, which
/// defers that action by one step.
struct Move {
    static constexpr int kEmpty = -1;

    int action_index = kEmpty;

    bool is_real() const { return action_index >= 0; }

    static Move real(int index) { return Move{index}; }
    static Move empty() { return Move{kEmpty}; }

    friend auto operator<=>(const Move&, const Move&) = default;
};

enum class AgentOrderMode { seeded, declared };
enum class TieBreakMode { action_first, seeded };

struct SolveOptions {
    std::uint64_t seed = 0;
    AgentOrderMode agent_order = AgentOrderMode::seeded;
    TieBreakMode tie_break = TieBreakMode::action_first;

    friend bool operator==(const SolveOptions&, const SolveOptions&) = default;
};

/// Fixed data of one tree search: the chosen plan per agent and the order in
/// which agents commit their move within each time step.
struct GameContext {
    std::vector<const Plan*> plans;  // indexed by agent
    std::vector<int> order;          // order[k] = agent that moves k-th within a step
    int total_actions = 0;           // sum of plan lengths; bounds the step count

    int num_agents() const { return static_cast<int>(plans.size()); }
};

GameContext make_context(std::vector<const Plan*> plans, std::vector<int> order);

/// The move order for n agents: a seeded permutation or declaration order.
std::vector<int> agent_order_for(int num_agents, const SolveOptions& opts);

/// A node of the extensive-form tree. The game simulates simultaneous
/// execution sequentially: within the step starting at `time`, the agents
/// commit one move each (in context order); once all have committed, the
/// step's real actions are applied jointly and the next step begins.
/// `state` is always the planning state at the start of the current step, so
/// applicability is evaluated against it for every mover of the step.
struct GameNode {
    State state;
    int time = 0;
    std::vector<Move> pending;  // moves committed so far in the current step
    std::vector<int> progress;  // per agent: plan actions already played
};

GameNode root_node(const GameContext& ctx, const State& init);

/// The agent that moves at this node (pending.size() < n).
int mover(const GameContext& ctx, const GameNode& node);

/// Terminal iff the node sits on a step boundary and every agent has played
/// its whole plan.
bool is_terminal(const GameContext& ctx, const GameNode& node);

/// The mover's legal moves, at most {next-plan-action, empty}:
///  - the real action must be applicable in the step's start state and
///    non-mutex with every real move already pending in this step;
///  - the empty move is excluded when it would complete a step consisting of
///    empty moves only (such a step is only reachable while some agent still
///    has unplayed actions, and allowing it would let the game stall forever);
///  - an agent whose plan is exhausted has only the empty move to offer.
/// An empty result means the branch is a dead end and gets pruned.
std::vector<Move> legal_moves(const GameContext& ctx, const GameNode& node);

/// Appends the mover's move to the pending step (advancing its progress if
/// the move is real). Does not change the state.
GameNode commit_move(const GameContext& ctx, const GameNode& node, Move move);

/// Applies all real moves of the completed step jointly and opens step t+1.
/// Requires all n agents to have committed.
GameNode advance_step(const GameContext& ctx, const GameNode& node);

/// Delay of a timed move sequence holding all m real actions of a plan:
/// (1 + index of the last real move) - m. Trailing empty moves are free;
/// an empty plan has delay 0.
int compute_delay(std::span<const Move> moves, int plan_length);

/// Net value of a schedule: beta - delay_penalty * delay_steps.
double compute_utility(double beta, int delay_steps, const UtilityConfig& cfg);

struct AgentSchedule {
    std::vector<Move> moves;  // one entry per time step of the joint schedule
    int finish_time = 0;      // 1 + index of the last real move (0 if none)
    int delay = 0;
    double utility = 0.0;

    friend bool operator==(const AgentSchedule&, const AgentSchedule&) = default;
};

/// A joint schedule: per-agent timed move sequences of equal length, or the
/// infeasible marker when the plan profile admits no valid joint schedule
/// (all utilities then carry the infeasible payoff).
struct ScheduleProfile {
    bool feasible = false;
    std::vector<AgentSchedule> agents;

    friend bool operator==(const ScheduleProfile&, const ScheduleProfile&) = default;
};

struct TreeStats {
    std::int64_t nodes = 0;
    std::int64_t terminals = 0;
    std::int64_t pruned = 0;  // dead-end nodes with no legal move or no live child

    friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

struct SolveResult {
    ScheduleProfile profile;
    std::vector<double> payoffs;   // payoffs[i] = profile.agents[i].utility
    std::vector<int> agent_order;  // within-step move order used
    TreeStats stats;
};

/// Signals a bug in the tree expansion: a path exceeded the sum-of-plan-length
/// step bound, which the empty-step pruning rule makes unreachable.
class HorizonExceededError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NodeBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solves the joint schedule game for one plan profile by depth-first
/// backward induction: at each internal node the mover keeps the child
/// maximizing its own backed-up payoff. On equal values the real action is
/// preferred over the empty move and the first-visited subtree wins deeper
/// ties (TieBreakMode::seeded instead resolves ties by coin flips drawn from
/// the seed). The returned terminal is a subgame perfect equilibrium of the
/// tree; if no valid schedule exists the result is marked infeasible.
SolveResult solve_schedule_game(const std::vector<const Plan*>& profile, const State& init,
                                const UtilityConfig& cfg, const SolveOptions& opts);

/// As above, but with the within-step move order given explicitly instead of
/// derived from the options.
SolveResult solve_schedule_game(const std::vector<const Plan*>& profile, const State& init,
                                const UtilityConfig& cfg, const SolveOptions& opts,
                                std::vector<int> order);

/// Exhaustively lists every valid joint schedule of the profile (every
/// terminal of the tree). Intended for desk-scale instances; throws
/// NodeBudgetError when the walk exceeds node_budget nodes.
std::vector<ScheduleProfile> enumerate_schedules(const std::vector<const Plan*>& profile, const State& init,
                                                 const UtilityConfig& cfg, const SolveOptions& opts,
                                                 std::int64_t node_budget = 1000000);

}  // namespace plangame
