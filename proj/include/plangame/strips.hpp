#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace plangame {

/// A positive proposition symbol. Negation only ever appears through action
/// delete lists; states never store negated literals.
struct Literal {
    std::string name;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

using LiteralSet = std::set<Literal>;

/// A planning state: the set of literals that currently hold.
struct State {
    LiteralSet literals;

    bool contains(const Literal& lit) const { return literals.count(lit) > 0; }
    bool contains_all(const LiteralSet& lits) const;

    friend auto operator<=>(const State&, const State&) = default;
};

/// A ground action with precondition, add and delete lists.
struct Action {
    std::string name;
    LiteralSet pre;
    LiteralSet add;
    LiteralSet del;

    friend bool operator==(const Action&, const Action&) = default;
};

/// A totally ordered action sequence owned by one agent. Goals are declared
/// labels; they drive the benefit value and are not re-derived from states.
struct Plan {
    std::string name;
    std::string owner;
    std::vector<Action> actions;
    std::set<std::string> goals;

    int length() const { return static_cast<int>(actions.size()); }

    friend bool operator==(const Plan&, const Plan&) = default;
};

struct UtilityConfig {
    double goal_reward = 10.0;
    double delay_penalty = 1.0;
    double infeasible_payoff = -1000.0;

    friend bool operator==(const UtilityConfig&, const UtilityConfig&) = default;
};

struct AgentPlans {
    std::string name;
    std::vector<Plan> plans;

    friend bool operator==(const AgentPlans&, const AgentPlans&) = default;
};

/// A multi-agent scheduling problem: shared initial state, one plan library
/// per agent.
struct Problem {
    std::string name;
    State init;
    std::vector<AgentPlans> agents;

    friend bool operator==(const Problem&, const Problem&) = default;
};

/// Throws std::invalid_argument if the action is malformed (empty literal
/// name, empty action name, or add/del sharing a literal).
void validate_action(const Action& action);

/// True iff pre(action) holds in the state.
bool is_applicable(const State& state, const Action& action);

/// (state \ del) ∪ add. Throws std::invalid_argument if not applicable.
State apply(const State& state, const Action& action);

/// Applies a set of same-step actions at once: (state \ ⋃del) ∪ ⋃add.
/// Requires every action applicable and the set pairwise non-mutex, which
/// makes the result equal to sequential application in any order.
State apply_joint(const State& state, const std::vector<const Action*>& actions);

/// GraphPlan-style mutual exclusion: one action deletes a precondition or an
/// add effect of the other (checked in both directions). Symmetric.
bool mutex(const Action& a, const Action& b);

/// Undelayed value of a plan: |goals| * goal_reward - number of actions.
double benefit(const Plan& plan, const UtilityConfig& cfg);

/// Projects each plan alone from the initial state and reports a warning per
/// declared goal label that does not hold in the plan's final state (and per
/// action that is not applicable when the plan runs unopposed).
std::vector<std::string> check_declared_goals(const Problem& problem);

}  // namespace plangame
