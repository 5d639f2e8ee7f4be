#include "plangame/strips.hpp"

#include <algorithm>
#include <stdexcept>

namespace plangame {

namespace {

bool intersects(const LiteralSet& a, const LiteralSet& b) {
    // Both sets are ordered; walk them in lockstep.
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            return true;
        }
    }
    return false;
}

}  // namespace

bool State::contains_all(const LiteralSet& lits) const {
    return std::includes(literals.begin(), literals.end(), lits.begin(), lits.end());
}

void validate_action(const Action& action) {
    if (action.name.empty()) {
        throw std::invalid_argument("action with empty name");
    }
    for (const LiteralSet* lits : {&action.pre, &action.add, &action.del}) {
        for (const Literal& lit : *lits) {
            if (lit.name.empty()) {
                throw std::invalid_argument("action '" + action.name + "' has an empty literal name");
            }
        }
    }
    if (intersects(action.add, action.del)) {
        throw std::invalid_argument("action '" + action.name + "' adds and deletes the same literal");
    }
}

bool is_applicable(const State& state, const Action& action) {
    return state.contains_all(action.pre);
}

State apply(const State& state, const Action& action) {
    if (!is_applicable(state, action)) {
        throw std::invalid_argument("action '" + action.name + "' is not applicable");
    }
    State next = state;
    for (const Literal& lit : action.del) {
        next.literals.erase(lit);
    }
    for (const Literal& lit : action.add) {
        next.literals.insert(lit);
    }
    return next;
}

State apply_joint(const State& state, const std::vector<const Action*>& actions) {
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (!is_applicable(state, *actions[i])) {
            throw std::invalid_argument("joint step: action '" + actions[i]->name + "' is not applicable");
        }
        for (std::size_t j = i + 1; j < actions.size(); ++j) {
            if (mutex(*actions[i], *actions[j])) {
                throw std::invalid_argument("joint step: actions '" + actions[i]->name + "' and '" +
                                            actions[j]->name + "' are mutex");
            }
        }
    }
    State next = state;
    for (const Action* action : actions) {
        for (const Literal& lit : action->del) {
            next.literals.erase(lit);
        }
    }
    for (const Action* action : actions) {
        for (const Literal& lit : action->add) {
            next.literals.insert(lit);
        }
    }
    return next;
}

bool mutex(const Action& a, const Action& b) {
    return intersects(a.del, b.pre) || intersects(a.del, b.add) ||
           intersects(b.del, a.pre) || intersects(b.del, a.add);
}

double benefit(const Plan& plan, const UtilityConfig& cfg) {
    return static_cast<double>(plan.goals.size()) * cfg.goal_reward - static_cast<double>(plan.length());
}

std::vector<std::string> check_declared_goals(const Problem& problem) {
    std::vector<std::string> warnings;
    for (const AgentPlans& agent : problem.agents) {
        for (const Plan& plan : agent.plans) {
            State state = problem.init;
            bool broken = false;
            for (const Action& action : plan.actions) {
                if (!is_applicable(state, action)) {
                    warnings.push_back("agent '" + agent.name + "' plan '" + plan.name + "': action '" +
                                       action.name + "' is not applicable when the plan runs unopposed");
                    broken = true;
                    break;
                }
                state = apply(state, action);
            }
            if (broken) {
                continue;
            }
            for (const std::string& goal : plan.goals) {
                if (!state.contains(Literal{goal})) {
                    warnings.push_back("agent '" + agent.name + "' plan '" + plan.name + "': declared goal '" +
                                       goal + "' does not hold in the plan's final state");
                }
            }
        }
    }
    return warnings;
}

}  // namespace plangame
