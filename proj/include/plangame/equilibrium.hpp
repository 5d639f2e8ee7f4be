#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plangame/schedule_game.hpp"
#include "plangame/strips.hpp"

namespace plangame {

/// One strategy index per agent, addressing a cell of the payoff tensor.
using Cell = std::vector<int>;

struct CellOutcome {
    std::vector<double> payoffs;        // per agent; infeasible cells carry the sentinel
    std::vector<int> delays;            // per agent
    bool feasible = false;
    std::optional<SolveResult> detail;  // present when the cell came from an internal-game solve
    std::string error;                  // non-empty if the cell's solve failed
};

/// The general game in normal form: an n-dimensional tensor of per-agent
/// payoff vectors, one dimension per agent, indexed by plan choice. Cells are
/// stored flat with the FIRST agent's strategy index varying fastest; that
/// flat order is also the canonical cell order for exports and reports.
class NormalFormGame {
public:
    NormalFormGame(std::vector<std::string> agent_names,
                   std::vector<std::vector<std::string>> strategy_names);

    int num_agents() const { return static_cast<int>(agent_names_.size()); }
    const std::vector<std::string>& agents() const { return agent_names_; }
    const std::vector<std::vector<std::string>>& strategies() const { return strategy_names_; }
    const std::vector<int>& extents() const { return extents_; }

    std::size_t cell_count() const { return cells_.size(); }
    std::size_t flat_index(const Cell& cell) const;
    Cell cell_at(std::size_t flat) const;

    CellOutcome& at(const Cell& cell) { return cells_[flat_index(cell)]; }
    const CellOutcome& at(const Cell& cell) const { return cells_[flat_index(cell)]; }
    CellOutcome& at_flat(std::size_t flat) { return cells_[flat]; }
    const CellOutcome& at_flat(std::size_t flat) const { return cells_[flat]; }

private:
    std::vector<std::string> agent_names_;
    std::vector<std::vector<std::string>> strategy_names_;
    std::vector<int> extents_;
    std::vector<std::size_t> strides_;
    std::vector<CellOutcome> cells_;
};

/// Seed for the internal game of one cell, derived from the master seed and
/// the cell's canonical flat index.
std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t flat_index);

/// Runs the internal schedule game on every plan profile of the problem and
/// assembles the payoff tensor. A cell whose profile admits no valid joint
/// schedule is marked infeasible and carries the sentinel payoff. A cell
/// whose solve throws is recorded in CellOutcome::error without aborting the
/// remaining cells. Throws std::invalid_argument if an agent has no plans or
/// if the sentinel is not below every utility reachable in the problem.
NormalFormGame build_matrix(const Problem& problem, const UtilityConfig& cfg, const SolveOptions& opts);

/// All cells where no agent can strictly gain by a unilateral plan change.
/// Infeasible cells are never reported (the sentinel is not a solution), but
/// deviations into them still count at sentinel value. Returned in canonical
/// flat order.
std::vector<Cell> pure_nash(const NormalFormGame& game);

/// A mixed strategy profile of a 2-agent game. `probabilities` holds one full
/// distribution per agent; `support` the strategies with positive weight.
/// `degenerate` marks a support whose indifference system is singular with
/// infinitely many candidate solutions; such entries carry no probabilities
/// and are reports, not equilibria.
struct MixedProfile {
    std::vector<std::vector<double>> probabilities;
    std::vector<std::vector<int>> support;
    std::vector<double> payoffs;  // expected payoff per agent
    bool degenerate = false;
};

/// Support enumeration over equal-size supports for 2-agent games: solves the
/// indifference system of each support pair, clamps probabilities below the
/// tolerance to zero, renormalizes, and keeps every solution that passes the
/// full best-response check. Pure equilibria appear as singleton supports.
/// Throws std::invalid_argument unless the game has exactly 2 agents.
std::vector<MixedProfile> mixed_nash_2p(const NormalFormGame& game, double tolerance = 1e-9);

/// Feasible cells whose payoff vector is not Pareto-dominated by any other
/// feasible cell (domination: >= in every component, > in at least one).
std::vector<Cell> pareto_front(const NormalFormGame& game);

/// Feasible cells maximizing the sum of payoffs; all ties returned.
std::vector<Cell> max_welfare(const NormalFormGame& game);

/// Independent deviation check of a claimed pure equilibrium cell.
bool verify_equilibrium(const NormalFormGame& game, const Cell& cell, double tolerance = 1e-9);

/// Independent check of a claimed mixed equilibrium (2 agents): distributions
/// sum to 1, no pure strategy beats the mixed payoff by more than the
/// tolerance, and all support strategies are indifferent within it.
bool verify_equilibrium(const NormalFormGame& game, const MixedProfile& profile, double tolerance = 1e-9);

}  // namespace plangame
