#include "plangame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plangame/rng.hpp"

namespace plangame {

NormalFormGame::NormalFormGame(std::vector<std::string> agent_names,
                               std::vector<std::vector<std::string>> strategy_names)
    : agent_names_(std::move(agent_names)), strategy_names_(std::move(strategy_names)) {
    if (agent_names_.empty() || agent_names_.size() != strategy_names_.size()) {
        throw std::invalid_argument("normal-form game needs one strategy list per agent");
    }
    std::size_t count = 1;
    for (const auto& names : strategy_names_) {
        if (names.empty()) {
            throw std::invalid_argument("every agent needs at least one strategy");
        }
        extents_.push_back(static_cast<int>(names.size()));
        strides_.push_back(count);
        count *= names.size();
    }
    cells_.resize(count);
    for (CellOutcome& cell : cells_) {
        cell.payoffs.assign(agent_names_.size(), 0.0);
        cell.delays.assign(agent_names_.size(), 0);
        cell.feasible = true;
    }
}

std::size_t NormalFormGame::flat_index(const Cell& cell) const {
    if (cell.size() != extents_.size()) {
        throw std::out_of_range("cell arity does not match the number of agents");
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (cell[i] < 0 || cell[i] >= extents_[i]) {
            throw std::out_of_range("strategy index out of range for agent " + agent_names_[i]);
        }
        flat += strides_[i] * static_cast<std::size_t>(cell[i]);
    }
    return flat;
}

Cell NormalFormGame::cell_at(std::size_t flat) const {
    Cell cell(extents_.size());
    for (std::size_t i = 0; i < extents_.size(); ++i) {
        cell[i] = static_cast<int>(flat % extents_[i]);
        flat /= extents_[i];
    }
    return cell;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t flat_index) {
    return mix_seed(master_seed, 0x100 + flat_index);
}

namespace {

// Lowest utility any plan can reach in a feasible schedule: an agent's delay
// never exceeds the joint step bound minus its own plan length.
double min_reachable_utility(const Problem& problem, const UtilityConfig& cfg) {
    int longest_total = 0;
    for (const AgentPlans& agent : problem.agents) {
        int longest = 0;
        for (const Plan& plan : agent.plans) {
            longest = std::max(longest, plan.length());
        }
        longest_total += longest;
    }
    double lowest = std::numeric_limits<double>::infinity();
    for (const AgentPlans& agent : problem.agents) {
        for (const Plan& plan : agent.plans) {
            const int max_delay = longest_total - plan.length();
            lowest = std::min(lowest, benefit(plan, cfg) - cfg.delay_penalty * max_delay);
        }
    }
    return lowest;
}

}  // namespace

NormalFormGame build_matrix(const Problem& problem, const UtilityConfig& cfg, const SolveOptions& opts) {
    std::vector<std::string> agent_names;
    std::vector<std::vector<std::string>> strategy_names;
    for (const AgentPlans& agent : problem.agents) {
        if (agent.plans.empty()) {
            throw std::invalid_argument("agent '" + agent.name + "' has no plans");
        }
        agent_names.push_back(agent.name);
        std::vector<std::string> names;
        for (const Plan& plan : agent.plans) {
            names.push_back(plan.name);
        }
        strategy_names.push_back(std::move(names));
    }
    if (cfg.infeasible_payoff >= min_reachable_utility(problem, cfg)) {
        throw std::invalid_argument("infeasible payoff sentinel is not below every reachable utility");
    }

    NormalFormGame game(std::move(agent_names), std::move(strategy_names));
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const Cell cell = game.cell_at(flat);
        std::vector<const Plan*> profile;
        for (std::size_t i = 0; i < cell.size(); ++i) {
            profile.push_back(&problem.agents[i].plans[cell[i]]);
        }
        SolveOptions cell_opts = opts;
        cell_opts.seed = cell_seed(opts.seed, flat);
        CellOutcome& outcome = game.at_flat(flat);
        try {
            SolveResult result = solve_schedule_game(profile, problem.init, cfg, cell_opts);
            outcome.payoffs = result.payoffs;
            outcome.feasible = result.profile.feasible;
            outcome.delays.clear();
            for (const AgentSchedule& sched : result.profile.agents) {
                outcome.delays.push_back(sched.delay);
            }
            outcome.detail = std::move(result);
        } catch (const std::exception& e) {
            outcome.feasible = false;
            outcome.payoffs.assign(cell.size(), cfg.infeasible_payoff);
            outcome.delays.assign(cell.size(), 0);
            outcome.error = e.what();
        }
    }
    return game;
}

std::vector<Cell> pure_nash(const NormalFormGame& game) {
    std::vector<Cell> result;
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const CellOutcome& outcome = game.at_flat(flat);
        if (!outcome.feasible) {
            continue;
        }
        const Cell cell = game.cell_at(flat);
        bool stable = true;
        for (int agent = 0; stable && agent < game.num_agents(); ++agent) {
            Cell deviation = cell;
            for (int alt = 0; alt < game.extents()[agent]; ++alt) {
                if (alt == cell[agent]) {
                    continue;
                }
                deviation[agent] = alt;
                if (game.at(deviation).payoffs[agent] > outcome.payoffs[agent]) {
                    stable = false;
                    break;
                }
            }
        }
        if (stable) {
            result.push_back(cell);
        }
    }
    return result;
}

namespace {

enum class LinSolveStatus { ok, singular_consistent, singular_inconsistent };

// Gaussian elimination with partial pivoting on the augmented system.
LinSolveStatus solve_linear(std::vector<std::vector<double>> m, std::vector<double> rhs,
                            std::vector<double>& out) {
    const std::size_t n = m.size();
    double scale = 1.0;
    for (const auto& row : m) {
        for (double v : row) {
            scale = std::max(scale, std::fabs(v));
        }
    }
    const double eps = 1e-12 * scale;

    std::vector<std::size_t> cols;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < n; ++col) {
        std::size_t pivot = rank;
        for (std::size_t r = rank + 1; r < n; ++r) {
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) {
                pivot = r;
            }
        }
        if (std::fabs(m[pivot][col]) <= eps) {
            continue;
        }
        std::swap(m[rank], m[pivot]);
        std::swap(rhs[rank], rhs[pivot]);
        for (std::size_t r = rank + 1; r < n; ++r) {
            const double f = m[r][col] / m[rank][col];
            for (std::size_t c = col; c < n; ++c) {
                m[r][c] -= f * m[rank][c];
            }
            rhs[r] -= f * rhs[rank];
        }
        cols.push_back(col);
        ++rank;
    }

    if (rank < n) {
        for (std::size_t r = rank; r < n; ++r) {
            if (std::fabs(rhs[r]) > 1e-9 * std::max(1.0, scale)) {
                return LinSolveStatus::singular_inconsistent;
            }
        }
        return LinSolveStatus::singular_consistent;
    }

    out.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double v = rhs[i];
        for (std::size_t c = cols[i] + 1; c < n; ++c) {
            v -= m[i][c] * out[c];
        }
        out[cols[i]] = v / m[i][cols[i]];
    }
    return LinSolveStatus::ok;
}

// Mix of the opponent of `who` (unknowns: one weight per opponent support
// strategy, plus the value v) that makes every strategy in `own_support`
// of agent `who` indifferent.
LinSolveStatus solve_indifference(const NormalFormGame& game, int who,
                                  const std::vector<int>& own_support,
                                  const std::vector<int>& opp_support,
                                  std::vector<double>& weights, double& value) {
    const std::size_t k = opp_support.size();
    std::vector<std::vector<double>> m(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> rhs(k + 1, 0.0);
    for (std::size_t r = 0; r < own_support.size(); ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            Cell cell(2);
            cell[who] = own_support[r];
            cell[1 - who] = opp_support[c];
            m[r][c] = game.at(cell).payoffs[who];
        }
        m[r][k] = -1.0;  // ... - v = 0
    }
    for (std::size_t c = 0; c < k; ++c) {
        m[k][c] = 1.0;  // weights sum to 1
    }
    rhs[k] = 1.0;

    std::vector<double> solution;
    const LinSolveStatus status = solve_linear(std::move(m), std::move(rhs), solution);
    if (status == LinSolveStatus::ok) {
        weights.assign(solution.begin(), solution.begin() + k);
        value = solution[k];
    }
    return status;
}

std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> result;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (true) {
        result.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++idx[i];
        for (int j = i + 1; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return result;
}

std::vector<double> expected_payoffs_against(const NormalFormGame& game, int who,
                                             const std::vector<double>& opponent_mix) {
    std::vector<double> expected(game.extents()[who], 0.0);
    for (int own = 0; own < game.extents()[who]; ++own) {
        for (int opp = 0; opp < game.extents()[1 - who]; ++opp) {
            Cell cell(2);
            cell[who] = own;
            cell[1 - who] = opp;
            expected[own] += opponent_mix[opp] * game.at(cell).payoffs[who];
        }
    }
    return expected;
}

}  // namespace

std::vector<MixedProfile> mixed_nash_2p(const NormalFormGame& game, double tolerance) {
    if (game.num_agents() != 2) {
        throw std::invalid_argument("mixed equilibrium search supports exactly 2 agents");
    }
    const int rows = game.extents()[0];
    const int cols = game.extents()[1];
    std::vector<MixedProfile> found;

    auto already_found = [&](const MixedProfile& candidate) {
        for (const MixedProfile& other : found) {
            if (other.degenerate != candidate.degenerate) {
                continue;
            }
            if (candidate.degenerate) {
                if (other.support == candidate.support) {
                    return true;
                }
                continue;
            }
            double diff = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (std::size_t s = 0; s < candidate.probabilities[a].size(); ++s) {
                    diff = std::max(diff, std::fabs(candidate.probabilities[a][s] - other.probabilities[a][s]));
                }
            }
            if (diff <= 1e-9) {
                return true;
            }
        }
        return false;
    };

    for (int k = 1; k <= std::min(rows, cols); ++k) {
        for (const std::vector<int>& row_support : combinations(rows, k)) {
            for (const std::vector<int>& col_support : combinations(cols, k)) {
                if (k == 1) {
                    // Singleton supports are pure profiles; the sentinel of an
                    // infeasible cell is not a solution.
                    Cell cell{row_support[0], col_support[0]};
                    if (!game.at(cell).feasible) {
                        continue;
                    }
                }
                std::vector<double> col_mix, row_mix;
                double row_value = 0.0, col_value = 0.0;
                const LinSolveStatus st_rows =
                    solve_indifference(game, 0, row_support, col_support, col_mix, row_value);
                const LinSolveStatus st_cols =
                    solve_indifference(game, 1, col_support, row_support, row_mix, col_value);
                if (st_rows == LinSolveStatus::singular_inconsistent ||
                    st_cols == LinSolveStatus::singular_inconsistent) {
                    continue;
                }
                if (st_rows == LinSolveStatus::singular_consistent ||
                    st_cols == LinSolveStatus::singular_consistent) {
                    MixedProfile report;
                    report.degenerate = true;
                    report.support = {row_support, col_support};
                    if (!already_found(report)) {
                        found.push_back(std::move(report));
                    }
                    continue;
                }

                if (std::any_of(row_mix.begin(), row_mix.end(), [&](double p) { return p < -tolerance; }) ||
                    std::any_of(col_mix.begin(), col_mix.end(), [&](double p) { return p < -tolerance; })) {
                    continue;
                }

                MixedProfile profile;
                profile.probabilities = {std::vector<double>(rows, 0.0), std::vector<double>(cols, 0.0)};
                for (int i = 0; i < k; ++i) {
                    profile.probabilities[0][row_support[i]] = row_mix[i];
                    profile.probabilities[1][col_support[i]] = col_mix[i];
                }
                for (int a = 0; a < 2; ++a) {
                    double total = 0.0;
                    for (double& p : profile.probabilities[a]) {
                        if (p < tolerance) {
                            p = 0.0;
                        }
                        total += p;
                    }
                    if (total <= 0.0) {
                        profile.probabilities.clear();
                        break;
                    }
                    for (double& p : profile.probabilities[a]) {
                        p /= total;
                    }
                }
                if (profile.probabilities.empty()) {
                    continue;
                }
                profile.support.assign(2, {});
                for (int a = 0; a < 2; ++a) {
                    for (std::size_t s = 0; s < profile.probabilities[a].size(); ++s) {
                        if (profile.probabilities[a][s] > 0.0) {
                            profile.support[a].push_back(static_cast<int>(s));
                        }
                    }
                }
                const std::vector<double> row_expected = expected_payoffs_against(game, 0, profile.probabilities[1]);
                const std::vector<double> col_expected = expected_payoffs_against(game, 1, profile.probabilities[0]);
                profile.payoffs = {0.0, 0.0};
                for (int s = 0; s < rows; ++s) {
                    profile.payoffs[0] += profile.probabilities[0][s] * row_expected[s];
                }
                for (int s = 0; s < cols; ++s) {
                    profile.payoffs[1] += profile.probabilities[1][s] * col_expected[s];
                }
                if (!verify_equilibrium(game, profile, tolerance > 0 ? tolerance : 1e-9)) {
                    continue;
                }
                if (!already_found(profile)) {
                    found.push_back(std::move(profile));
                }
            }
        }
    }
    return found;
}

std::vector<Cell> pareto_front(const NormalFormGame& game) {
    std::vector<Cell> result;
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const CellOutcome& outcome = game.at_flat(flat);
        if (!outcome.feasible) {
            continue;
        }
        bool dominated = false;
        for (std::size_t other = 0; other < game.cell_count() && !dominated; ++other) {
            const CellOutcome& candidate = game.at_flat(other);
            if (other == flat || !candidate.feasible) {
                continue;
            }
            bool all_ge = true;
            bool some_gt = false;
            for (int a = 0; a < game.num_agents(); ++a) {
                if (candidate.payoffs[a] < outcome.payoffs[a]) {
                    all_ge = false;
                    break;
                }
                if (candidate.payoffs[a] > outcome.payoffs[a]) {
                    some_gt = true;
                }
            }
            dominated = all_ge && some_gt;
        }
        if (!dominated) {
            result.push_back(game.cell_at(flat));
        }
    }
    return result;
}

std::vector<Cell> max_welfare(const NormalFormGame& game) {
    std::vector<Cell> result;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const CellOutcome& outcome = game.at_flat(flat);
        if (!outcome.feasible) {
            continue;
        }
        double sum = 0.0;
        for (double p : outcome.payoffs) {
            sum += p;
        }
        if (sum > best) {
            best = sum;
            result.clear();
        }
        if (sum == best) {
            result.push_back(game.cell_at(flat));
        }
    }
    return result;
}

bool verify_equilibrium(const NormalFormGame& game, const Cell& cell, double tolerance) {
    const CellOutcome& outcome = game.at(cell);
    if (!outcome.feasible) {
        return false;
    }
    for (int agent = 0; agent < game.num_agents(); ++agent) {
        Cell deviation = cell;
        for (int alt = 0; alt < game.extents()[agent]; ++alt) {
            deviation[agent] = alt;
            if (game.at(deviation).payoffs[agent] > outcome.payoffs[agent] + tolerance) {
                return false;
            }
        }
    }
    return true;
}

bool verify_equilibrium(const NormalFormGame& game, const MixedProfile& profile, double tolerance) {
    if (game.num_agents() != 2 || profile.degenerate || profile.probabilities.size() != 2) {
        return false;
    }
    for (int a = 0; a < 2; ++a) {
        if (static_cast<int>(profile.probabilities[a].size()) != game.extents()[a]) {
            return false;
        }
        double total = 0.0;
        for (double p : profile.probabilities[a]) {
            if (p < 0.0) {
                return false;
            }
            total += p;
        }
        if (std::fabs(total - 1.0) > tolerance) {
            return false;
        }
    }
    for (int a = 0; a < 2; ++a) {
        const std::vector<double> expected = expected_payoffs_against(game, a, profile.probabilities[1 - a]);
        double value = 0.0;
        for (std::size_t s = 0; s < expected.size(); ++s) {
            value += profile.probabilities[a][s] * expected[s];
        }
        for (std::size_t s = 0; s < expected.size(); ++s) {
            if (expected[s] > value + tolerance) {
                return false;  // a pure deviation improves on the mix
            }
            if (profile.probabilities[a][s] > 0.0 && std::fabs(expected[s] - value) > tolerance) {
                return false;  // support strategies must be indifferent
            }
        }
    }
    return true;
}

}  // namespace plangame
