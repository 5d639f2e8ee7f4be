#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plangame/equilibrium.hpp"
#include "plangame/schedule_game.hpp"
#include "plangame/strips.hpp"

namespace plangame {

/// Parse or validation failure, carrying the 1-based source position (when
/// known) and the JSON-ish field path of the offending element.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line, int column, std::string path);

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& path() const { return path_; }

private:
    int line_;
    int column_;
    std::string path_;
};

/// A fully parsed and validated problem file: the planning problem itself
/// plus the file-level utility and solver configuration.
struct ProblemSpec {
    int format = 1;
    Problem problem;
    UtilityConfig util;
    SolveOptions solve;
    bool validate_goals = false;
    std::vector<std::string> warnings;  // filled when validate_goals is set

    friend bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
        return a.format == b.format && a.problem == b.problem && a.util == b.util &&
               a.solve == b.solve && a.validate_goals == b.validate_goals;
    }
};

ProblemSpec parse_problem(const std::string& text);
ProblemSpec load_problem_file(const std::string& path);
std::string serialize_problem(const ProblemSpec& spec);

/// One agent's schedule inside a report: move tokens are action names, with
/// an absent value for the empty move.
struct ReportSchedule {
    std::string plan;
    std::vector<std::optional<std::string>> moves;
    int finish_time = 0;
    int delay = 0;
    double utility = 0.0;

    friend bool operator==(const ReportSchedule&, const ReportSchedule&) = default;
};

struct ReportCell {
    Cell profile;
    std::vector<double> payoffs;
    std::vector<int> delays;
    bool feasible = false;
    std::vector<int> agent_order;
    std::string error;

    friend bool operator==(const ReportCell&, const ReportCell&) = default;
};

struct ReportPureEquilibrium {
    Cell profile;
    std::vector<double> payoffs;
    std::vector<int> delays;
    bool pareto_optimal = false;
    double welfare = 0.0;
    std::vector<ReportSchedule> schedules;

    friend bool operator==(const ReportPureEquilibrium&, const ReportPureEquilibrium&) = default;
};

struct ReportMixedEquilibrium {
    std::vector<std::vector<double>> probabilities;
    std::vector<std::vector<int>> support;
    std::vector<double> payoffs;

    friend bool operator==(const ReportMixedEquilibrium&, const ReportMixedEquilibrium&) = default;
};

/// The full result of one solve run. Serializes to a canonical JSON document
/// that parses back to an equal report.
struct SolutionReport {
    std::string problem;
    UtilityConfig util;
    std::uint64_t seed = 0;
    std::string agent_order_mode;
    std::string tie_break_mode;
    std::vector<std::string> agents;
    std::vector<std::vector<std::string>> strategies;
    std::vector<ReportCell> cells;  // canonical flat order
    std::vector<ReportPureEquilibrium> pure;
    std::vector<ReportMixedEquilibrium> mixed;  // strictly mixed only
    std::vector<std::vector<std::vector<int>>> degenerate_supports;
    std::vector<Cell> pareto;
    std::vector<Cell> welfare_best;
    std::vector<std::string> warnings;

    friend bool operator==(const SolutionReport&, const SolutionReport&) = default;
};

/// Assembles the report for a solved matrix: equilibria, annotations and the
/// SPE schedule of every pure equilibrium cell.
SolutionReport make_report(const ProblemSpec& spec, const NormalFormGame& game,
                           const std::vector<Cell>& pure, const std::vector<MixedProfile>& mixed,
                           const std::vector<Cell>& pareto, const std::vector<Cell>& welfare);

std::string serialize_report(const SolutionReport& report);
SolutionReport parse_report(const std::string& text);
std::string render_report_text(const SolutionReport& report);

/// Text grid of a game: one row per strategy of the first agent, one column
/// per strategy of the second, "uA,uB (dA,dB)" cells, "-inf,-inf" for
/// infeasible cells, marked cells flagged with '*'. Games with n != 2 render
/// as one line per cell instead of a grid.
std::string render_matrix(const NormalFormGame& game, const std::vector<Cell>& marked = {});

/// Gantt-style text of a feasible joint schedule: one row per agent, one
/// column per time step, action names in cells and a dot for empty moves.
/// Throws std::invalid_argument on an infeasible profile.
std::string render_schedule(const std::vector<std::string>& agent_names,
                            const std::vector<const Plan*>& plans, const ScheduleProfile& profile);

/// Writes the game in the normal-form payoff-list format: a header line
/// `NFG 1 R "<title>"`, the player-name list, the strategy-count list, then
/// all payoffs in the canonical order where the first player's strategy index
/// varies fastest. Infeasible cells emit their sentinel payoffs.
std::string export_nfg(const NormalFormGame& game, const std::string& title);

/// Minimal reader for the payoff-list .nfg flavor written by export_nfg.
struct NfgGame {
    std::string title;
    std::vector<std::string> players;
    std::vector<int> extents;
    std::vector<std::vector<double>> payoffs;  // per cell (flat order), per player
};

NfgGame parse_nfg(const std::string& text);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_real(double value);

/// Table rendering: bare integers, one decimal place otherwise.
std::string format_display(double value);

}  // namespace plangame
