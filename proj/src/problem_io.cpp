#include "plangame/problem_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace plangame {

using nlohmann::json;

namespace {

std::string compose_message(const std::string& message, int line, int column, const std::string& path) {
    std::string out;
    if (!path.empty()) {
        out += path + ": ";
    }
    out += message;
    if (line > 0) {
        out += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::string message, int line, int column, std::string path)
    : std::runtime_error(compose_message(message, line, column, path)),
      line_(line),
      column_(column),
      path_(std::move(path)) {}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ParseError(message, 0, 0, path);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            fail(path, "unknown field '" + item.key() + "'");
        }
    }
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& path, const char* key) {
    const json* value = find(obj, key);
    if (value == nullptr) {
        fail(path, "missing required field '" + std::string(key) + "'");
    }
    return *value;
}

std::string get_string(const json& value, const std::string& path) {
    if (!value.is_string()) {
        fail(path, "expected a string");
    }
    return value.get<std::string>();
}

double get_number(const json& value, const std::string& path) {
    if (!value.is_number()) {
        fail(path, "expected a number");
    }
    return value.get<double>();
}

LiteralSet get_literals(const json& obj, const std::string& path, const char* key) {
    LiteralSet literals;
    const json* value = find(obj, key);
    if (value == nullptr) {
        return literals;
    }
    if (!value->is_array()) {
        fail(path + "." + key, "expected an array of literal names");
    }
    for (std::size_t i = 0; i < value->size(); ++i) {
        const std::string name = get_string((*value)[i], path + "." + key + "[" + std::to_string(i) + "]");
        if (name.empty()) {
            fail(path + "." + key + "[" + std::to_string(i) + "]", "literal name must be non-empty");
        }
        literals.insert(Literal{name});
    }
    return literals;
}

Action parse_action(const json& obj, const std::string& path) {
    if (!obj.is_object()) {
        fail(path, "expected an action object");
    }
    check_keys(obj, path, {"name", "pre", "add", "del"});
    Action action;
    action.name = get_string(require(obj, path, "name"), path + ".name");
    action.pre = get_literals(obj, path, "pre");
    action.add = get_literals(obj, path, "add");
    action.del = get_literals(obj, path, "del");
    try {
        validate_action(action);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return action;
}

Plan parse_plan(const json& obj, const std::string& path, const std::string& owner) {
    if (!obj.is_object()) {
        fail(path, "expected a plan object");
    }
    check_keys(obj, path, {"name", "goals", "actions"});
    Plan plan;
    plan.owner = owner;
    plan.name = get_string(require(obj, path, "name"), path + ".name");
    if (plan.name.empty()) {
        fail(path + ".name", "plan name must be non-empty");
    }
    if (const json* goals = find(obj, "goals")) {
        if (!goals->is_array()) {
            fail(path + ".goals", "expected an array of goal labels");
        }
        for (std::size_t i = 0; i < goals->size(); ++i) {
            const std::string label = get_string((*goals)[i], path + ".goals[" + std::to_string(i) + "]");
            if (label.empty()) {
                fail(path + ".goals[" + std::to_string(i) + "]", "goal label must be non-empty");
            }
            plan.goals.insert(label);
        }
    }
    if (const json* actions = find(obj, "actions")) {
        if (!actions->is_array()) {
            fail(path + ".actions", "expected an array of actions");
        }
        for (std::size_t i = 0; i < actions->size(); ++i) {
            plan.actions.push_back(parse_action((*actions)[i], path + ".actions[" + std::to_string(i) + "]"));
        }
    }
    return plan;
}

void parse_config(const json& obj, const std::string& path, ProblemSpec& spec) {
    if (!obj.is_object()) {
        fail(path, "expected a config object");
    }
    check_keys(obj, path,
               {"goal_reward", "delay_penalty", "infeasible_payoff", "seed", "agent_order", "tie_break",
                "validate_goals"});
    if (const json* value = find(obj, "goal_reward")) {
        spec.util.goal_reward = get_number(*value, path + ".goal_reward");
        if (spec.util.goal_reward <= 0.0) {
            fail(path + ".goal_reward", "goal_reward must be positive");
        }
    }
    if (const json* value = find(obj, "delay_penalty")) {
        spec.util.delay_penalty = get_number(*value, path + ".delay_penalty");
        if (spec.util.delay_penalty < 0.0) {
            fail(path + ".delay_penalty", "delay_penalty must be non-negative");
        }
    }
    if (const json* value = find(obj, "infeasible_payoff")) {
        spec.util.infeasible_payoff = get_number(*value, path + ".infeasible_payoff");
    }
    if (const json* value = find(obj, "seed")) {
        if (!value->is_number_unsigned() && !value->is_number_integer()) {
            fail(path + ".seed", "expected an unsigned integer seed");
        }
        spec.solve.seed = value->get<std::uint64_t>();
    }
    if (const json* value = find(obj, "agent_order")) {
        const std::string mode = get_string(*value, path + ".agent_order");
        if (mode == "seeded") {
            spec.solve.agent_order = AgentOrderMode::seeded;
        } else if (mode == "declared") {
            spec.solve.agent_order = AgentOrderMode::declared;
        } else {
            fail(path + ".agent_order", "expected 'seeded' or 'declared'");
        }
    }
    if (const json* value = find(obj, "tie_break")) {
        const std::string mode = get_string(*value, path + ".tie_break");
        if (mode == "action-first") {
            spec.solve.tie_break = TieBreakMode::action_first;
        } else if (mode == "seeded") {
            spec.solve.tie_break = TieBreakMode::seeded;
        } else {
            fail(path + ".tie_break", "expected 'action-first' or 'seeded'");
        }
    }
    if (const json* value = find(obj, "validate_goals")) {
        if (!value->is_boolean()) {
            fail(path + ".validate_goals", "expected a boolean");
        }
        spec.validate_goals = value->get<bool>();
    }
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1;
        int column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(e.what(), line, column, "");
    }
    if (!doc.is_object()) {
        fail("", "problem file must be a JSON object");
    }
    check_keys(doc, "", {"format", "name", "init", "config", "agents"});

    ProblemSpec spec;
    const json& format = require(doc, "", "format");
    if (!format.is_number_integer() || format.get<int>() != 1) {
        fail("format", "unsupported format (expected 1)");
    }
    spec.format = 1;
    if (const json* name = find(doc, "name")) {
        spec.problem.name = get_string(*name, "name");
    }
    spec.problem.init.literals = get_literals(doc, "", "init");
    if (const json* config = find(doc, "config")) {
        parse_config(*config, "config", spec);
    }

    const json& agents = require(doc, "", "agents");
    if (!agents.is_array() || agents.empty()) {
        fail("agents", "expected a non-empty array of agents");
    }
    std::set<std::string> agent_names;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        const json& entry = agents[i];
        if (!entry.is_object()) {
            fail(path, "expected an agent object");
        }
        check_keys(entry, path, {"name", "plans"});
        AgentPlans agent;
        agent.name = get_string(require(entry, path, "name"), path + ".name");
        if (agent.name.empty()) {
            fail(path + ".name", "agent name must be non-empty");
        }
        if (!agent_names.insert(agent.name).second) {
            fail(path + ".name", "duplicate agent name '" + agent.name + "'");
        }
        const json& plans = require(entry, path, "plans");
        if (!plans.is_array()) {
            fail(path + ".plans", "expected an array of plans");
        }
        std::set<std::string> plan_names;
        for (std::size_t p = 0; p < plans.size(); ++p) {
            Plan plan = parse_plan(plans[p], path + ".plans[" + std::to_string(p) + "]", agent.name);
            if (!plan_names.insert(plan.name).second) {
                fail(path + ".plans[" + std::to_string(p) + "].name",
                     "duplicate plan name '" + plan.name + "' for agent '" + agent.name + "'");
            }
            agent.plans.push_back(std::move(plan));
        }
        spec.problem.agents.push_back(std::move(agent));
    }

    if (spec.validate_goals) {
        spec.warnings = check_declared_goals(spec.problem);
    }
    return spec;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream input(path);
    if (!input) {
        throw std::runtime_error("cannot open problem file: " + path);
    }
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return parse_problem(buffer.str());
}

namespace {

json literals_to_json(const LiteralSet& literals) {
    json arr = json::array();
    for (const Literal& lit : literals) {
        arr.push_back(lit.name);
    }
    return arr;
}

json config_to_json(const ProblemSpec& spec) {
    return json{
        {"goal_reward", spec.util.goal_reward},
        {"delay_penalty", spec.util.delay_penalty},
        {"infeasible_payoff", spec.util.infeasible_payoff},
        {"seed", spec.solve.seed},
        {"agent_order", spec.solve.agent_order == AgentOrderMode::seeded ? "seeded" : "declared"},
        {"tie_break", spec.solve.tie_break == TieBreakMode::action_first ? "action-first" : "seeded"},
        {"validate_goals", spec.validate_goals},
    };
}

}  // namespace

std::string serialize_problem(const ProblemSpec& spec) {
    json doc;
    doc["format"] = spec.format;
    doc["name"] = spec.problem.name;
    doc["init"] = literals_to_json(spec.problem.init.literals);
    doc["config"] = config_to_json(spec);
    json agents = json::array();
    for (const AgentPlans& agent : spec.problem.agents) {
        json plans = json::array();
        for (const Plan& plan : agent.plans) {
            json actions = json::array();
            for (const Action& action : plan.actions) {
                actions.push_back(json{
                    {"name", action.name},
                    {"pre", literals_to_json(action.pre)},
                    {"add", literals_to_json(action.add)},
                    {"del", literals_to_json(action.del)},
                });
            }
            json goals = json::array();
            for (const std::string& goal : plan.goals) {
                goals.push_back(goal);
            }
            plans.push_back(json{{"name", plan.name}, {"goals", goals}, {"actions", actions}});
        }
        agents.push_back(json{{"name", agent.name}, {"plans", plans}});
    }
    doc["agents"] = agents;
    return doc.dump(2) + "\n";
}

namespace {

json cells_to_json(const std::vector<Cell>& cells) {
    json arr = json::array();
    for (const Cell& cell : cells) {
        arr.push_back(cell);
    }
    return arr;
}

std::vector<Cell> cells_from_json(const json& arr, const std::string& path) {
    if (!arr.is_array()) {
        fail(path, "expected an array of cells");
    }
    std::vector<Cell> cells;
    for (const json& item : arr) {
        cells.push_back(item.get<Cell>());
    }
    return cells;
}

json schedule_to_json(const ReportSchedule& sched) {
    json moves = json::array();
    for (const auto& move : sched.moves) {
        if (move.has_value()) {
            moves.push_back(*move);
        } else {
            moves.push_back(nullptr);
        }
    }
    return json{
        {"plan", sched.plan},   {"moves", moves},           {"finish_time", sched.finish_time},
        {"delay", sched.delay}, {"utility", sched.utility},
    };
}

ReportSchedule schedule_from_json(const json& obj) {
    ReportSchedule sched;
    sched.plan = obj.at("plan").get<std::string>();
    for (const json& move : obj.at("moves")) {
        if (move.is_null()) {
            sched.moves.push_back(std::nullopt);
        } else {
            sched.moves.push_back(move.get<std::string>());
        }
    }
    sched.finish_time = obj.at("finish_time").get<int>();
    sched.delay = obj.at("delay").get<int>();
    sched.utility = obj.at("utility").get<double>();
    return sched;
}

}  // namespace

SolutionReport make_report(const ProblemSpec& spec, const NormalFormGame& game,
                           const std::vector<Cell>& pure, const std::vector<MixedProfile>& mixed,
                           const std::vector<Cell>& pareto, const std::vector<Cell>& welfare) {
    SolutionReport report;
    report.problem = spec.problem.name;
    report.util = spec.util;
    report.seed = spec.solve.seed;
    report.agent_order_mode = spec.solve.agent_order == AgentOrderMode::seeded ? "seeded" : "declared";
    report.tie_break_mode = spec.solve.tie_break == TieBreakMode::action_first ? "action-first" : "seeded";
    report.agents = game.agents();
    report.strategies = game.strategies();
    report.warnings = spec.warnings;

    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const CellOutcome& outcome = game.at_flat(flat);
        ReportCell cell;
        cell.profile = game.cell_at(flat);
        cell.payoffs = outcome.payoffs;
        cell.delays = outcome.delays;
        cell.feasible = outcome.feasible;
        cell.error = outcome.error;
        if (outcome.detail.has_value()) {
            cell.agent_order = outcome.detail->agent_order;
        }
        report.cells.push_back(std::move(cell));
    }

    auto contains_cell = [](const std::vector<Cell>& cells, const Cell& cell) {
        return std::find(cells.begin(), cells.end(), cell) != cells.end();
    };

    for (const Cell& cell : pure) {
        const CellOutcome& outcome = game.at(cell);
        ReportPureEquilibrium eq;
        eq.profile = cell;
        eq.payoffs = outcome.payoffs;
        eq.delays = outcome.delays;
        eq.pareto_optimal = contains_cell(pareto, cell);
        eq.welfare = 0.0;
        for (double p : outcome.payoffs) {
            eq.welfare += p;
        }
        if (outcome.detail.has_value() && outcome.detail->profile.feasible) {
            const SolveResult& solve = *outcome.detail;
            for (std::size_t i = 0; i < solve.profile.agents.size(); ++i) {
                const Plan& plan = spec.problem.agents[i].plans[cell[i]];
                ReportSchedule sched;
                sched.plan = plan.name;
                for (Move move : solve.profile.agents[i].moves) {
                    if (move.is_real()) {
                        sched.moves.push_back(plan.actions[move.action_index].name);
                    } else {
                        sched.moves.push_back(std::nullopt);
                    }
                }
                sched.finish_time = solve.profile.agents[i].finish_time;
                sched.delay = solve.profile.agents[i].delay;
                sched.utility = solve.profile.agents[i].utility;
                eq.schedules.push_back(std::move(sched));
            }
        }
        report.pure.push_back(std::move(eq));
    }

    for (const MixedProfile& profile : mixed) {
        if (profile.degenerate) {
            report.degenerate_supports.push_back(profile.support);
            continue;
        }
        const bool strictly_mixed =
            std::any_of(profile.support.begin(), profile.support.end(),
                        [](const std::vector<int>& s) { return s.size() > 1; });
        if (!strictly_mixed) {
            continue;  // singleton supports duplicate the pure list
        }
        ReportMixedEquilibrium eq;
        eq.probabilities = profile.probabilities;
        eq.support = profile.support;
        eq.payoffs = profile.payoffs;
        report.mixed.push_back(std::move(eq));
    }

    report.pareto = pareto;
    report.welfare_best = welfare;
    return report;
}

std::string serialize_report(const SolutionReport& report) {
    json doc;
    doc["problem"] = report.problem;
    doc["config"] = json{
        {"goal_reward", report.util.goal_reward},
        {"delay_penalty", report.util.delay_penalty},
        {"infeasible_payoff", report.util.infeasible_payoff},
        {"seed", report.seed},
        {"agent_order", report.agent_order_mode},
        {"tie_break", report.tie_break_mode},
    };
    doc["agents"] = report.agents;
    doc["strategies"] = report.strategies;

    json cells = json::array();
    for (const ReportCell& cell : report.cells) {
        cells.push_back(json{
            {"profile", cell.profile},
            {"payoffs", cell.payoffs},
            {"delays", cell.delays},
            {"feasible", cell.feasible},
            {"agent_order", cell.agent_order},
            {"error", cell.error},
        });
    }
    doc["cells"] = cells;

    json pure = json::array();
    for (const ReportPureEquilibrium& eq : report.pure) {
        json schedules = json::array();
        for (const ReportSchedule& sched : eq.schedules) {
            schedules.push_back(schedule_to_json(sched));
        }
        pure.push_back(json{
            {"profile", eq.profile},
            {"payoffs", eq.payoffs},
            {"delays", eq.delays},
            {"pareto_optimal", eq.pareto_optimal},
            {"welfare", eq.welfare},
            {"schedules", schedules},
        });
    }
    json mixed = json::array();
    for (const ReportMixedEquilibrium& eq : report.mixed) {
        mixed.push_back(json{
            {"probabilities", eq.probabilities},
            {"support", eq.support},
            {"payoffs", eq.payoffs},
        });
    }
    doc["equilibria"] = json{
        {"pure", pure},
        {"mixed", mixed},
        {"degenerate_supports", report.degenerate_supports},
    };
    doc["annotations"] = json{
        {"pareto_front", cells_to_json(report.pareto)},
        {"max_welfare", cells_to_json(report.welfare_best)},
    };
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

SolutionReport parse_report(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0, 0, "");
    }
    SolutionReport report;
    report.problem = doc.at("problem").get<std::string>();
    const json& config = doc.at("config");
    report.util.goal_reward = config.at("goal_reward").get<double>();
    report.util.delay_penalty = config.at("delay_penalty").get<double>();
    report.util.infeasible_payoff = config.at("infeasible_payoff").get<double>();
    report.seed = config.at("seed").get<std::uint64_t>();
    report.agent_order_mode = config.at("agent_order").get<std::string>();
    report.tie_break_mode = config.at("tie_break").get<std::string>();
    report.agents = doc.at("agents").get<std::vector<std::string>>();
    report.strategies = doc.at("strategies").get<std::vector<std::vector<std::string>>>();
    for (const json& item : doc.at("cells")) {
        ReportCell cell;
        cell.profile = item.at("profile").get<Cell>();
        cell.payoffs = item.at("payoffs").get<std::vector<double>>();
        cell.delays = item.at("delays").get<std::vector<int>>();
        cell.feasible = item.at("feasible").get<bool>();
        cell.agent_order = item.at("agent_order").get<std::vector<int>>();
        cell.error = item.at("error").get<std::string>();
        report.cells.push_back(std::move(cell));
    }
    const json& equilibria = doc.at("equilibria");
    for (const json& item : equilibria.at("pure")) {
        ReportPureEquilibrium eq;
        eq.profile = item.at("profile").get<Cell>();
        eq.payoffs = item.at("payoffs").get<std::vector<double>>();
        eq.delays = item.at("delays").get<std::vector<int>>();
        eq.pareto_optimal = item.at("pareto_optimal").get<bool>();
        eq.welfare = item.at("welfare").get<double>();
        for (const json& sched : item.at("schedules")) {
            eq.schedules.push_back(schedule_from_json(sched));
        }
        report.pure.push_back(std::move(eq));
    }
    for (const json& item : equilibria.at("mixed")) {
        ReportMixedEquilibrium eq;
        eq.probabilities = item.at("probabilities").get<std::vector<std::vector<double>>>();
        eq.support = item.at("support").get<std::vector<std::vector<int>>>();
        eq.payoffs = item.at("payoffs").get<std::vector<double>>();
        report.mixed.push_back(std::move(eq));
    }
    report.degenerate_supports =
        equilibria.at("degenerate_supports").get<std::vector<std::vector<std::vector<int>>>>();
    const json& annotations = doc.at("annotations");
    report.pareto = cells_from_json(annotations.at("pareto_front"), "annotations.pareto_front");
    report.welfare_best = cells_from_json(annotations.at("max_welfare"), "annotations.max_welfare");
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return report;
}

std::string format_real(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string format_display(double value) {
    if (std::floor(value) == value && std::fabs(value) < 1e15) {
        return std::to_string(static_cast<long long>(value));
    }
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.1f", value);
    return buffer;
}

namespace {

std::string payoff_cell_text(const std::vector<double>& payoffs, const std::vector<int>& delays,
                             bool feasible) {
    std::string text;
    if (!feasible) {
        for (std::size_t i = 0; i < payoffs.size(); ++i) {
            text += (i ? "," : "");
            text += "-inf";
        }
        return text;
    }
    for (std::size_t i = 0; i < payoffs.size(); ++i) {
        text += (i ? "," : "");
        text += format_display(payoffs[i]);
    }
    text += " (";
    for (std::size_t i = 0; i < delays.size(); ++i) {
        text += (i ? "," : "");
        text += std::to_string(delays[i]);
    }
    text += ")";
    return text;
}

// Column width in code points (the empty-move glyph is multi-byte UTF-8).
std::size_t display_width(const std::string& text) {
    std::size_t width = 0;
    for (unsigned char c : text) {
        width += (c & 0xc0) != 0x80;
    }
    return width;
}

std::string grid_text(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], display_width(row[c]));
        }
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size()) {
                line.append(widths[c] - display_width(row[c]) + 2, ' ');
            }
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out += line + "\n";
    }
    return out;
}

std::string strategy_tuple_text(const std::vector<std::vector<std::string>>& strategies, const Cell& cell) {
    std::string text = "(";
    for (std::size_t i = 0; i < cell.size(); ++i) {
        text += (i ? ", " : "");
        text += strategies[i][cell[i]];
    }
    return text + ")";
}

struct MatrixView {
    const std::vector<std::vector<std::string>>& strategies;
    std::vector<Cell> profiles;
    std::vector<std::vector<double>> payoffs;
    std::vector<std::vector<int>> delays;
    std::vector<bool> feasible;
};

std::string render_matrix_view(const MatrixView& view, const std::vector<Cell>& marked) {
    auto is_marked = [&](const Cell& cell) {
        return std::find(marked.begin(), marked.end(), cell) != marked.end();
    };

    if (view.strategies.size() == 2) {
        const std::size_t rows = view.strategies[0].size();
        const std::size_t cols = view.strategies[1].size();
        std::vector<std::vector<std::string>> grid;
        std::vector<std::string> header{""};
        for (std::size_t c = 0; c < cols; ++c) {
            header.push_back(view.strategies[1][c]);
        }
        grid.push_back(std::move(header));
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::string> line{view.strategies[0][r]};
            for (std::size_t c = 0; c < cols; ++c) {
                // profiles are stored in flat order: first agent fastest
                const std::size_t flat = c * rows + r;
                std::string cell =
                    payoff_cell_text(view.payoffs[flat], view.delays[flat], view.feasible[flat]);
                if (is_marked(view.profiles[flat])) {
                    cell += " *";
                }
                line.push_back(std::move(cell));
            }
            grid.push_back(std::move(line));
        }
        return grid_text(grid);
    }

    std::vector<std::vector<std::string>> lines;
    for (std::size_t flat = 0; flat < view.profiles.size(); ++flat) {
        std::string cell = payoff_cell_text(view.payoffs[flat], view.delays[flat], view.feasible[flat]);
        if (is_marked(view.profiles[flat])) {
            cell += " *";
        }
        lines.push_back({strategy_tuple_text(view.strategies, view.profiles[flat]), cell});
    }
    return grid_text(lines);
}

}  // namespace

std::string render_matrix(const NormalFormGame& game, const std::vector<Cell>& marked) {
    MatrixView view{game.strategies(), {}, {}, {}, {}};
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const CellOutcome& outcome = game.at_flat(flat);
        view.profiles.push_back(game.cell_at(flat));
        view.payoffs.push_back(outcome.payoffs);
        view.delays.push_back(outcome.delays);
        view.feasible.push_back(outcome.feasible);
    }
    return render_matrix_view(view, marked);
}

namespace {

std::string render_schedule_rows(const std::vector<std::string>& agent_names,
                                 const std::vector<std::vector<std::optional<std::string>>>& rows) {
    std::vector<std::vector<std::string>> grid;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> line{agent_names[i]};
        for (const auto& move : rows[i]) {
            line.push_back(move.has_value() ? *move : "\xc2\xb7");
        }
        grid.push_back(std::move(line));
    }
    return grid_text(grid);
}

}  // namespace

std::string render_schedule(const std::vector<std::string>& agent_names,
                            const std::vector<const Plan*>& plans, const ScheduleProfile& profile) {
    if (!profile.feasible) {
        throw std::invalid_argument("cannot render an infeasible schedule profile");
    }
    std::vector<std::vector<std::optional<std::string>>> rows;
    for (std::size_t i = 0; i < profile.agents.size(); ++i) {
        std::vector<std::optional<std::string>> row;
        for (Move move : profile.agents[i].moves) {
            if (move.is_real()) {
                row.push_back(plans[i]->actions[move.action_index].name);
            } else {
                row.push_back(std::nullopt);
            }
        }
        rows.push_back(std::move(row));
    }
    return render_schedule_rows(agent_names, rows);
}

std::string render_report_text(const SolutionReport& report) {
    std::ostringstream out;
    out << "problem: " << report.problem << "\n";
    out << "config: goal_reward=" << format_display(report.util.goal_reward)
        << " delay_penalty=" << format_display(report.util.delay_penalty)
        << " infeasible_payoff=" << format_display(report.util.infeasible_payoff) << " seed=" << report.seed
        << " agent_order=" << report.agent_order_mode << " tie_break=" << report.tie_break_mode << "\n";
    for (const std::string& warning : report.warnings) {
        out << "warning: " << warning << "\n";
    }
    out << "\n";

    out << "payoff matrix";
    if (report.agents.size() == 2) {
        out << " (rows: " << report.agents[0] << ", columns: " << report.agents[1] << ")";
    }
    out << "; cells: payoffs (delays); * = pure Nash equilibrium\n";
    MatrixView view{report.strategies, {}, {}, {}, {}};
    std::vector<Cell> marked;
    for (const ReportPureEquilibrium& eq : report.pure) {
        marked.push_back(eq.profile);
    }
    for (const ReportCell& cell : report.cells) {
        view.profiles.push_back(cell.profile);
        view.payoffs.push_back(cell.payoffs);
        view.delays.push_back(cell.delays);
        view.feasible.push_back(cell.feasible);
    }
    out << render_matrix_view(view, marked);
    for (const ReportCell& cell : report.cells) {
        if (!cell.error.empty()) {
            out << "cell error at " << strategy_tuple_text(report.strategies, cell.profile) << ": "
                << cell.error << "\n";
        }
    }
    out << "\n";

    out << "pure equilibria: " << report.pure.size() << "\n";
    for (const ReportPureEquilibrium& eq : report.pure) {
        out << "  " << strategy_tuple_text(report.strategies, eq.profile) << "  payoffs ";
        for (std::size_t i = 0; i < eq.payoffs.size(); ++i) {
            out << (i ? "," : "") << format_display(eq.payoffs[i]);
        }
        out << "  delays (";
        for (std::size_t i = 0; i < eq.delays.size(); ++i) {
            out << (i ? "," : "") << eq.delays[i];
        }
        out << ")  welfare " << format_display(eq.welfare);
        if (eq.pareto_optimal) {
            out << "  pareto-optimal";
        }
        out << "\n";
        if (!eq.schedules.empty()) {
            std::vector<std::vector<std::optional<std::string>>> rows;
            for (const ReportSchedule& sched : eq.schedules) {
                rows.push_back(sched.moves);
            }
            std::istringstream gantt(render_schedule_rows(report.agents, rows));
            std::string line;
            while (std::getline(gantt, line)) {
                out << "    " << line << "\n";
            }
        }
    }

    out << "mixed equilibria: " << report.mixed.size() << "\n";
    for (const ReportMixedEquilibrium& eq : report.mixed) {
        for (std::size_t a = 0; a < eq.probabilities.size(); ++a) {
            out << "  " << report.agents[a] << ":";
            for (std::size_t s = 0; s < eq.probabilities[a].size(); ++s) {
                if (eq.probabilities[a][s] > 0.0) {
                    out << " " << report.strategies[a][s] << "=" << format_real(eq.probabilities[a][s]);
                }
            }
            out << "\n";
        }
        out << "  expected payoffs: ";
        for (std::size_t i = 0; i < eq.payoffs.size(); ++i) {
            out << (i ? "," : "") << format_real(eq.payoffs[i]);
        }
        out << "\n";
    }
    for (const auto& support : report.degenerate_supports) {
        out << "degenerate support (infinitely many candidate mixes):";
        for (std::size_t a = 0; a < support.size(); ++a) {
            out << " " << report.agents[a] << "={";
            for (std::size_t s = 0; s < support[a].size(); ++s) {
                out << (s ? "," : "") << report.strategies[a][support[a][s]];
            }
            out << "}";
        }
        out << "\n";
    }

    out << "pareto front:";
    for (const Cell& cell : report.pareto) {
        out << " " << strategy_tuple_text(report.strategies, cell);
    }
    out << "\n";
    out << "max welfare:";
    for (const Cell& cell : report.welfare_best) {
        out << " " << strategy_tuple_text(report.strategies, cell);
    }
    out << "\n";
    return out.str();
}

namespace {

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string export_nfg(const NormalFormGame& game, const std::string& title) {
    std::string out = "NFG 1 R " + quote(title) + " {";
    for (const std::string& name : game.agents()) {
        out += " " + quote(name);
    }
    out += " } {";
    for (int extent : game.extents()) {
        out += " " + std::to_string(extent);
    }
    out += " }\n\n";
    for (std::size_t flat = 0; flat < game.cell_count(); ++flat) {
        const CellOutcome& outcome = game.at_flat(flat);
        for (int a = 0; a < game.num_agents(); ++a) {
            if (flat != 0 || a != 0) {
                out += " ";
            }
            out += format_real(outcome.payoffs[a]);
        }
    }
    out += "\n";
    return out;
}

namespace {

class NfgLexer {
public:
    explicit NfgLexer(const std::string& text) : text_(text) {}

    bool done() {
        skip_space();
        return pos_ >= text_.size();
    }

    std::string next_token() {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of nfg input", 0, 0, "");
        }
        if (text_[pos_] == '"') {
            ++pos_;
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    ++pos_;
                }
                out += text_[pos_++];
            }
            if (pos_ >= text_.size()) {
                throw ParseError("unterminated string in nfg input", 0, 0, "");
            }
            ++pos_;  // closing quote
            return "\"" + out;
        }
        if (text_[pos_] == '{' || text_[pos_] == '}') {
            return std::string(1, text_[pos_++]);
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '{' && text_[pos_] != '}') {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

std::string expect_quoted(NfgLexer& lexer, const char* what) {
    std::string token = lexer.next_token();
    if (token.empty() || token[0] != '"') {
        throw ParseError(std::string("expected a quoted ") + what + " in nfg input", 0, 0, "");
    }
    return token.substr(1);
}

}  // namespace

NfgGame parse_nfg(const std::string& text) {
    NfgLexer lexer(text);
    auto expect = [&](const std::string& token) {
        const std::string got = lexer.next_token();
        if (got != token) {
            throw ParseError("expected '" + token + "' in nfg input, got '" + got + "'", 0, 0, "");
        }
    };
    expect("NFG");
    expect("1");
    expect("R");

    NfgGame game;
    game.title = expect_quoted(lexer, "title");
    expect("{");
    for (std::string token = lexer.next_token(); token != "}"; token = lexer.next_token()) {
        if (token.empty() || token[0] != '"') {
            throw ParseError("expected a quoted player name in nfg input", 0, 0, "");
        }
        game.players.push_back(token.substr(1));
    }
    expect("{");
    for (std::string token = lexer.next_token(); token != "}"; token = lexer.next_token()) {
        int extent = 0;
        const auto result = std::from_chars(token.data(), token.data() + token.size(), extent);
        if (result.ec != std::errc{} || result.ptr != token.data() + token.size() || extent <= 0) {
            throw ParseError("expected a positive strategy count in nfg input, got '" + token + "'", 0, 0, "");
        }
        game.extents.push_back(extent);
    }
    if (game.players.size() != game.extents.size() || game.players.empty()) {
        throw ParseError("nfg player list and strategy count list disagree", 0, 0, "");
    }

    std::size_t cells = 1;
    for (int extent : game.extents) {
        cells *= static_cast<std::size_t>(extent);
    }
    game.payoffs.assign(cells, std::vector<double>(game.players.size(), 0.0));
    for (std::size_t flat = 0; flat < cells; ++flat) {
        for (std::size_t a = 0; a < game.players.size(); ++a) {
            const std::string token = lexer.next_token();
            char* end = nullptr;
            const double value = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size()) {
                throw ParseError("expected a payoff value in nfg input, got '" + token + "'", 0, 0, "");
            }
            game.payoffs[flat][a] = value;
        }
    }
    if (!lexer.done()) {
        throw ParseError("trailing content after nfg payoffs", 0, 0, "");
    }
    return game;
}

}  // namespace plangame
