#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "episim/burden.hpp"
#include "episim/composer.hpp"
#include "episim/model.hpp"

namespace episim {

using json = nlohmann::json;

/// Burden settings riding along with a scenario.
struct BurdenConfig {
    AgeBandTable age_table = uk_default_table();
    double target_avg_mortality = 0.009;
    std::set<std::string> g_bands = {"70-79", "80+"};
    double beds_per_death = 1.0;
};

struct SweepParameter {
    std::string path;          // dotted config path, e.g. disease.r0
    std::vector<json> values;
};

/// Cross-product sweep; every cell is validated before anything runs.
struct SweepGrid {
    ScenarioConfig base;
    std::vector<SweepParameter> parameters;
    std::optional<BurdenConfig> burden;
};

struct ParsedConfig {
    ScenarioConfig scenario;
    std::optional<SubpopulationPlan> plan;      // present when a compose section exists
    std::optional<SweepGrid> sweep;             // present when a sweep section exists
    std::optional<BurdenConfig> burden;         // present when a burden section exists
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                                const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in '" + where + "'");
}

template <typename T>
void read_field(const json& obj, const std::string& where, const std::string& key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw ConfigError(where + "." + key + ": " + ex.what());
    }
}

inline DiseaseParams parse_disease(const json& obj) {
    reject_unknown_keys(obj, {"r0", "incubation_mean_days", "erlang_k", "erlang_rate_per_day"},
                        "disease");
    DiseaseParams disease;
    read_field(obj, "disease", "r0", disease.r0);
    read_field(obj, "disease", "incubation_mean_days", disease.incubation_mean_days);
    read_field(obj, "disease", "erlang_k", disease.erlang_k);
    read_field(obj, "disease", "erlang_rate_per_day", disease.erlang_rate_per_day);
    return disease;
}

inline PopulationSpec parse_population(const json& obj) {
    reject_unknown_keys(obj, {"n_total", "alpha"}, "population");
    if (!obj.contains("n_total")) throw ConfigError("missing required key 'population.n_total'");
    PopulationSpec pop;
    read_field(obj, "population", "n_total", pop.n_total);
    read_field(obj, "population", "alpha", pop.alpha);
    return pop;
}

inline InterventionPolicy parse_policy(const json& obj) {
    reject_unknown_keys(obj, {"phases"}, "policy");
    InterventionPolicy policy;
    if (!obj.contains("phases")) return policy;
    const auto& phases = obj.at("phases");
    if (!phases.is_array()) throw ConfigError("policy.phases must be an array");
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const auto& ph = phases[i];
        const std::string where = "policy.phases[" + std::to_string(i) + "]";
        reject_unknown_keys(ph, {"trigger_s_fraction", "trigger_day_offset", "r0_prime", "c"},
                            where);
        PolicyPhase phase;
        if (ph.contains("trigger_s_fraction"))
            phase.trigger_s_fraction = ph.at("trigger_s_fraction").get<double>();
        if (ph.contains("trigger_day_offset"))
            phase.trigger_day_offset = ph.at("trigger_day_offset").get<int>();
        read_field(ph, where, "r0_prime", phase.r0_prime);
        read_field(ph, where, "c", phase.c);
        policy.phases.push_back(phase);
    }
    return policy;
}

inline BurdenConfig parse_burden(const json& obj) {
    reject_unknown_keys(obj, {"age_table", "target_avg_mortality", "g_bands", "beds_per_death"},
                        "burden");
    BurdenConfig burden;
    read_field(obj, "burden", "target_avg_mortality", burden.target_avg_mortality);
    read_field(obj, "burden", "beds_per_death", burden.beds_per_death);
    if (obj.contains("g_bands")) {
        burden.g_bands.clear();
        for (const auto& label : obj.at("g_bands")) burden.g_bands.insert(label.get<std::string>());
    }
    if (obj.contains("age_table")) {
        burden.age_table.bands.clear();
        const auto& table = obj.at("age_table");
        for (std::size_t b = 0; b < table.size(); ++b) {
            const std::string where = "burden.age_table[" + std::to_string(b) + "]";
            reject_unknown_keys(table[b], {"label", "size_millions", "death_prob"}, where);
            AgeBand band;
            read_field(table[b], where, "label", band.label);
            read_field(table[b], where, "size_millions", band.size_millions);
            read_field(table[b], where, "death_prob", band.death_prob);
            burden.age_table.bands.push_back(band);
        }
        const auto violations = validate_age_table(burden.age_table);
        if (!violations.empty()) throw ConfigError(describe(violations));
    }
    return burden;
}

inline SubpopulationPlan parse_compose(const json& obj, const ScenarioConfig& base) {
    reject_unknown_keys(obj, {"subpopulations"}, "compose");
    if (!obj.contains("subpopulations"))
        throw ConfigError("missing required key 'compose.subpopulations'");
    SubpopulationPlan plan;
    plan.base = base;
    const auto& parts = obj.at("subpopulations");
    for (std::size_t m = 0; m < parts.size(); ++m) {
        const std::string where = "compose.subpopulations[" + std::to_string(m) + "]";
        reject_unknown_keys(parts[m], {"name", "size", "start_offset_days"}, where);
        Subpopulation part;
        read_field(parts[m], where, "name", part.name);
        if (!parts[m].contains("size")) throw ConfigError("missing required key '" + where + ".size'");
        read_field(parts[m], where, "size", part.size);
        read_field(parts[m], where, "start_offset_days", part.start_offset_days);
        plan.parts.push_back(part);
    }
    return plan;
}

inline SweepGrid parse_sweep(const json& obj, const ScenarioConfig& base,
                             const std::optional<BurdenConfig>& burden) {
    reject_unknown_keys(obj, {"parameters"}, "sweep");
    if (!obj.contains("parameters")) throw ConfigError("missing required key 'sweep.parameters'");
    SweepGrid grid;
    grid.base = base;
    grid.burden = burden;
    for (std::size_t i = 0; i < obj.at("parameters").size(); ++i) {
        const auto& par = obj.at("parameters")[i];
        const std::string where = "sweep.parameters[" + std::to_string(i) + "]";
        reject_unknown_keys(par, {"path", "values"}, where);
        SweepParameter sp;
        if (!par.contains("path") || !par.contains("values"))
            throw ConfigError(where + " needs both 'path' and 'values'");
        sp.path = par.at("path").get<std::string>();
        for (const auto& v : par.at("values")) sp.values.push_back(v);
        if (sp.values.empty()) throw ConfigError(where + ".values must not be empty");
        grid.parameters.push_back(sp);
    }
    return grid;
}

} // namespace detail

inline ScenarioConfig scenario_from_json(const json& root) {
    detail::reject_unknown_keys(root, {"disease", "population", "policy", "run", "burden",
                                       "compose", "sweep"},
                                "(top level)");
    ScenarioConfig cfg;
    if (root.contains("disease")) cfg.disease = detail::parse_disease(root.at("disease"));
    if (!root.contains("population")) throw ConfigError("missing required key 'population.n_total'");
    cfg.population = detail::parse_population(root.at("population"));
    if (root.contains("policy")) cfg.policy = detail::parse_policy(root.at("policy"));
    if (root.contains("run")) {
        const auto& run = root.at("run");
        detail::reject_unknown_keys(run,
                                    {"seed", "replicates", "t_max_days", "seed_infected_fraction",
                                     "plot_threshold_fraction"},
                                    "run");
        detail::read_field(run, "run", "seed", cfg.base_seed);
        detail::read_field(run, "run", "replicates", cfg.replicates);
        detail::read_field(run, "run", "t_max_days", cfg.t_max_days);
        detail::read_field(run, "run", "seed_infected_fraction", cfg.seed_infected_fraction);
        detail::read_field(run, "run", "plot_threshold_fraction", cfg.plot_threshold_fraction);
    }
    return cfg;
}

inline json to_json(const ScenarioConfig& cfg) {
    json root;
    root["disease"] = {{"r0", cfg.disease.r0},
                       {"incubation_mean_days", cfg.disease.incubation_mean_days},
                       {"erlang_k", cfg.disease.erlang_k},
                       {"erlang_rate_per_day", cfg.disease.erlang_rate_per_day}};
    root["population"] = {{"n_total", cfg.population.n_total}, {"alpha", cfg.population.alpha}};
    json phases = json::array();
    for (const auto& ph : cfg.policy.phases) {
        json p;
        if (ph.trigger_s_fraction) p["trigger_s_fraction"] = *ph.trigger_s_fraction;
        if (ph.trigger_day_offset) p["trigger_day_offset"] = *ph.trigger_day_offset;
        p["r0_prime"] = ph.r0_prime;
        p["c"] = ph.c;
        phases.push_back(p);
    }
    root["policy"] = {{"phases", phases}};
    root["run"] = {{"seed", cfg.base_seed},
                   {"replicates", cfg.replicates},
                   {"t_max_days", cfg.t_max_days},
                   {"seed_infected_fraction", cfg.seed_infected_fraction},
                   {"plot_threshold_fraction", cfg.plot_threshold_fraction}};
    return root;
}

/// Applies a dotted-path override like "disease.r0=3.0" or
/// "policy.phases[0].c=0.5". The value parses as JSON when possible and
/// falls back to a plain string.
inline void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }

    json* node = &root;
    std::size_t pos = 0;
    while (pos < path.size()) {
        std::size_t dot = path.find('.', pos);
        if (dot == std::string::npos) dot = path.size();
        std::string key = path.substr(pos, dot - pos);
        std::optional<std::size_t> index;
        const auto bracket = key.find('[');
        if (bracket != std::string::npos) {
            const auto close = key.find(']', bracket);
            if (close == std::string::npos)
                throw ConfigError("override path '" + path + "' has an unclosed index");
            index = static_cast<std::size_t>(std::stoul(key.substr(bracket + 1, close - bracket - 1)));
            key = key.substr(0, bracket);
        }
        const bool last = dot >= path.size();
        json& child = (*node)[key];
        if (index) {
            if (!child.is_array()) child = json::array();
            while (child.size() <= *index) child.push_back(json::object());
            if (last)
                child[*index] = value;
            else
                node = &child[*index];
        } else if (last) {
            child = value;
        } else {
            if (!child.is_object()) child = json::object();
            node = &child;
        }
        pos = dot + 1;
    }
}

/// Parses a config file, applying --set style overrides first. The result
/// always carries the validated scenario; compose/sweep/burden sections are
/// attached when present.
inline ParsedConfig parse_config(const std::string& path,
                                 const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json root;
    try {
        root = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const json::parse_error& ex) {
        throw ConfigError("syntax error in '" + path + "': " + ex.what());
    }
    for (const auto& ov : overrides) apply_override(root, ov);

    ParsedConfig parsed;
    parsed.scenario = scenario_from_json(root);
    const auto violations = validate_scenario(parsed.scenario);
    if (!violations.empty()) throw ConfigError(describe(violations));

    if (root.contains("burden")) parsed.burden = detail::parse_burden(root.at("burden"));
    if (root.contains("compose")) {
        parsed.plan = detail::parse_compose(root.at("compose"), parsed.scenario);
        const auto plan_violations = validate_plan(*parsed.plan);
        if (!plan_violations.empty()) throw ConfigError(describe(plan_violations));
    }
    if (root.contains("sweep"))
        parsed.sweep = detail::parse_sweep(root.at("sweep"), parsed.scenario, parsed.burden);
    return parsed;
}

/// Expands a sweep grid into the cross product of its parameter values.
/// Every cell is validated before any cell is returned.
inline std::vector<ScenarioConfig> expand_sweep(const SweepGrid& grid) {
    std::vector<json> cells = {to_json(grid.base)};
    for (const auto& par : grid.parameters) {
        std::vector<json> next;
        for (const auto& cell : cells) {
            for (const auto& value : par.values) {
                json copy = cell;
                apply_override(copy, par.path + "=" + value.dump());
                next.push_back(std::move(copy));
            }
        }
        cells = std::move(next);
    }
    std::vector<ScenarioConfig> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        ScenarioConfig cfg = scenario_from_json(cell);
        const auto violations = validate_scenario(cfg);
        if (!violations.empty()) throw ConfigError(describe(violations));
        out.push_back(cfg);
    }
    return out;
}

} // namespace episim
