#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace episim {

/// beta = R0 * sigma, transmissions per infectious person per day.
inline double effective_beta(double r0, double sigma) { return r0 * sigma; }

/// Virus characteristics. sigma and beta are derived so the identities
/// sigma = lambda/k and beta/sigma = R0 hold by construction.
struct DiseaseParams {
    double r0 = 2.5;
    double incubation_mean_days = 7.0;  // 0 encodes the no-incubation variant
    int erlang_k = 3;
    double erlang_rate_per_day = 1.0 / 7.0;

    double sigma_per_day() const { return erlang_rate_per_day / erlang_k; }
    double mean_infectious_days() const { return 1.0 / sigma_per_day(); }
    double beta_per_day() const { return effective_beta(r0, sigma_per_day()); }
};

struct PopulationSpec {
    std::int64_t n_total = 100000;
    double alpha = 0.2;  // fraction in the vulnerable group G

    /// Group size rounds half-up so the partition is deterministic.
    std::int64_t n_g() const { return std::llround(alpha * static_cast<double>(n_total)); }
    std::int64_t n_other() const { return n_total - n_g(); }
};

/// One intervention phase. Exactly one trigger must be set: either the
/// prevalence condition (first day with S/N <= x) or a day offset counted
/// from the start of the previous phase (phase 0 starts at day 0).
/// Once active, the phase sets the reproductive number to r0_prime and the
/// probability that a transmission targets G to c * alpha.
struct PolicyPhase {
    std::optional<double> trigger_s_fraction;
    std::optional<int> trigger_day_offset;
    double r0_prime = 2.5;
    double c = 1.0;
};

struct InterventionPolicy {
    std::vector<PolicyPhase> phases;
};

struct ScenarioConfig {
    DiseaseParams disease;
    PopulationSpec population;
    InterventionPolicy policy;
    double seed_infected_fraction = 0.001;
    double plot_threshold_fraction = 0.005;
    int t_max_days = 500;
    std::uint64_t base_seed = 1;
    int replicates = 30;
};

struct Violation {
    std::string field;
    std::string message;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Checks every scenario invariant and names each breach by field path.
/// An empty result means the config is internally consistent.
inline std::vector<Violation> validate_scenario(const ScenarioConfig& cfg) {
    std::vector<Violation> out;
    const auto bad = [&](std::string field, std::string message) {
        out.push_back({std::move(field), std::move(message)});
    };

    if (!std::isfinite(cfg.disease.r0) || cfg.disease.r0 < 0.0)
        bad("disease.r0", "r0 must be finite and non-negative");
    if (!std::isfinite(cfg.disease.incubation_mean_days) || cfg.disease.incubation_mean_days < 0.0)
        bad("disease.incubation_mean_days", "incubation mean must be finite and non-negative");
    if (cfg.disease.erlang_k < 1)
        bad("disease.erlang_k", "erlang shape k must be a positive integer");
    if (!std::isfinite(cfg.disease.erlang_rate_per_day) || cfg.disease.erlang_rate_per_day <= 0.0)
        bad("disease.erlang_rate_per_day", "erlang rate must be positive");

    if (cfg.population.n_total < 2)
        bad("population.n_total", "population size must be at least 2");
    if (!(cfg.population.alpha > 0.0 && cfg.population.alpha < 1.0)) {
        bad("population.alpha", "alpha must lie in (0,1)");
    } else if (cfg.population.n_total >= 2
               && (cfg.population.n_g() < 1 || cfg.population.n_g() >= cfg.population.n_total)) {
        bad("population.alpha", "alpha leaves one group empty at this population size");
    }

    for (std::size_t i = 0; i < cfg.policy.phases.size(); ++i) {
        const auto& ph = cfg.policy.phases[i];
        const std::string base = "policy.phases[" + std::to_string(i) + "]";
        const bool has_x = ph.trigger_s_fraction.has_value();
        const bool has_offset = ph.trigger_day_offset.has_value();
        if (has_x == has_offset)
            bad(base, "exactly one of trigger_s_fraction and trigger_day_offset must be set");
        if (has_x && !(*ph.trigger_s_fraction > 0.0 && *ph.trigger_s_fraction < 1.0))
            bad(base + ".trigger_s_fraction", "trigger fraction x must lie in (0,1)");
        if (has_offset && *ph.trigger_day_offset < 0)
            bad(base + ".trigger_day_offset", "day offset must be non-negative");
        if (!(ph.c > 0.0 && ph.c <= 1.0))
            bad(base + ".c", "c must lie in (0,1]");
        if (!std::isfinite(ph.r0_prime) || ph.r0_prime <= 0.0)
            bad(base + ".r0_prime", "r0_prime must be positive");
    }

    if (!(cfg.seed_infected_fraction > 0.0 && cfg.seed_infected_fraction < 1.0))
        bad("run.seed_infected_fraction", "seed fraction must lie in (0,1)");
    if (!(cfg.plot_threshold_fraction >= 0.0 && cfg.plot_threshold_fraction < 1.0))
        bad("run.plot_threshold_fraction", "plot threshold must lie in [0,1)");
    if (cfg.seed_infected_fraction >= cfg.plot_threshold_fraction
        && cfg.plot_threshold_fraction > 0.0)
        bad("run.seed_infected_fraction", "seed fraction must be below the plot threshold");
    if (cfg.t_max_days < 1) bad("run.t_max_days", "t_max_days must be at least 1");
    if (cfg.replicates < 1) bad("run.replicates", "replicates must be at least 1");

    if (out.empty()) {
        const auto seeds = static_cast<std::int64_t>(
            std::ceil(cfg.seed_infected_fraction * static_cast<double>(cfg.population.n_total)));
        if (seeds >= cfg.population.n_total)
            bad("run.seed_infected_fraction", "initial infectious count reaches the population size");
    }
    return out;
}

inline std::string describe(const std::vector<Violation>& violations) {
    std::string msg;
    for (const auto& v : violations) {
        if (!msg.empty()) msg += "; ";
        msg += v.field + ": " + v.message;
    }
    return msg;
}

inline void validate_or_throw(const ScenarioConfig& cfg) {
    const auto violations = validate_scenario(cfg);
    if (!violations.empty()) throw ConfigError(describe(violations));
}

} // namespace episim
