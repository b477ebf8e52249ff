#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "episim/engine.hpp"

namespace episim {

/// One isolated subpopulation: it runs its own epidemic (no cross-infection)
/// whose threshold-aligned curve is shifted by start_offset_days before
/// aggregation.
struct Subpopulation {
    std::string name;
    std::int64_t size = 0;
    int start_offset_days = 0;
};

/// Shared disease/policy/run settings plus the subpopulation layout.
/// base.population.n_total must equal the sum of part sizes.
struct SubpopulationPlan {
    ScenarioConfig base;
    std::vector<Subpopulation> parts;
};

inline std::vector<Violation> validate_plan(const SubpopulationPlan& plan) {
    std::vector<Violation> out = validate_scenario(plan.base);
    if (plan.parts.empty()) out.push_back({"compose.subpopulations", "plan needs at least one subpopulation"});
    std::int64_t sum = 0;
    for (std::size_t m = 0; m < plan.parts.size(); ++m) {
        const auto& part = plan.parts[m];
        const std::string base = "compose.subpopulations[" + std::to_string(m) + "]";
        if (part.size <= 0) out.push_back({base + ".size", "subpopulation size must be positive"});
        if (part.start_offset_days < 0)
            out.push_back({base + ".start_offset_days", "offset must be non-negative"});
        for (std::size_t j = 0; j < m; ++j)
            if (!part.name.empty() && part.name == plan.parts[j].name)
                out.push_back({base + ".name", "duplicate subpopulation name '" + part.name + "'"});
        sum += part.size;
    }
    if (!plan.parts.empty() && sum != plan.base.population.n_total)
        out.push_back({"compose.subpopulations",
                       "sizes sum to " + std::to_string(sum) + " but population.n_total is "
                           + std::to_string(plan.base.population.n_total)});
    return out;
}

struct AggregateDay {
    int day = 0;
    std::int64_t s = 0, e = 0, i = 0, r = 0;
};

/// Day-wise sum of the shifted component curves. Days before a component's
/// shifted start contribute a fully susceptible group; days past its end
/// repeat its final record (extinction is absorbing).
struct AggregateTrajectory {
    std::int64_t n_total = 0;
    std::vector<AggregateDay> days;
    std::vector<Trajectory> components;  // threshold-aligned, unshifted
    std::vector<int> offsets;
};

struct CompositionEnsemble {
    SubpopulationPlan plan;
    std::vector<AggregateTrajectory> replicates;
};

namespace detail {

inline ScenarioConfig part_config(const SubpopulationPlan& plan, const Subpopulation& part) {
    ScenarioConfig cfg = plan.base;
    cfg.population.n_total = part.size;
    return cfg;
}

inline void accumulate(AggregateDay& day, const Trajectory& comp, std::int64_t part_size,
                       int local_day) {
    if (comp.days.empty() || local_day < 0) {
        day.s += part_size;  // epidemic not yet started here
        return;
    }
    const auto& rec = local_day < static_cast<int>(comp.days.size())
                          ? comp.days[static_cast<std::size_t>(local_day)]
                          : comp.days.back();
    day.s += rec.s;
    day.e += rec.e;
    day.i += rec.i;
    day.r += rec.r;
}

} // namespace detail

/// Simulates every subpopulation independently on streams derived from
/// `replicate_rng`, aligns each to its own plot threshold, shifts by its
/// offset and sums day-wise.
inline AggregateTrajectory compose_once(const SubpopulationPlan& plan,
                                        const RngStream& replicate_rng) {
    AggregateTrajectory agg;
    int length = 1;
    for (std::size_t m = 0; m < plan.parts.size(); ++m) {
        const auto& part = plan.parts[m];
        ScenarioConfig cfg = detail::part_config(plan, part);
        RngStream rng = derive_stream(replicate_rng, m);
        Trajectory aligned = align_to_threshold(run(cfg, rng), cfg.plot_threshold_fraction);
        const int end = part.start_offset_days + static_cast<int>(aligned.days.size());
        if (end > length) length = end;
        agg.components.push_back(std::move(aligned));
        agg.offsets.push_back(part.start_offset_days);
        agg.n_total += part.size;
    }
    agg.days.resize(static_cast<std::size_t>(length));
    for (int t = 0; t < length; ++t) {
        auto& day = agg.days[static_cast<std::size_t>(t)];
        day.day = t;
        for (std::size_t m = 0; m < plan.parts.size(); ++m)
            detail::accumulate(day, agg.components[m], plan.parts[m].size, t - agg.offsets[m]);
    }
    return agg;
}

inline CompositionEnsemble compose(const SubpopulationPlan& plan, std::uint64_t base_seed,
                                   int replicates) {
    const auto violations = validate_plan(plan);
    if (!violations.empty()) throw ConfigError(describe(violations));
    CompositionEnsemble out;
    out.plan = plan;
    const RngStream base = make_rng(base_seed);
    out.replicates.reserve(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r)
        out.replicates.push_back(compose_once(plan, derive_stream(base, static_cast<std::uint64_t>(r))));
    return out;
}

/// Argmax day (first if tied) and maximum of I(t)/N over a prevalence series.
inline std::pair<int, double> peak_prevalence(const std::vector<double>& i_over_n) {
    if (i_over_n.empty()) throw std::invalid_argument("peak_prevalence: empty series");
    std::size_t best = 0;
    for (std::size_t t = 1; t < i_over_n.size(); ++t)
        if (i_over_n[t] > i_over_n[best]) best = t;
    return {static_cast<int>(best), i_over_n[best]};
}

inline std::vector<double> prevalence_series(const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.days.size());
    const double n = static_cast<double>(traj.scenario.population.n_total);
    for (const auto& rec : traj.days) out.push_back(static_cast<double>(rec.i) / n);
    return out;
}

inline std::vector<double> prevalence_series(const AggregateTrajectory& agg) {
    std::vector<double> out;
    out.reserve(agg.days.size());
    const double n = static_cast<double>(agg.n_total);
    for (const auto& rec : agg.days) out.push_back(static_cast<double>(rec.i) / n);
    return out;
}

inline std::pair<int, double> peak_prevalence(const Trajectory& traj) {
    return peak_prevalence(prevalence_series(traj));
}

inline std::pair<int, double> peak_prevalence(const AggregateTrajectory& agg) {
    return peak_prevalence(prevalence_series(agg));
}

} // namespace episim
