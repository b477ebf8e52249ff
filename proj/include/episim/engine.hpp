#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "episim/distributions.hpp"
#include "episim/model.hpp"

namespace episim {

namespace detail {

/// Counts of people indexed by remaining days (1-based), as a ring buffer.
/// advance() shifts every bucket down one day and returns the count that
/// reached zero.
template <typename Count>
class RemainingDayQueue {
public:
    explicit RemainingDayQueue(std::size_t capacity = 64) : slots_(capacity, Count{}) {}

    Count total() const { return total_; }

    void add(std::int64_t remaining_days, Count count = Count{1}) {
        if (remaining_days < 1)
            throw std::logic_error("remaining-day queue: remaining days must be >= 1");
        if (static_cast<std::size_t>(remaining_days) > slots_.size())
            grow(static_cast<std::size_t>(remaining_days));
        slots_[index(remaining_days)] += count;
        total_ += count;
    }

    Count advance() {
        Count out = slots_[head_];
        slots_[head_] = Count{};
        head_ = (head_ + 1) % slots_.size();
        total_ -= out;
        return out;
    }

    Count at(std::int64_t remaining_days) const {
        if (remaining_days < 1 || static_cast<std::size_t>(remaining_days) > slots_.size())
            return Count{};
        return slots_[index(remaining_days)];
    }

    std::size_t capacity() const { return slots_.size(); }

private:
    std::size_t index(std::int64_t remaining) const {
        return (head_ + static_cast<std::size_t>(remaining) - 1) % slots_.size();
    }

    void grow(std::size_t need) {
        std::size_t cap = slots_.size();
        while (cap < need) cap *= 2;
        std::vector<Count> bigger(cap, Count{});
        for (std::size_t d = 1; d <= slots_.size(); ++d)
            bigger[d - 1] = slots_[(head_ + d - 1) % slots_.size()];
        slots_ = std::move(bigger);
        head_ = 0;
    }

    std::vector<Count> slots_;
    std::size_t head_ = 0;
    Count total_{};
};

} // namespace detail

struct GroupState {
    std::int64_t n = 0;  // group size, fixed for the run
    std::int64_t susceptible = 0;
    std::int64_t removed = 0;
    detail::RemainingDayQueue<std::int64_t> exposed;
    detail::RemainingDayQueue<std::int64_t> infectious;
};

/// Full simulator state: two groups (G first, complement second) with
/// remaining-day queues, plus the intervention bookkeeping.
struct EpidemicState {
    int day = 0;
    std::array<GroupState, 2> groups;
    int active_phase = -1;  // -1 = baseline (R0, c = 1)
    std::vector<int> phase_start_days;
    std::optional<int> t0_day;

    std::int64_t susceptible_total() const {
        return groups[0].susceptible + groups[1].susceptible;
    }
    std::int64_t exposed_total() const {
        return groups[0].exposed.total() + groups[1].exposed.total();
    }
    std::int64_t infectious_total() const {
        return groups[0].infectious.total() + groups[1].infectious.total();
    }
    std::int64_t removed_total() const { return groups[0].removed + groups[1].removed; }
    std::int64_t n_total() const { return groups[0].n + groups[1].n; }
    bool extinct() const { return exposed_total() + infectious_total() == 0; }
};

struct DayRecord {
    int day = 0;
    std::int64_t s = 0, e = 0, i = 0, r = 0;
    std::int64_t s_g = 0, e_g = 0, i_g = 0, r_g = 0;
    std::int64_t new_inf_g = 0, new_inf_other = 0;
    int active_phase = -1;

    friend bool operator==(const DayRecord&, const DayRecord&) = default;
};

struct Trajectory {
    ScenarioConfig scenario;
    std::vector<DayRecord> days;
    std::optional<int> t0_day;        // day the first phase activated
    std::optional<int> threshold_day; // first day with I/N >= plot threshold
};

namespace detail {

inline DayRecord make_record(const EpidemicState& st, std::int64_t new_g, std::int64_t new_o) {
    DayRecord rec;
    rec.day = st.day;
    rec.s_g = st.groups[0].susceptible;
    rec.e_g = st.groups[0].exposed.total();
    rec.i_g = st.groups[0].infectious.total();
    rec.r_g = st.groups[0].removed;
    rec.s = rec.s_g + st.groups[1].susceptible;
    rec.e = rec.e_g + st.groups[1].exposed.total();
    rec.i = rec.i_g + st.groups[1].infectious.total();
    rec.r = rec.r_g + st.groups[1].removed;
    rec.new_inf_g = new_g;
    rec.new_inf_other = new_o;
    rec.active_phase = st.active_phase;
    return rec;
}

} // namespace detail

/// True on the first day the prevalence condition S/N <= x holds; the
/// boundary itself triggers. Fire-once semantics live in step_day.
inline bool detect_intervention(const EpidemicState& state, double x) {
    return static_cast<double>(state.susceptible_total())
               / static_cast<double>(state.n_total())
           <= x;
}

/// Seeds ceil(seed_fraction * N) infectious persons (at least one) at day 0,
/// assigning each to a group with probability proportional to group size
/// and giving each a fresh Erlang-sampled remaining duration.
inline EpidemicState init_state(const ScenarioConfig& cfg, RngStream& rng) {
    const std::int64_t n = cfg.population.n_total;
    const std::int64_t n_g = cfg.population.n_g();
    auto seeds = static_cast<std::int64_t>(
        std::ceil(cfg.seed_infected_fraction * static_cast<double>(n)));
    if (seeds < 1) seeds = 1;
    if (seeds >= n) throw ConfigError("run.seed_infected_fraction: initial infectious count reaches the population size");

    EpidemicState st;
    st.groups[0].n = n_g;
    st.groups[0].susceptible = n_g;
    st.groups[1].n = n - n_g;
    st.groups[1].susceptible = n - n_g;

    const double p_g = static_cast<double>(n_g) / static_cast<double>(n);
    for (std::int64_t s = 0; s < seeds; ++s) {
        int m = sample_bernoulli(rng, p_g) ? 0 : 1;
        if (st.groups[m].susceptible == 0) m = 1 - m;  // spill when a tiny group fills up
        auto& grp = st.groups[m];
        grp.susceptible -= 1;
        grp.infectious.add(sample_erlang_days(rng, cfg.disease.erlang_k,
                                              cfg.disease.erlang_rate_per_day));
    }
    return st;
}

/// Advances the state by one day. Event order is fixed:
///   1. phase triggers are checked against the start-of-day state (fire at
///      most once, in list order; the first activation records t0);
///   2. T ~ Poisson(beta_phase * I_total) transmission attempts are drawn,
///      each targeting G with probability c*alpha and the complement
///      otherwise, then landing on a uniform member of that group -- the
///      attempt infects only if that member is still susceptible;
///   3. the pre-existing queues advance one day: exposed reaching zero turn
///      infectious with fresh Erlang durations, infectious reaching zero
///      are removed;
///   4. today's infections enter the queues last, so they first advance
///      tomorrow and newly infectious persons start transmitting tomorrow.
inline DayRecord step_day(EpidemicState& state, const ScenarioConfig& cfg, RngStream& rng) {
    const auto& phases = cfg.policy.phases;
    const int new_day = state.day + 1;

    while (state.active_phase + 1 < static_cast<int>(phases.size())) {
        const auto& next = phases[static_cast<std::size_t>(state.active_phase + 1)];
        bool fire = false;
        if (next.trigger_s_fraction) {
            fire = detect_intervention(state, *next.trigger_s_fraction);
        } else if (next.trigger_day_offset) {
            const int prev_start =
                state.phase_start_days.empty() ? 0 : state.phase_start_days.back();
            fire = new_day >= prev_start + *next.trigger_day_offset;
        }
        if (!fire) break;
        state.active_phase += 1;
        state.phase_start_days.push_back(new_day);
        if (!state.t0_day) state.t0_day = new_day;
    }

    const bool baseline = state.active_phase < 0;
    const double r0_now =
        baseline ? cfg.disease.r0 : phases[static_cast<std::size_t>(state.active_phase)].r0_prime;
    const double c_now =
        baseline ? 1.0 : phases[static_cast<std::size_t>(state.active_phase)].c;
    const double beta = effective_beta(r0_now, cfg.disease.sigma_per_day());
    const double p_target_g = c_now * cfg.population.alpha;

    const auto attempts =
        sample_poisson(rng, beta * static_cast<double>(state.infectious_total()));

    std::array<std::int64_t, 2> new_counts = {0, 0};
    std::array<std::vector<std::int64_t>, 2> pending_exposed;
    std::array<std::vector<std::int64_t>, 2> pending_infectious;
    for (std::int64_t a = 0; a < attempts; ++a) {
        const int m = sample_bernoulli(rng, p_target_g) ? 0 : 1;
        auto& grp = state.groups[m];
        if (grp.n == 0) continue;
        if (!sample_bernoulli(rng, static_cast<double>(grp.susceptible)
                                       / static_cast<double>(grp.n)))
            continue;
        grp.susceptible -= 1;
        new_counts[static_cast<std::size_t>(m)] += 1;
        const auto tau = sample_poisson(rng, cfg.disease.incubation_mean_days);
        if (tau == 0) {
            pending_infectious[static_cast<std::size_t>(m)].push_back(sample_erlang_days(
                rng, cfg.disease.erlang_k, cfg.disease.erlang_rate_per_day));
        } else {
            pending_exposed[static_cast<std::size_t>(m)].push_back(tau);
        }
    }

    for (std::size_t m = 0; m < 2; ++m) {
        auto& grp = state.groups[m];
        grp.removed += grp.infectious.advance();
        const std::int64_t graduates = grp.exposed.advance();
        for (std::int64_t g = 0; g < graduates; ++g)
            grp.infectious.add(sample_erlang_days(rng, cfg.disease.erlang_k,
                                                  cfg.disease.erlang_rate_per_day));
        for (const auto duration : pending_infectious[m]) grp.infectious.add(duration);
        for (const auto delay : pending_exposed[m]) grp.exposed.add(delay);
    }

    state.day = new_day;
    return detail::make_record(state, new_counts[0], new_counts[1]);
}

/// Runs a validated scenario to extinction or t_max. Day 0 is the seeded
/// initial state; its new-infection fields carry the seed allocation.
inline Trajectory run(const ScenarioConfig& cfg, RngStream& rng) {
    EpidemicState state = init_state(cfg, rng);

    Trajectory traj;
    traj.scenario = cfg;
    traj.days.push_back(detail::make_record(state, state.groups[0].infectious.total(),
                                            state.groups[1].infectious.total()));
    while (state.day < cfg.t_max_days && !state.extinct())
        traj.days.push_back(step_day(state, cfg, rng));

    traj.t0_day = state.t0_day;
    const double n = static_cast<double>(cfg.population.n_total);
    for (const auto& rec : traj.days) {
        if (static_cast<double>(rec.i) / n >= cfg.plot_threshold_fraction) {
            traj.threshold_day = rec.day;
            break;
        }
    }
    return traj;
}

/// Re-indexed copy with day 0 at the first day I/N >= threshold. A zero
/// threshold is the identity; a trajectory that never reaches the threshold
/// comes back with no days as the explicit "threshold never reached" marker.
inline Trajectory align_to_threshold(const Trajectory& traj, double threshold) {
    if (threshold == 0.0) return traj;
    const double n = static_cast<double>(traj.scenario.population.n_total);
    std::size_t start = traj.days.size();
    for (std::size_t idx = 0; idx < traj.days.size(); ++idx) {
        if (static_cast<double>(traj.days[idx].i) / n >= threshold) {
            start = idx;
            break;
        }
    }
    Trajectory out;
    out.scenario = traj.scenario;
    if (start == traj.days.size()) return out;  // marker: days empty, no threshold_day

    const int shift = traj.days[start].day;
    out.days.reserve(traj.days.size() - start);
    for (std::size_t idx = start; idx < traj.days.size(); ++idx) {
        DayRecord rec = traj.days[idx];
        rec.day -= shift;
        out.days.push_back(rec);
    }
    if (traj.t0_day) out.t0_day = *traj.t0_day - shift;
    out.threshold_day = 0;
    return out;
}

} // namespace episim
