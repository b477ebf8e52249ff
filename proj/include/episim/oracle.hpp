#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "episim/engine.hpp"
#include "episim/model.hpp"

namespace episim {

/// Erlang(k, rate) lower CDF in closed form (k is a small integer):
/// F(x) = 1 - exp(-rate x) * sum_{i<k} (rate x)^i / i!.
inline double erlang_cdf(int k, double rate, double x) {
    if (x <= 0.0) return 0.0;
    const double rx = rate * x;
    double term = 1.0, sum = 1.0;
    for (int i = 1; i < k; ++i) {
        term *= rx / i;
        sum += term;
    }
    return 1.0 - std::exp(-rx) * sum;
}

/// Mass function of the sampled duration max(1, round(Erlang(k, rate))),
/// i.e. the exact law of sample_erlang_days. Truncated once the cumulative
/// mass reaches 1 - tail_mass, with the residual assigned to the last bin
/// so the vector sums to one. Index j holds P(duration = j + 1).
inline std::vector<double> erlang_day_pmf(int k, double rate, double tail_mass = 1e-9) {
    if (k < 1) throw std::invalid_argument("erlang_day_pmf: shape k must be positive");
    if (!(rate > 0.0)) throw std::invalid_argument("erlang_day_pmf: rate must be positive");
    std::vector<double> pmf;
    pmf.push_back(erlang_cdf(k, rate, 1.5));  // everything rounding to <= 1 clamps to 1
    double cum = pmf[0];
    for (std::int64_t day = 2; cum < 1.0 - tail_mass; ++day) {
        const double p = erlang_cdf(k, rate, static_cast<double>(day) + 0.5)
                         - erlang_cdf(k, rate, static_cast<double>(day) - 0.5);
        pmf.push_back(p);
        cum += p;
    }
    pmf.back() += 1.0 - cum;
    return pmf;
}

/// Poisson(mean) mass over delay days, truncated at cumulative mass
/// 1 - tail_mass with the residual assigned to the last retained delay.
/// Index j holds P(delay = j); mean 0 collapses to a point mass at 0.
inline std::vector<double> poisson_delay_pmf(double mean, double tail_mass = 1e-9) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_delay_pmf: mean must be >= 0");
    if (mean == 0.0) return {1.0};
    std::vector<double> pmf;
    double p = std::exp(-mean);
    double cum = p;
    pmf.push_back(p);
    for (std::int64_t j = 1; cum < 1.0 - tail_mass; ++j) {
        p *= mean / static_cast<double>(j);
        pmf.push_back(p);
        cum += p;
    }
    pmf.back() += 1.0 - cum;
    return pmf;
}

struct MeanFieldDay {
    int day = 0;
    double s = 0, e = 0, i = 0, r = 0;
    double s_g = 0, e_g = 0, i_g = 0, r_g = 0;
    double new_inf_g = 0, new_inf_other = 0;
    int active_phase = -1;
};

struct MeanFieldTrajectory {
    ScenarioConfig scenario;
    std::vector<MeanFieldDay> days;
    std::optional<int> t0_day;
    std::optional<int> threshold_day;

    std::vector<double> prevalence_series() const {
        std::vector<double> out;
        out.reserve(days.size());
        const double n = static_cast<double>(scenario.population.n_total);
        for (const auto& rec : days) out.push_back(rec.i / n);
        return out;
    }
};

namespace detail {

struct MeanFieldGroup {
    double n = 0;
    double susceptible = 0;
    double removed = 0;
    RemainingDayQueue<double> exposed;
    RemainingDayQueue<double> infectious;
};

} // namespace detail

/// Deterministic reference: the engine's daily update with every random draw
/// replaced by its expectation. New infections per group are
/// beta * I_total * q_m * S_m / N_m; incubation delays follow the Poisson
/// mass function and infectious durations the discretised-Erlang mass
/// function, with the same rounding and clamping as the stochastic sampler.
inline MeanFieldTrajectory mean_field_run(const ScenarioConfig& cfg) {
    const auto dur_pmf = erlang_day_pmf(cfg.disease.erlang_k, cfg.disease.erlang_rate_per_day);
    const auto delay_pmf = poisson_delay_pmf(cfg.disease.incubation_mean_days);
    const double n_total = static_cast<double>(cfg.population.n_total);
    const double alpha = cfg.population.alpha;
    const auto& phases = cfg.policy.phases;

    std::array<detail::MeanFieldGroup, 2> groups;
    groups[0].n = static_cast<double>(cfg.population.n_g());
    groups[1].n = static_cast<double>(cfg.population.n_other());

    double seeds = std::ceil(cfg.seed_infected_fraction * n_total);
    if (seeds < 1.0) seeds = 1.0;
    for (std::size_t m = 0; m < 2; ++m) {
        auto& grp = groups[m];
        const double seeded = seeds * grp.n / n_total;
        grp.susceptible = grp.n - seeded;
        for (std::size_t j = 0; j < dur_pmf.size(); ++j)
            grp.infectious.add(static_cast<std::int64_t>(j) + 1, seeded * dur_pmf[j]);
    }

    int active_phase = -1;
    std::vector<int> phase_starts;
    MeanFieldTrajectory traj;
    traj.scenario = cfg;

    const auto record = [&](int day, double new_g, double new_o) {
        MeanFieldDay rec;
        rec.day = day;
        rec.s_g = groups[0].susceptible;
        rec.e_g = groups[0].exposed.total();
        rec.i_g = groups[0].infectious.total();
        rec.r_g = groups[0].removed;
        rec.s = rec.s_g + groups[1].susceptible;
        rec.e = rec.e_g + groups[1].exposed.total();
        rec.i = rec.i_g + groups[1].infectious.total();
        rec.r = rec.r_g + groups[1].removed;
        rec.new_inf_g = new_g;
        rec.new_inf_other = new_o;
        rec.active_phase = active_phase;
        traj.days.push_back(rec);
    };
    record(0, seeds * groups[0].n / n_total, seeds * groups[1].n / n_total);

    for (int day = 1; day <= cfg.t_max_days; ++day) {
        const double s_total = groups[0].susceptible + groups[1].susceptible;
        while (active_phase + 1 < static_cast<int>(phases.size())) {
            const auto& next = phases[static_cast<std::size_t>(active_phase + 1)];
            bool fire = false;
            if (next.trigger_s_fraction) {
                fire = s_total / n_total <= *next.trigger_s_fraction;
            } else if (next.trigger_day_offset) {
                const int prev = phase_starts.empty() ? 0 : phase_starts.back();
                fire = day >= prev + *next.trigger_day_offset;
            }
            if (!fire) break;
            active_phase += 1;
            phase_starts.push_back(day);
            if (!traj.t0_day) traj.t0_day = day;
        }
        const bool baseline = active_phase < 0;
        const double r0_now =
            baseline ? cfg.disease.r0 : phases[static_cast<std::size_t>(active_phase)].r0_prime;
        const double c_now = baseline ? 1.0 : phases[static_cast<std::size_t>(active_phase)].c;
        const double beta = effective_beta(r0_now, cfg.disease.sigma_per_day());
        const double i_total = groups[0].infectious.total() + groups[1].infectious.total();
        const double attempts = beta * i_total;
        const std::array<double, 2> q = {c_now * alpha, 1.0 - c_now * alpha};

        std::array<double, 2> fresh = {0.0, 0.0};
        for (std::size_t m = 0; m < 2; ++m) {
            auto& grp = groups[m];
            if (grp.n <= 0.0) continue;
            fresh[m] = std::min(attempts * q[m] * grp.susceptible / grp.n, grp.susceptible);
            grp.susceptible -= fresh[m];
        }
        for (std::size_t m = 0; m < 2; ++m) {
            auto& grp = groups[m];
            grp.removed += grp.infectious.advance();
            const double graduates = grp.exposed.advance();
            const double direct = fresh[m] * delay_pmf[0];  // delay 0: infectious today
            for (std::size_t j = 0; j < dur_pmf.size(); ++j)
                grp.infectious.add(static_cast<std::int64_t>(j) + 1,
                                   (graduates + direct) * dur_pmf[j]);
            for (std::size_t d = 1; d < delay_pmf.size(); ++d)
                grp.exposed.add(static_cast<std::int64_t>(d), fresh[m] * delay_pmf[d]);
        }
        record(day, fresh[0], fresh[1]);
        const double active_mass = groups[0].exposed.total() + groups[1].exposed.total()
                                   + groups[0].infectious.total() + groups[1].infectious.total();
        if (active_mass < 1e-9) break;
    }

    for (const auto& rec : traj.days) {
        if (rec.i / n_total >= cfg.plot_threshold_fraction) {
            traj.threshold_day = rec.day;
            break;
        }
    }
    return traj;
}

/// Re-indexed copy with day 0 at the first day I/N >= threshold.
inline std::vector<double> align_series(const std::vector<double>& series, double threshold) {
    std::size_t start = 0;
    while (start < series.size() && series[start] < threshold) ++start;
    return {series.begin() + static_cast<std::ptrdiff_t>(start), series.end()};
}

struct CompareReport {
    double sup_gap = 0.0;
    int worst_day = 0;
    bool pass = false;
    double tolerance = 0.0;
};

/// Sup-norm comparison of two equally aligned series.
inline CompareReport compare_series(const std::vector<double>& a, const std::vector<double>& b,
                                    double tolerance) {
    if (a.size() != b.size())
        throw std::invalid_argument("compare: length mismatch after alignment ("
                                    + std::to_string(a.size()) + " vs " + std::to_string(b.size())
                                    + ")");
    CompareReport report;
    report.tolerance = tolerance;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double gap = std::fabs(a[t] - b[t]);
        if (gap > report.sup_gap) {
            report.sup_gap = gap;
            report.worst_day = static_cast<int>(t);
        }
    }
    report.pass = report.sup_gap <= tolerance;
    return report;
}

/// Zero-pads the shorter series; an extinct epidemic stays at zero, so the
/// padding is the exact continuation.
inline void pad_to_common_length(std::vector<double>& a, std::vector<double>& b) {
    const std::size_t len = std::max(a.size(), b.size());
    a.resize(len, 0.0);
    b.resize(len, 0.0);
}

} // namespace episim
