#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "episim/composer.hpp"
#include "episim/engine.hpp"

namespace episim {

namespace detail {

/// Runs fn(index) for index in [0, count) on a small worker pool. Results
/// land in a pre-sized vector slot per index, so the output is identical
/// for any worker count.
template <typename Fn>
void parallel_indexed(int count, int workers, Fn&& fn) {
    if (workers < 1) workers = 1;
    if (workers == 1 || count <= 1) {
        for (int idx = 0; idx < count; ++idx) fn(idx);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, w, workers, count] {
            for (int idx = w; idx < count; idx += workers) fn(idx);
        });
    }
    for (auto& th : pool) th.join();
}

inline int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace detail

struct PeakStats {
    double mean_value = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    double mean_day = 0.0;
};

/// Replicate trajectories plus per-day summary bands. Trajectories shorter
/// than the longest one are extended with their final record, which is
/// exact because extinction is absorbing.
struct Ensemble {
    ScenarioConfig scenario;
    std::vector<Trajectory> replicates;
    std::vector<double> mean_i_over_n;
    std::vector<double> p5_i_over_n;
    std::vector<double> p95_i_over_n;
    PeakStats peak;

    const DayRecord& record_at(std::size_t rep, std::size_t day) const {
        const auto& days = replicates[rep].days;
        return day < days.size() ? days[day] : days.back();
    }

    std::size_t max_days() const {
        std::size_t len = 0;
        for (const auto& t : replicates) len = std::max(len, t.days.size());
        return len;
    }
};

namespace detail {

inline double percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())) - 1.0);
    return values[std::min(idx, values.size() - 1)];
}

inline void summarize(Ensemble& ens) {
    const double n = static_cast<double>(ens.scenario.population.n_total);
    const std::size_t len = ens.max_days();
    ens.mean_i_over_n.assign(len, 0.0);
    ens.p5_i_over_n.assign(len, 0.0);
    ens.p95_i_over_n.assign(len, 0.0);
    std::vector<double> column(ens.replicates.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t rep = 0; rep < ens.replicates.size(); ++rep)
            column[rep] = static_cast<double>(ens.record_at(rep, t).i) / n;
        double sum = 0.0;
        for (const double v : column) sum += v;
        ens.mean_i_over_n[t] = sum / static_cast<double>(column.size());
        ens.p5_i_over_n[t] = percentile(column, 0.05);
        ens.p95_i_over_n[t] = percentile(column, 0.95);
    }

    double sum_peak = 0.0, sum_day = 0.0;
    double lo = 1.0, hi = 0.0;
    for (const auto& traj : ens.replicates) {
        const auto [day, value] = peak_prevalence(traj);
        sum_peak += value;
        sum_day += day;
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    const auto reps = static_cast<double>(ens.replicates.size());
    ens.peak = {sum_peak / reps, lo, hi, sum_day / reps};
}

} // namespace detail

/// `count` independent runs on streams derived by replicate index. The
/// result is identical whatever the worker count or execution order.
inline Ensemble run_replicates(const ScenarioConfig& cfg, int count, std::uint64_t base_seed,
                               int workers = 0) {
    validate_or_throw(cfg);
    if (count < 1) throw std::invalid_argument("run_replicates: count must be positive");
    Ensemble ens;
    ens.scenario = cfg;
    ens.replicates.resize(static_cast<std::size_t>(count));
    const RngStream base = make_rng(base_seed);
    detail::parallel_indexed(count, workers == 0 ? detail::default_workers() : workers,
                             [&](int idx) {
                                 RngStream rng =
                                     derive_stream(base, static_cast<std::uint64_t>(idx));
                                 ens.replicates[static_cast<std::size_t>(idx)] = run(cfg, rng);
                             });
    detail::summarize(ens);
    return ens;
}

inline std::vector<double> align_series_prevalence(const Trajectory& traj, double threshold) {
    const auto series = prevalence_series(traj);
    std::size_t start = 0;
    while (start < series.size() && series[start] < threshold) ++start;
    if (start == series.size()) return {};
    return {series.begin() + static_cast<std::ptrdiff_t>(start), series.end()};
}

/// Per-replicate threshold alignment, zero-padding, then the day-wise mean.
/// Replicates that never reach the threshold are dropped.
inline std::vector<double> aligned_mean_prevalence(const Ensemble& ens, double threshold) {
    std::vector<std::vector<double>> aligned;
    for (const auto& traj : ens.replicates) {
        auto series = align_series_prevalence(traj, threshold);
        if (!series.empty()) aligned.push_back(std::move(series));
    }
    std::size_t len = 0;
    for (const auto& s : aligned) len = std::max(len, s.size());
    std::vector<double> mean(len, 0.0);
    if (aligned.empty()) return mean;
    for (auto& s : aligned) {
        s.resize(len, 0.0);
        for (std::size_t t = 0; t < len; ++t) mean[t] += s[t];
    }
    for (auto& v : mean) v /= static_cast<double>(aligned.size());
    return mean;
}

struct KSensitivity {
    Ensemble ensemble;
    std::vector<int> k_values;
};

/// Each trajectory draws its Erlang shape k uniformly from [k_min, k_max]
/// and rescales lambda to k / mean-infectious-days, so every k keeps the
/// same mean infectious period and R0 = beta/sigma stays meaningful.
inline KSensitivity sensitivity_k(const ScenarioConfig& cfg, int k_min, int k_max,
                                  int trajectories, std::uint64_t base_seed, int workers = 0) {
    if (k_min < 1 || k_min > k_max)
        throw std::invalid_argument("sensitivity_k: need 1 <= k_min <= k_max");
    validate_or_throw(cfg);
    if (trajectories < 1)
        throw std::invalid_argument("sensitivity_k: trajectory count must be positive");

    const double mean_infectious = cfg.disease.mean_infectious_days();
    KSensitivity out;
    out.ensemble.scenario = cfg;
    out.ensemble.replicates.resize(static_cast<std::size_t>(trajectories));
    out.k_values.resize(static_cast<std::size_t>(trajectories));
    const RngStream base = make_rng(base_seed);
    detail::parallel_indexed(
        trajectories, workers == 0 ? detail::default_workers() : workers, [&](int idx) {
            RngStream rng = derive_stream(base, static_cast<std::uint64_t>(idx));
            const int k = static_cast<int>(sample_int_range(rng, k_min, k_max));
            ScenarioConfig cell = cfg;
            cell.disease.erlang_k = k;
            cell.disease.erlang_rate_per_day = static_cast<double>(k) / mean_infectious;
            out.k_values[static_cast<std::size_t>(idx)] = k;
            out.ensemble.replicates[static_cast<std::size_t>(idx)] = run(cell, rng);
        });
    detail::summarize(out.ensemble);
    return out;
}

} // namespace episim
