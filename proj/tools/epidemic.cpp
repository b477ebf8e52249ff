// Scenario-driven epidemic simulator CLI. Every subcommand reads a JSON
// config plus --set overrides and writes CSV and/or SVG outputs; a fixed
// (config, seed) pair reproduces its outputs byte for byte.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "episim/burden.hpp"
#include "episim/composer.hpp"
#include "episim/config.hpp"
#include "episim/csv.hpp"
#include "episim/engine.hpp"
#include "episim/ensemble.hpp"
#include "episim/oracle.hpp"
#include "episim/svg.hpp"

namespace {

using namespace episim;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_csv;
    std::string out_svg;
    bool normalized = false;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
    if (needs_config) opt->required();
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set disease.r0=3.0");
    cmd->add_option("--out", args.out_csv, "CSV output path");
    cmd->add_option("--svg", args.out_svg, "SVG chart output path");
    cmd->add_flag("--normalized", args.normalized, "render counts as fractions of N");
    cmd->add_option("--workers", args.workers, "worker threads (0 = all cores)");
}

std::vector<double> series_over(const Ensemble& ens, double scale,
                                std::int64_t DayRecord::*field) {
    std::vector<double> out;
    const std::size_t len = ens.max_days();
    out.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
        double sum = 0.0;
        for (std::size_t rep = 0; rep < ens.replicates.size(); ++rep)
            sum += static_cast<double>(ens.record_at(rep, t).*field);
        out.push_back(sum / static_cast<double>(ens.replicates.size()) / scale);
    }
    return out;
}

/// Fig-1 style chart for a plain run; the eight-curve intervention layout
/// (solid = no intervention, dashed = intervention, purple/orange/black for
/// the G group) when the scenario has policy phases.
void chart_ensemble(const Ensemble& ens, const std::string& path, int workers) {
    const auto& cfg = ens.scenario;
    const double n = static_cast<double>(cfg.population.n_total);
    const double n_g = static_cast<double>(cfg.population.n_g());
    std::vector<SvgSeries> series;
    if (cfg.policy.phases.empty()) {
        series.push_back({"S/N", "red", false, series_over(ens, n, &DayRecord::s)});
        series.push_back({"R/N", "blue", false, series_over(ens, n, &DayRecord::r)});
        series.push_back({"I/N", "green", false, series_over(ens, n, &DayRecord::i)});
    } else {
        ScenarioConfig plain = cfg;
        plain.policy.phases.clear();
        const Ensemble base = run_replicates(plain, cfg.replicates, cfg.base_seed, workers);
        series.push_back({"S/N no intervention", "red", false, series_over(base, n, &DayRecord::s)});
        series.push_back({"R/N no intervention", "blue", false, series_over(base, n, &DayRecord::r)});
        series.push_back({"I/N no intervention", "green", false, series_over(base, n, &DayRecord::i)});
        series.push_back({"R/N intervention", "blue", true, series_over(ens, n, &DayRecord::r)});
        series.push_back({"I/N intervention", "green", true, series_over(ens, n, &DayRecord::i)});
        series.push_back({"R_G/n intervention", "black", false, series_over(ens, n_g, &DayRecord::r_g)});
        series.push_back({"S_G/n intervention", "orange", false, series_over(ens, n_g, &DayRecord::s_g)});
        series.push_back({"I_G/n intervention", "purple", false, series_over(ens, n_g, &DayRecord::i_g)});
    }
    render_svg(series, path, {.title = ""});
}

BurdenSeries ensemble_burden(const Ensemble& ens, const BurdenConfig& burden_cfg) {
    const auto calibrated =
        calibrate_age_table(burden_cfg.age_table, burden_cfg.target_avg_mortality);
    const auto rates = group_mortality_rates(calibrated, burden_cfg.g_bands);
    const double sigma = ens.scenario.disease.sigma_per_day();

    // expected deaths are linear in I, so averaging per-replicate series and
    // applying the formula to the mean series agree; use the mean series
    BurdenSeries out;
    out.beds_per_death = burden_cfg.beds_per_death;
    const std::size_t len = ens.max_days();
    const auto reps = static_cast<double>(ens.replicates.size());
    for (std::size_t t = 0; t < len; ++t) {
        double ig = 0.0, io = 0.0;
        for (std::size_t rep = 0; rep < ens.replicates.size(); ++rep) {
            const auto& rec = ens.record_at(rep, t);
            ig += static_cast<double>(rec.i_g);
            io += static_cast<double>(rec.i - rec.i_g);
        }
        const double ed_g = rates.r_g * sigma * ig / reps;
        const double ed_o = rates.r_other * sigma * io / reps;
        out.ed_g.push_back(ed_g);
        out.ed_other.push_back(ed_o);
        out.ed_total.push_back(ed_g + ed_o);
    }
    return out;
}

int cmd_run(const CommonArgs& args, bool with_burden) {
    const ParsedConfig parsed = parse_config(args.config_path, args.overrides);
    const auto& cfg = parsed.scenario;
    const Ensemble ens = run_replicates(cfg, cfg.replicates, cfg.base_seed, args.workers);

    std::optional<BurdenSeries> burden;
    if (with_burden || parsed.burden) {
        const BurdenConfig burden_cfg = parsed.burden ? *parsed.burden : BurdenConfig{};
        burden = ensemble_burden(ens, burden_cfg);
    }
    CsvOptions opts;
    opts.normalized = args.normalized;
    if (burden) opts.burden = &*burden;
    if (!args.out_csv.empty()) write_csv(ens, args.out_csv, opts);
    if (!args.out_svg.empty()) chart_ensemble(ens, args.out_svg, args.workers);

    const auto peak = ens.peak;
    std::printf("replicates=%d peak_i_over_n_mean=%.6f peak_day_mean=%.1f t0_day=%s\n",
                static_cast<int>(ens.replicates.size()), peak.mean_value, peak.mean_day,
                ens.replicates.front().t0_day
                    ? std::to_string(*ens.replicates.front().t0_day).c_str()
                    : "none");
    return 0;
}

int cmd_compose(const CommonArgs& args) {
    const ParsedConfig parsed = parse_config(args.config_path, args.overrides);
    if (!parsed.plan) throw ConfigError("compose: config has no 'compose' section");
    const auto& plan = *parsed.plan;
    const auto ensemble = compose(plan, plan.base.base_seed, plan.base.replicates);

    // day-wise ensemble means of the aggregate
    std::size_t len = 0;
    for (const auto& rep : ensemble.replicates) len = std::max(len, rep.days.size());
    const double n = static_cast<double>(plan.base.population.n_total);
    std::vector<double> mean_s(len, 0.0), mean_e(len, 0.0), mean_i(len, 0.0), mean_r(len, 0.0);
    for (const auto& rep : ensemble.replicates) {
        for (std::size_t t = 0; t < len; ++t) {
            const auto& day = t < rep.days.size() ? rep.days[t] : rep.days.back();
            mean_s[t] += static_cast<double>(day.s);
            mean_e[t] += static_cast<double>(day.e);
            mean_i[t] += static_cast<double>(day.i);
            mean_r[t] += static_cast<double>(day.r);
        }
    }
    const auto reps = static_cast<double>(ensemble.replicates.size());
    for (std::size_t t = 0; t < len; ++t) {
        mean_s[t] /= reps;
        mean_e[t] /= reps;
        mean_i[t] /= reps;
        mean_r[t] /= reps;
    }

    if (!args.out_csv.empty()) {
        std::string text = "day,S,E,I,R\n";
        for (std::size_t t = 0; t < len; ++t) {
            char buf[160];
            if (args.normalized)
                std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f\n", static_cast<int>(t),
                              mean_s[t] / n, mean_e[t] / n, mean_i[t] / n, mean_r[t] / n);
            else
                std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f\n", static_cast<int>(t),
                              mean_s[t], mean_e[t], mean_i[t], mean_r[t]);
            text += buf;
        }
        std::ofstream out(args.out_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + args.out_csv + "' for writing");
        out << text;
    }
    if (!args.out_svg.empty()) {
        std::vector<SvgSeries> series;
        std::vector<double> i_over_n(len);
        for (std::size_t t = 0; t < len; ++t) i_over_n[t] = mean_i[t] / n;
        series.push_back({"aggregate I/N", "green", false, i_over_n});
        for (std::size_t m = 0; m < plan.parts.size(); ++m) {
            std::vector<double> comp(len, 0.0);
            const auto& first = ensemble.replicates.front();
            for (std::size_t t = 0; t < len; ++t) {
                const int local = static_cast<int>(t) - first.offsets[m];
                const auto& days = first.components[m].days;
                if (local >= 0 && local < static_cast<int>(days.size()))
                    comp[t] = static_cast<double>(days[static_cast<std::size_t>(local)].i)
                              / static_cast<double>(plan.parts[m].size);
            }
            series.push_back({plan.parts[m].name.empty()
                                  ? "component " + std::to_string(m + 1) + " I/N_m"
                                  : plan.parts[m].name,
                              "#888888", true, comp});
        }
        render_svg(series, args.out_svg);
    }

    double mean_peak = 0.0;
    for (const auto& rep : ensemble.replicates) mean_peak += peak_prevalence(rep).second;
    std::printf("subpopulations=%zu replicates=%zu aggregate_peak_i_over_n_mean=%.6f\n",
                plan.parts.size(), ensemble.replicates.size(),
                mean_peak / static_cast<double>(ensemble.replicates.size()));
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const ParsedConfig parsed = parse_config(args.config_path, args.overrides);
    if (!parsed.sweep) throw ConfigError("sweep: config has no 'sweep' section");
    const auto cells = expand_sweep(*parsed.sweep);

    std::string text = "cell";
    for (const auto& par : parsed.sweep->parameters) text += "," + par.path;
    text += ",peak_i_over_n_mean,peak_i_over_n_p5,peak_i_over_n_p95,attack_rate_mean,t0_day_mean\n";

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cfg = cells[c];
        const Ensemble ens =
            run_replicates(cfg, cfg.replicates,
                           make_rng(cfg.base_seed).seed() + c, args.workers);
        std::vector<double> peaks;
        double attack = 0.0, t0_sum = 0.0;
        int t0_count = 0;
        for (const auto& traj : ens.replicates) {
            peaks.push_back(peak_prevalence(traj).second);
            const auto& last = traj.days.back();
            attack += 1.0
                      - static_cast<double>(last.s)
                            / static_cast<double>(cfg.population.n_total);
            if (traj.t0_day) {
                t0_sum += *traj.t0_day;
                ++t0_count;
            }
        }
        std::sort(peaks.begin(), peaks.end());
        const auto reps = static_cast<double>(peaks.size());
        double mean_peak = 0.0;
        for (const double p : peaks) mean_peak += p;
        mean_peak /= reps;
        const double p5 = peaks[static_cast<std::size_t>(0.05 * (reps - 1))];
        const double p95 = peaks[static_cast<std::size_t>(0.95 * (reps - 1))];

        text += std::to_string(c);
        // recover this cell's swept values by replaying the expansion order
        std::size_t radix = cells.size();
        std::size_t rem = c;
        for (const auto& par : parsed.sweep->parameters) {
            radix /= par.values.size();
            text += "," + par.values[rem / radix].dump();
            rem %= radix;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%.1f\n", mean_peak, p5, p95,
                      attack / reps, t0_count ? t0_sum / t0_count : -1.0);
        text += buf;
    }
    if (args.out_csv.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(args.out_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + args.out_csv + "' for writing");
        out << text;
    }
    return 0;
}

int cmd_sensitivity_k(const CommonArgs& args, int k_min, int k_max, int count) {
    const ParsedConfig parsed = parse_config(args.config_path, args.overrides);
    const auto& cfg = parsed.scenario;
    const auto result =
        sensitivity_k(cfg, k_min, k_max, count, cfg.base_seed, args.workers);

    if (!args.out_csv.empty()) {
        std::string text = "trajectory,k,peak_i_over_n,peak_day,attack_rate\n";
        for (std::size_t idx = 0; idx < result.ensemble.replicates.size(); ++idx) {
            const auto& traj = result.ensemble.replicates[idx];
            const auto [day, value] = peak_prevalence(traj);
            char buf[120];
            std::snprintf(buf, sizeof buf, "%zu,%d,%.6f,%d,%.6f\n", idx, result.k_values[idx],
                          value, day,
                          1.0
                              - static_cast<double>(traj.days.back().s)
                                    / static_cast<double>(cfg.population.n_total));
            text += buf;
        }
        std::ofstream out(args.out_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + args.out_csv + "' for writing");
        out << text;
    }
    if (!args.out_svg.empty()) {
        std::vector<SvgSeries> series;
        for (const auto& traj : result.ensemble.replicates)
            series.push_back({"", "green", false, prevalence_series(traj)});
        series.front().label = "I/N per trajectory";
        render_svg(series, args.out_svg);
    }
    double lo = 1.0, hi = 0.0;
    for (const auto& traj : result.ensemble.replicates) {
        const double peak = peak_prevalence(traj).second;
        lo = std::min(lo, peak);
        hi = std::max(hi, peak);
    }
    std::printf("trajectories=%zu k_range=[%d,%d] peak_spread=%.6f\n",
                result.ensemble.replicates.size(), k_min, k_max, hi - lo);
    return 0;
}

int cmd_oracle(const CommonArgs& args) {
    const ParsedConfig parsed = parse_config(args.config_path, args.overrides);
    const auto traj = mean_field_run(parsed.scenario);
    CsvOptions opts;
    opts.normalized = args.normalized;
    if (!args.out_csv.empty()) write_csv(traj, args.out_csv, opts);
    if (!args.out_svg.empty()) {
        const double n = static_cast<double>(parsed.scenario.population.n_total);
        std::vector<double> s, i, r;
        for (const auto& rec : traj.days) {
            s.push_back(rec.s / n);
            i.push_back(rec.i / n);
            r.push_back(rec.r / n);
        }
        render_svg({{"S/N", "red", false, s},
                    {"R/N", "blue", false, r},
                    {"I/N", "green", false, i}},
                   args.out_svg);
    }
    const auto series = traj.prevalence_series();
    const auto [day, value] = peak_prevalence(series);
    std::printf("deterministic peak_i_over_n=%.6f peak_day=%d days=%zu\n", value, day,
                traj.days.size());
    return 0;
}

int cmd_compare(const std::string& left, const std::string& right, const std::string& column,
                double tolerance, double align_threshold) {
    const CsvTable a = read_csv(left);
    const CsvTable b = read_csv(right);

    const auto normalize = [&](const CsvTable& t) {
        auto values = t.column(column);
        // derive N from the first row so raw-count files compare in fractions
        const auto& cols = t.columns;
        const bool has_all = std::count(cols.begin(), cols.end(), "S")
                             && std::count(cols.begin(), cols.end(), "E")
                             && std::count(cols.begin(), cols.end(), "I")
                             && std::count(cols.begin(), cols.end(), "R");
        if (has_all && !t.rows.empty()) {
            const double n = t.column("S")[0] + t.column("E")[0] + t.column("I")[0]
                             + t.column("R")[0];
            if (n > 1.5)  // normalized files already sum to ~1
                for (auto& v : values) v /= n;
        }
        return values;
    };
    auto sa = align_series(normalize(a), align_threshold);
    auto sb = align_series(normalize(b), align_threshold);
    pad_to_common_length(sa, sb);
    const auto report = compare_series(sa, sb, tolerance);
    std::printf("sup_gap=%.6f worst_day=%d tolerance=%.6f pass=%s\n", report.sup_gap,
                report.worst_day, report.tolerance, report.pass ? "true" : "false");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic epidemic scenario simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, compose_args, sweep_args, sens_args, burden_args, oracle_args;
    int k_min = 2, k_max = 4, k_count = 100;
    std::string cmp_left, cmp_right, cmp_column = "I";
    double cmp_tol = 0.01, cmp_align = 0.0;

    auto* run_cmd = app.add_subcommand("run", "simulate a scenario ensemble");
    add_common(run_cmd, run_args);

    auto* compose_cmd =
        app.add_subcommand("compose", "aggregate time-shifted subpopulation epidemics");
    add_common(compose_cmd, compose_args);

    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid");
    add_common(sweep_cmd, sweep_args);

    auto* sens_cmd =
        app.add_subcommand("sensitivity-k", "overlay trajectories with k drawn from a range");
    add_common(sens_cmd, sens_args);
    sens_cmd->add_option("--k-min", k_min, "lowest Erlang shape");
    sens_cmd->add_option("--k-max", k_max, "highest Erlang shape");
    sens_cmd->add_option("--count", k_count, "number of trajectories");

    auto* burden_cmd =
        app.add_subcommand("burden", "simulate and attach expected-death columns");
    add_common(burden_cmd, burden_args);

    auto* oracle_cmd =
        app.add_subcommand("oracle", "deterministic mean-field trajectory");
    add_common(oracle_cmd, oracle_args);

    auto* cmp_cmd = app.add_subcommand("compare", "sup-norm comparison of two CSV series");
    cmp_cmd->add_option("--left", cmp_left, "first CSV file")->required();
    cmp_cmd->add_option("--right", cmp_right, "second CSV file")->required();
    cmp_cmd->add_option("--column", cmp_column, "column to compare (default I)");
    cmp_cmd->add_option("--tol", cmp_tol, "pass/fail tolerance on the sup-norm gap");
    cmp_cmd->add_option("--align-threshold", cmp_align,
                        "re-index both series at the first day the value reaches this level");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_args, false);
        if (compose_cmd->parsed()) return cmd_compose(compose_args);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
        if (sens_cmd->parsed()) return cmd_sensitivity_k(sens_args, k_min, k_max, k_count);
        if (burden_cmd->parsed()) return cmd_run(burden_args, true);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_args);
        if (cmp_cmd->parsed())
            return cmd_compare(cmp_left, cmp_right, cmp_column, cmp_tol, cmp_align);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
