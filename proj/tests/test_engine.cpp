#include <catch_amalgamated.hpp>

#include <cmath>

#include "episim/engine.hpp"
#include "episim/ensemble.hpp"

using namespace episim;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.population = {10000, 0.2};
    cfg.t_max_days = 500;
    return cfg;
}

void check_conserved(const Trajectory& traj) {
    const auto n = traj.scenario.population.n_total;
    const auto n_g = traj.scenario.population.n_g();
    std::int64_t prev_s = n + 1, prev_r = -1;
    for (const auto& rec : traj.days) {
        REQUIRE(rec.s + rec.e + rec.i + rec.r == n);
        REQUIRE(rec.s_g + rec.e_g + rec.i_g + rec.r_g == n_g);
        REQUIRE(rec.s >= 0);
        REQUIRE(rec.e >= 0);
        REQUIRE(rec.i >= 0);
        REQUIRE(rec.r >= 0);
        REQUIRE(rec.s <= prev_s);   // S never increases
        REQUIRE(rec.r >= prev_r);   // R never decreases
        prev_s = rec.s;
        prev_r = rec.r;
    }
}

} // namespace

TEST_CASE("seeding puts ceil(fraction*N) infectious at day 0, split by group size") {
    ScenarioConfig cfg;
    cfg.population = {100000, 0.2};

    double g_share = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        RngStream rng = derive_stream(make_rng(5), static_cast<std::uint64_t>(t));
        const EpidemicState st = init_state(cfg, rng);
        REQUIRE(st.infectious_total() == 100);
        REQUIRE(st.exposed_total() == 0);
        REQUIRE(st.susceptible_total() == 100000 - 100);
        g_share += static_cast<double>(st.groups[0].infectious.total());
    }
    // binomial(100, 0.2) mean is 20
    REQUIRE(g_share / trials == Catch::Approx(20.0).margin(1.0));
}

TEST_CASE("a vanishing seed fraction still starts one infectious person") {
    ScenarioConfig cfg;
    cfg.population = {100000, 0.2};
    cfg.seed_infected_fraction = 1e-9;
    RngStream rng = make_rng(9);
    REQUIRE(init_state(cfg, rng).infectious_total() == 1);
}

TEST_CASE("a seed fraction that swallows the population is rejected") {
    ScenarioConfig cfg;
    cfg.population = {100, 0.2};
    cfg.seed_infected_fraction = 0.9999;
    RngStream rng = make_rng(9);
    REQUIRE_THROWS_AS(init_state(cfg, rng), ConfigError);
}

TEST_CASE("conservation and monotonicity hold on every day of every replicate") {
    ScenarioConfig cfg = small_config();
    cfg.policy.phases.push_back({0.9, std::nullopt, 2.5, 0.25});
    for (int rep = 0; rep < 5; ++rep) {
        RngStream rng = derive_stream(make_rng(33), static_cast<std::uint64_t>(rep));
        check_conserved(run(cfg, rng));
    }
}

TEST_CASE("r0 = 0 freezes S while the queues drain on schedule") {
    ScenarioConfig cfg = small_config();
    cfg.disease.r0 = 0.0;
    RngStream rng = make_rng(4);
    const Trajectory traj = run(cfg, rng);
    const auto seeded = traj.days.front().i;
    for (const auto& rec : traj.days) REQUIRE(rec.s == traj.days.front().s);
    REQUIRE(traj.days.back().i == 0);
    REQUIRE(traj.days.back().r == seeded);
    check_conserved(traj);
}

TEST_CASE("an extinct state is absorbing under further steps") {
    ScenarioConfig cfg = small_config();
    cfg.disease.r0 = 0.5;
    cfg.t_max_days = 5000;
    RngStream rng = make_rng(6);
    EpidemicState st = init_state(cfg, rng);
    while (!st.extinct()) step_day(st, cfg, rng);

    const DayRecord frozen = step_day(st, cfg, rng);
    const DayRecord again = step_day(st, cfg, rng);
    REQUIRE(frozen.s == again.s);
    REQUIRE(frozen.e == 0);
    REQUIRE(frozen.i == 0);
    REQUIRE(frozen.r == again.r);
    REQUIRE(again.day == frozen.day + 1);
}

TEST_CASE("pre-intervention attempts land in G at rate alpha") {
    // a large wholly susceptible population with enough infectious pressure
    // for ~1e4 attempts in a single day
    ScenarioConfig cfg;
    cfg.population = {1000000, 0.2};
    EpidemicState st;
    st.groups[0].n = cfg.population.n_g();
    st.groups[0].susceptible = st.groups[0].n;
    st.groups[1].n = cfg.population.n_other();
    st.groups[1].susceptible = st.groups[1].n;
    const std::int64_t pressure = static_cast<std::int64_t>(1e4 / cfg.disease.beta_per_day());
    st.groups[1].infectious.add(400, pressure);  // far-off expiry, only I_total matters

    RngStream rng = make_rng(12);
    const DayRecord rec = step_day(st, cfg, rng);
    const double frac_g = static_cast<double>(rec.new_inf_g)
                          / static_cast<double>(rec.new_inf_g + rec.new_inf_other);
    REQUIRE(frac_g == Catch::Approx(0.2).margin(0.01));
}

TEST_CASE("prevalence trigger fires on the boundary day, once") {
    ScenarioConfig cfg;
    cfg.population = {100000, 0.2};
    cfg.policy.phases.push_back({0.9, std::nullopt, 2.5, 0.25});

    SECTION("boundary inclusive") {
        EpidemicState st;
        st.groups[0].n = 20000;
        st.groups[1].n = 80000;
        st.groups[0].susceptible = 18000;
        st.groups[1].susceptible = 72000;  // S/N exactly 0.9
        st.groups[1].infectious.add(10, 100);
        st.groups[0].removed = 2000;
        st.groups[1].removed = 7900;
        RngStream rng = make_rng(2);
        step_day(st, cfg, rng);
        REQUIRE(st.active_phase == 0);
        REQUIRE(st.t0_day.has_value());
    }
    SECTION("above the boundary nothing fires") {
        EpidemicState st;
        st.groups[0].n = 20000;
        st.groups[1].n = 80000;
        st.groups[0].susceptible = 19000;
        st.groups[1].susceptible = 76000;  // S/N = 0.95
        st.groups[1].infectious.add(10, 100);
        st.groups[0].removed = 1000;
        st.groups[1].removed = 3900;
        RngStream rng = make_rng(2);
        step_day(st, cfg, rng);
        REQUIRE(st.active_phase == -1);
        REQUIRE_FALSE(st.t0_day.has_value());
    }
    SECTION("full run records t0 exactly at the crossing") {
        RngStream rng = make_rng(21);
        const Trajectory traj = run(cfg, rng);
        REQUIRE(traj.t0_day.has_value());
        const int t0 = *traj.t0_day;
        const auto& before_start = traj.days[static_cast<std::size_t>(t0) - 1];
        REQUIRE(static_cast<double>(before_start.s) / 100000.0 <= 0.9);
        const auto& day_before = traj.days[static_cast<std::size_t>(t0) - 2];
        REQUIRE(static_cast<double>(day_before.s) / 100000.0 > 0.9);
        // fire-once: the phase list has one entry, so the phase index stays 0
        for (const auto& rec : traj.days)
            if (rec.day >= t0) REQUIRE(rec.active_phase == 0);
    }
}

TEST_CASE("a no-op intervention leaves the sampled path bit-identical") {
    ScenarioConfig plain = small_config();
    ScenarioConfig noop = plain;
    noop.policy.phases.push_back({0.9, std::nullopt, plain.disease.r0, 1.0});

    RngStream rng_a = make_rng(77);
    RngStream rng_b = make_rng(77);
    const Trajectory a = run(plain, rng_a);
    const Trajectory b = run(noop, rng_b);
    REQUIRE(a.days.size() == b.days.size());
    for (std::size_t t = 0; t < a.days.size(); ++t) {
        REQUIRE(a.days[t].s == b.days[t].s);
        REQUIRE(a.days[t].e == b.days[t].e);
        REQUIRE(a.days[t].i == b.days[t].i);
        REQUIRE(a.days[t].r == b.days[t].r);
        REQUIRE(a.days[t].s_g == b.days[t].s_g);
        REQUIRE(a.days[t].i_g == b.days[t].i_g);
        REQUIRE(a.days[t].new_inf_g == b.days[t].new_inf_g);
        REQUIRE(a.days[t].new_inf_other == b.days[t].new_inf_other);
    }
    REQUIRE_FALSE(a.t0_day.has_value());
    REQUIRE(b.t0_day.has_value());  // the trigger still fires, it just changes nothing
}

TEST_CASE("day-offset phases start relative to the previous phase") {
    ScenarioConfig cfg = small_config();
    cfg.policy.phases.push_back({0.9, std::nullopt, 1.0, 0.25});
    cfg.policy.phases.push_back({std::nullopt, 30, 2.5, 0.25});
    RngStream rng = make_rng(11);
    const Trajectory traj = run(cfg, rng);
    REQUIRE(traj.t0_day.has_value());
    const int t0 = *traj.t0_day;
    for (const auto& rec : traj.days) {
        if (rec.day < t0) REQUIRE(rec.active_phase == -1);
        else if (rec.day < t0 + 30) REQUIRE(rec.active_phase == 0);
        else REQUIRE(rec.active_phase == 1);
    }
}

TEST_CASE("subcritical epidemics stay small") {
    ScenarioConfig cfg;
    cfg.population = {100000, 0.2};
    cfg.disease.r0 = 0.5;
    cfg.t_max_days = 2000;
    const Ensemble ens = run_replicates(cfg, 30, 915, 2);
    double attack = 0.0;
    for (const auto& traj : ens.replicates)
        attack += 1.0 - static_cast<double>(traj.days.back().s) / 100000.0;
    REQUIRE(attack / 30.0 < 0.05);
}

TEST_CASE("t_max truncates a run") {
    ScenarioConfig cfg = small_config();
    cfg.t_max_days = 10;
    RngStream rng = make_rng(8);
    const Trajectory traj = run(cfg, rng);
    REQUIRE(traj.days.size() <= 11);
    REQUIRE(traj.days.back().day <= 10);
}

TEST_CASE("threshold alignment re-indexes and preserves content") {
    ScenarioConfig cfg = small_config();
    RngStream rng = make_rng(14);
    const Trajectory traj = run(cfg, rng);
    REQUIRE(traj.threshold_day.has_value());

    const Trajectory aligned = align_to_threshold(traj, cfg.plot_threshold_fraction);
    REQUIRE_FALSE(aligned.days.empty());
    REQUIRE(aligned.days.front().day == 0);
    REQUIRE(aligned.days.front().i == traj.days[static_cast<std::size_t>(*traj.threshold_day)].i);
    REQUIRE(aligned.days.size() == traj.days.size() - static_cast<std::size_t>(*traj.threshold_day));
    for (std::size_t t = 1; t < aligned.days.size(); ++t)
        REQUIRE(aligned.days[t].day == aligned.days[t - 1].day + 1);

    SECTION("zero threshold is the identity") {
        const Trajectory same = align_to_threshold(traj, 0.0);
        REQUIRE(same.days.size() == traj.days.size());
        REQUIRE(same.days.front().day == traj.days.front().day);
    }
    SECTION("an epidemic that dies early never reaches the threshold") {
        ScenarioConfig sub = cfg;
        sub.disease.r0 = 0.1;
        RngStream sub_rng = make_rng(3);
        const Trajectory dying = run(sub, sub_rng);
        const Trajectory empty = align_to_threshold(dying, 0.5);
        REQUIRE(empty.days.empty());
        REQUIRE_FALSE(empty.threshold_day.has_value());
    }
}

TEST_CASE("remaining-day queue bookkeeping") {
    detail::RemainingDayQueue<std::int64_t> queue(4);
    queue.add(1, 5);
    queue.add(3, 2);
    queue.add(200, 1);  // forces growth past the initial capacity
    REQUIRE(queue.total() == 8);
    REQUIRE(queue.advance() == 5);
    REQUIRE(queue.advance() == 0);
    REQUIRE(queue.advance() == 2);
    REQUIRE(queue.total() == 1);
    for (int d = 0; d < 196; ++d) queue.advance();
    REQUIRE(queue.advance() == 1);
    REQUIRE(queue.total() == 0);
    REQUIRE_THROWS_AS(queue.add(0, 1), std::logic_error);
}
