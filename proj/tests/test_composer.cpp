#include <catch_amalgamated.hpp>

#include "episim/composer.hpp"
#include "episim/ensemble.hpp"

using namespace episim;

namespace {

SubpopulationPlan two_part_plan(std::int64_t n1, std::int64_t n2, int offset) {
    SubpopulationPlan plan;
    plan.base.population = {n1 + n2, 0.2};
    plan.base.disease.incubation_mean_days = 0.0;
    plan.base.t_max_days = 1000;
    plan.parts = {{"a", n1, 0}, {"b", n2, offset}};
    return plan;
}

} // namespace

TEST_CASE("peak_prevalence basics") {
    REQUIRE(peak_prevalence(std::vector<double>{0.0, 0.1, 0.3, 0.2})
            == std::pair<int, double>{2, 0.3});
    REQUIRE(peak_prevalence(std::vector<double>{0.0, 0.0, 0.0}) == std::pair<int, double>{0, 0.0});
    REQUIRE_THROWS_AS(peak_prevalence(std::vector<double>{}), std::invalid_argument);
    // first index wins a tie
    REQUIRE(peak_prevalence(std::vector<double>{0.1, 0.3, 0.3}).first == 1);
}

TEST_CASE("plan validation names the offending parts") {
    SubpopulationPlan plan = two_part_plan(5000, 5000, 50);
    plan.parts[1].size = 0;
    auto violations = validate_plan(plan);
    bool found = false;
    for (const auto& v : violations) found = found || v.field == "compose.subpopulations[1].size";
    REQUIRE(found);

    plan = two_part_plan(5000, 5000, 50);
    plan.parts[1].name = "a";
    violations = validate_plan(plan);
    found = false;
    for (const auto& v : violations) found = found || v.field == "compose.subpopulations[1].name";
    REQUIRE(found);

    plan = two_part_plan(5000, 5000, 50);
    plan.base.population.n_total = 9000;  // sizes no longer sum to N
    REQUIRE_FALSE(validate_plan(plan).empty());
}

TEST_CASE("composition with one part and zero offset is the plain run") {
    SubpopulationPlan plan;
    plan.base.population = {20000, 0.2};
    plan.base.disease.incubation_mean_days = 0.0;
    plan.base.t_max_days = 1000;
    plan.parts = {{"only", 20000, 0}};

    const auto ensemble = compose(plan, 321, 1);
    const auto& agg = ensemble.replicates.front();

    RngStream rng = derive_stream(derive_stream(make_rng(321), 0), 0);
    const Trajectory direct =
        align_to_threshold(run(plan.base, rng), plan.base.plot_threshold_fraction);
    REQUIRE(agg.days.size() == direct.days.size());
    for (std::size_t t = 0; t < direct.days.size(); ++t) {
        REQUIRE(agg.days[t].i == direct.days[t].i);
        REQUIRE(agg.days[t].s == direct.days[t].s);
        REQUIRE(agg.days[t].r == direct.days[t].r);
    }
}

TEST_CASE("the aggregate is the exact day-wise sum of shifted components") {
    SubpopulationPlan plan;
    plan.base.population = {30000, 0.2};
    plan.base.disease.incubation_mean_days = 0.0;
    plan.base.t_max_days = 1000;
    plan.parts = {{"a", 15000, 0}, {"b", 9000, 23}, {"c", 6000, 61}};

    const auto ensemble = compose(plan, 55, 2);
    for (const auto& agg : ensemble.replicates) {
        for (const auto& day : agg.days) {
            std::int64_t want_i = 0, want_s = 0;
            for (std::size_t m = 0; m < agg.components.size(); ++m) {
                const int local = day.day - agg.offsets[m];
                const auto& comp = agg.components[m].days;
                if (local < 0 || comp.empty()) {
                    want_s += plan.parts[m].size;
                } else {
                    const auto& rec = local < static_cast<int>(comp.size())
                                          ? comp[static_cast<std::size_t>(local)]
                                          : comp.back();
                    want_i += rec.i;
                    want_s += rec.s;
                }
            }
            REQUIRE(day.i == want_i);
            REQUIRE(day.s == want_s);
        }
    }
}

TEST_CASE("days before a shifted start contribute a fully susceptible part") {
    const auto ensemble = compose(two_part_plan(5000, 5000, 80), 7, 1);
    const auto& agg = ensemble.replicates.front();
    const auto& first_day = agg.days.front();
    REQUIRE(first_day.s == agg.components[0].days.front().s + 5000);
    REQUIRE(first_day.i == agg.components[0].days.front().i);
}

TEST_CASE("staggered identical parts flatten the aggregate peak") {
    // ensemble means: aggregate peak vs the peak of a single component
    const int reps = 10;
    const auto ensemble = compose(two_part_plan(10000, 10000, 50), 99, reps);
    double agg_peak = 0.0, comp_peak = 0.0;
    for (const auto& agg : ensemble.replicates) {
        agg_peak += peak_prevalence(agg).second;
        comp_peak += peak_prevalence(agg.components[0]).second;
    }
    agg_peak /= reps;
    comp_peak /= reps;
    REQUIRE(agg_peak < comp_peak);
}
