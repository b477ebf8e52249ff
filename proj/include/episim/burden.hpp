#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "episim/distributions.hpp"
#include "episim/engine.hpp"

namespace episim {

struct AgeBand {
    std::string label;
    double size_millions = 0.0;
    double death_prob = 0.0;
};

struct AgeBandTable {
    std::vector<AgeBand> bands;

    double total_size() const {
        double sum = 0.0;
        for (const auto& b : bands) sum += b.size_millions;
        return sum;
    }

    /// Size-weighted mean death probability.
    double average_mortality() const {
        double weighted = 0.0;
        for (const auto& b : bands) weighted += b.size_millions * b.death_prob;
        return weighted / total_size();
    }
};

/// UK age bands with sizes in millions and per-band death probabilities.
inline AgeBandTable uk_default_table() {
    return AgeBandTable{{
        {"0-19", 15.58, 0.00003},
        {"20-29", 8.71, 0.0003},
        {"30-39", 8.83, 0.0008},
        {"40-49", 8.50, 0.0015},
        {"50-59", 8.96, 0.006},
        {"60-69", 7.07, 0.022},
        {"70-79", 5.49, 0.051},
        {"80+", 3.27, 0.093},
    }};
}

inline std::vector<Violation> validate_age_table(const AgeBandTable& table) {
    std::vector<Violation> out;
    if (table.bands.empty()) out.push_back({"burden.age_table", "table must not be empty"});
    for (std::size_t b = 0; b < table.bands.size(); ++b) {
        const std::string base = "burden.age_table[" + std::to_string(b) + "]";
        if (!(table.bands[b].size_millions > 0.0))
            out.push_back({base + ".size_millions", "band size must be positive"});
        if (!(table.bands[b].death_prob >= 0.0 && table.bands[b].death_prob <= 1.0))
            out.push_back({base + ".death_prob", "death probability must lie in [0,1]"});
    }
    return out;
}

struct CalibratedTable {
    AgeBandTable table;
    double scale_factor = 1.0;
};

/// Rescales every band probability by the single factor that moves the
/// size-weighted average onto target_avg.
inline CalibratedTable calibrate_age_table(const AgeBandTable& table, double target_avg) {
    if (!(target_avg > 0.0 && target_avg < 1.0))
        throw std::invalid_argument("calibrate: target average must lie in (0,1)");
    const auto violations = validate_age_table(table);
    if (!violations.empty()) throw ConfigError(describe(violations));
    const double raw = table.average_mortality();
    if (raw <= 0.0) throw std::invalid_argument("calibrate: raw average mortality is zero");

    CalibratedTable out{table, target_avg / raw};
    for (auto& band : out.table.bands) band.death_prob *= out.scale_factor;
    return out;
}

struct MortalityRates {
    double r_g = 0.0;      // vulnerable group
    double r_other = 0.0;  // complement
    double r_avg = 0.0;
    double alpha = 0.0;    // group share of the population
    double scale_factor = 1.0;
};

/// Size-weighted mortality of the G bands and of the complement.
inline MortalityRates group_mortality_rates(const CalibratedTable& calibrated,
                                            const std::set<std::string>& g_bands) {
    const auto& bands = calibrated.table.bands;
    if (g_bands.empty()) throw std::invalid_argument("group rates: g_bands must not be empty");
    for (const auto& label : g_bands) {
        bool known = false;
        for (const auto& b : bands) known = known || b.label == label;
        if (!known) throw std::invalid_argument("group rates: unknown band label '" + label + "'");
    }
    if (g_bands.size() >= bands.size())
        throw std::invalid_argument("group rates: G must be a proper subset of the bands");

    double size_g = 0.0, weighted_g = 0.0, size_o = 0.0, weighted_o = 0.0;
    for (const auto& b : bands) {
        if (g_bands.count(b.label)) {
            size_g += b.size_millions;
            weighted_g += b.size_millions * b.death_prob;
        } else {
            size_o += b.size_millions;
            weighted_o += b.size_millions * b.death_prob;
        }
    }
    MortalityRates rates;
    rates.r_g = weighted_g / size_g;
    rates.r_other = weighted_o / size_o;
    rates.r_avg = (weighted_g + weighted_o) / (size_g + size_o);
    rates.alpha = size_g / (size_g + size_o);
    rates.scale_factor = calibrated.scale_factor;
    return rates;
}

/// Daily expected deaths per group plus optional sampled counts. Deaths are
/// pure post-processing: they never feed back into the epidemic (the engine
/// already folds the dead into R).
struct BurdenSeries {
    std::vector<double> ed_g;
    std::vector<double> ed_other;
    std::vector<double> ed_total;
    std::vector<std::int64_t> d_g;      // filled by sample_deaths
    std::vector<std::int64_t> d_other;
    double beds_per_death = 1.0;

    std::vector<double> bed_demand() const {
        std::vector<double> out(ed_total.size());
        for (std::size_t t = 0; t < ed_total.size(); ++t) out[t] = beds_per_death * ed_total[t];
        return out;
    }
};

/// ED_G(t) = r_G * sigma * I_G(t), ED_other(t) = r_other * sigma * (I - I_G).
inline BurdenSeries expected_deaths(const Trajectory& traj, const MortalityRates& rates,
                                    double sigma, double beds_per_death = 1.0) {
    BurdenSeries out;
    out.beds_per_death = beds_per_death;
    out.ed_g.reserve(traj.days.size());
    for (const auto& rec : traj.days) {
        const double ed_g = rates.r_g * sigma * static_cast<double>(rec.i_g);
        const double ed_o = rates.r_other * sigma * static_cast<double>(rec.i - rec.i_g);
        out.ed_g.push_back(ed_g);
        out.ed_other.push_back(ed_o);
        out.ed_total.push_back(ed_g + ed_o);
    }
    return out;
}

/// Adds sampled daily deaths: D_G ~ Binomial(I_G, r_G * sigma) and
/// D_other ~ Binomial(I - I_G, r_other * sigma).
inline BurdenSeries sample_deaths(const Trajectory& traj, const MortalityRates& rates,
                                  double sigma, RngStream& rng, double beds_per_death = 1.0) {
    if (rates.r_g * sigma > 1.0 || rates.r_other * sigma > 1.0)
        throw std::invalid_argument("sample_deaths: r * sigma exceeds 1");
    BurdenSeries out = expected_deaths(traj, rates, sigma, beds_per_death);
    out.d_g.reserve(traj.days.size());
    for (const auto& rec : traj.days) {
        out.d_g.push_back(sample_binomial(rng, rec.i_g, rates.r_g * sigma));
        out.d_other.push_back(sample_binomial(rng, rec.i - rec.i_g, rates.r_other * sigma));
    }
    return out;
}

} // namespace episim
