#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "episim/rng.hpp"

namespace episim {

/// True with probability p.
inline bool sample_bernoulli(RngStream& rng, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must lie in [0,1]");
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return rng.next_double() < p;
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t sample_index(RngStream& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("sample_index: n must be positive");
    // Lemire's multiply-shift with rejection to remove modulo bias.
    std::uint64_t x = rng.next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = rng.next_u64();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform integer in [lo, hi], inclusive.
inline std::int64_t sample_int_range(RngStream& rng, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("sample_int_range: empty range");
    return lo + static_cast<std::int64_t>(sample_index(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

namespace detail {

inline double log_factorial(std::int64_t k) {
    static const double table[] = {
        0.0, 0.0, 0.6931471805599453, 1.791759469228055, 3.1780538303479458,
        4.787491742782046, 6.579251212010101, 8.525161361065415, 10.60460290274525,
        12.801827480081469, 15.104412573075516, 17.502307845873887, 19.987214495661885,
        22.552163853123425, 25.19122118273868, 27.89927138384089};
    if (k < 16) return table[k];
    // Stirling series; relative error below 1e-10 for k >= 16.
    const double x = static_cast<double>(k) + 1.0;
    return (x - 0.5) * std::log(x) - x + 0.9189385332046727
           + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
}

// Knuth's product-of-uniforms method, suitable for small means.
inline std::int64_t poisson_small(RngStream& rng, double mean) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_double();
    } while (p > limit);
    return k - 1;
}

// Transformed rejection (PTRD, Hoermann 1993) for mean >= 10.
inline std::int64_t poisson_ptrd(RngStream& rng, double mean) {
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = rng.next_double() - 0.5;
        double v = rng.next_double();
        const double us = 0.5 - std::fabs(u);
        const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= v_r) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b))
            <= static_cast<double>(k) * log_mean - mean - log_factorial(k))
            return k;
    }
}

} // namespace detail

/// Draw from Poisson(mean). mean must be finite and non-negative.
inline std::int64_t sample_poisson(RngStream& rng, double mean) {
    if (!std::isfinite(mean) || mean < 0.0)
        throw std::invalid_argument("poisson: mean must be finite and non-negative");
    if (mean == 0.0) return 0;
    return mean < 10.0 ? detail::poisson_small(rng, mean) : detail::poisson_ptrd(rng, mean);
}

/// Sum of k independent Exponential(rate) draws, rounded to the nearest
/// whole day and clamped to at least 1 day. The clamp keeps every
/// infectious individual alive for at least one tick of the daily engine.
inline std::int64_t sample_erlang_days(RngStream& rng, int k, double rate) {
    if (k < 1) throw std::invalid_argument("erlang: shape k must be a positive integer");
    if (!std::isfinite(rate) || rate <= 0.0)
        throw std::invalid_argument("erlang: rate must be positive and finite");
    double sum = 0.0;
    for (int stage = 0; stage < k; ++stage)
        sum += -std::log(1.0 - rng.next_double()) / rate;
    const std::int64_t days = std::llround(sum);
    return days < 1 ? 1 : days;
}

namespace detail {

// CDF inversion by chopping down from zero; requires p <= 0.5 and modest n*p.
inline std::int64_t binomial_inversion(RngStream& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double ratio = p / q;
    double f = std::pow(q, static_cast<double>(n));
    double cum = f;
    const double u = rng.next_double();
    std::int64_t x = 0;
    while (u > cum && x < n) {
        ++x;
        f *= ratio * static_cast<double>(n - x + 1) / static_cast<double>(x);
        cum += f;
    }
    return x;
}

} // namespace detail

/// Draw from Binomial(n, p).
inline std::int64_t sample_binomial(RngStream& rng, std::int64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p must lie in [0,1]");
    if (n < 0) throw std::invalid_argument("binomial: n must be non-negative");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
    // Split large draws so the inversion walk stays short; the halves are
    // independent binomials of the same p, so the sum is exact.
    if (static_cast<double>(n) * p > 30.0 && n > 64) {
        const std::int64_t half = n / 2;
        return sample_binomial(rng, half, p) + sample_binomial(rng, n - half, p);
    }
    return detail::binomial_inversion(rng, n, p);
}

} // namespace episim
