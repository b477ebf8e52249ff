#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "episim/distributions.hpp"
#include "episim/rng.hpp"

using namespace episim;

namespace {

struct Moments {
    double mean;
    double variance;
};

template <typename Sampler>
Moments sample_moments(RngStream& rng, std::size_t draws, Sampler&& sampler) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        const double x = static_cast<double>(sampler(rng));
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    return {mean, sum_sq / n - mean * mean};
}

} // namespace

TEST_CASE("same seed replays the identical sequence") {
    auto a = make_rng(42);
    auto b = make_rng(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge within the first draws") {
    auto a = make_rng(42);
    auto b = make_rng(43);
    bool differs = false;
    for (int i = 0; i < 10 && !differs; ++i) differs = a.next_u64() != b.next_u64();
    REQUIRE(differs);
}

TEST_CASE("derived streams are deterministic in (seed, index)") {
    auto base = make_rng(1);
    auto c1 = derive_stream(base, 5);
    auto c2 = derive_stream(base, 5);
    for (int i = 0; i < 100; ++i) REQUIRE(c1.next_u64() == c2.next_u64());

    // consuming the base does not change its children
    auto base2 = make_rng(1);
    base2.next_u64();
    auto c3 = derive_stream(base2, 5);
    auto c4 = derive_stream(make_rng(1), 5);
    for (int i = 0; i < 10; ++i) REQUIRE(c3.next_u64() == c4.next_u64());
}

TEST_CASE("derived streams differ across indices and base seeds") {
    auto base7 = make_rng(7);
    auto d0 = derive_stream(base7, 0);
    auto d1 = derive_stream(base7, 1);
    bool differs = false;
    for (int i = 0; i < 10 && !differs; ++i) differs = d0.next_u64() != d1.next_u64();
    REQUIRE(differs);

    std::set<std::array<std::uint64_t, 4>> prefixes;
    auto base = make_rng(1);
    for (std::uint64_t idx = 0; idx < 100; ++idx) {
        auto child = derive_stream(base, idx);
        std::array<std::uint64_t, 4> prefix;
        for (auto& word : prefix) word = child.next_u64();
        prefixes.insert(prefix);
    }
    REQUIRE(prefixes.size() == 100);

    auto s1 = derive_stream(make_rng(1), 0);
    auto s2 = derive_stream(make_rng(2), 0);
    differs = false;
    for (int i = 0; i < 10 && !differs; ++i) differs = s1.next_u64() != s2.next_u64();
    REQUIRE(differs);
}

TEST_CASE("poisson degenerate and error cases") {
    auto rng = make_rng(3);
    for (int i = 0; i < 100; ++i) REQUIRE(sample_poisson(rng, 0.0) == 0);
    REQUIRE_THROWS_AS(sample_poisson(rng, -1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_poisson(rng, std::nan("")), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_poisson(rng, std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
}

TEST_CASE("poisson moments at mean 7") {
    auto rng = make_rng(101);
    const auto m = sample_moments(rng, 1000000,
                                  [](RngStream& r) { return sample_poisson(r, 7.0); });
    REQUIRE(m.mean == Catch::Approx(7.0).margin(0.01));
    REQUIRE(m.variance == Catch::Approx(7.0).margin(0.05));
}

TEST_CASE("poisson zero-class frequency at the transmission rate 2.5/21") {
    const double mean = 2.5 / 21.0;
    auto rng = make_rng(202);
    std::size_t zeros = 0;
    const std::size_t draws = 1000000;
    for (std::size_t d = 0; d < draws; ++d)
        if (sample_poisson(rng, mean) == 0) ++zeros;
    const double freq = static_cast<double>(zeros) / static_cast<double>(draws);
    REQUIRE(freq == Catch::Approx(std::exp(-mean)).margin(0.002));
}

TEST_CASE("poisson large-mean path stays calibrated") {
    auto rng = make_rng(303);
    const auto m = sample_moments(rng, 100000,
                                  [](RngStream& r) { return sample_poisson(r, 5000.0); });
    REQUIRE(m.mean == Catch::Approx(5000.0).margin(2.0));
    REQUIRE(m.variance == Catch::Approx(5000.0).epsilon(0.03));
}

TEST_CASE("erlang day sampler matches the stated mean and spread") {
    auto rng = make_rng(404);
    const auto m = sample_moments(rng, 1000000, [](RngStream& r) {
        return sample_erlang_days(r, 3, 1.0 / 7.0);
    });
    REQUIRE(m.mean == Catch::Approx(21.0).margin(0.1));
    // continuous Erlang(3, 1/7) has sd 7*sqrt(3) ~= 12.1
    REQUIRE(std::sqrt(m.variance) == Catch::Approx(12.12).margin(0.3));
}

TEST_CASE("erlang clamps to one day and keeps k=2 mean") {
    auto rng = make_rng(505);
    for (int i = 0; i < 1000; ++i) REQUIRE(sample_erlang_days(rng, 1, 1e6) == 1);

    const auto m = sample_moments(rng, 1000000, [](RngStream& r) {
        return sample_erlang_days(r, 2, 1.0 / 7.0);
    });
    REQUIRE(m.mean == Catch::Approx(14.0).margin(0.1));
}

TEST_CASE("erlang rejects invalid parameters") {
    auto rng = make_rng(1);
    REQUIRE_THROWS_AS(sample_erlang_days(rng, 0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_erlang_days(rng, 3, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_erlang_days(rng, 3, -0.1), std::invalid_argument);
}

TEST_CASE("binomial edge cases") {
    auto rng = make_rng(606);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(sample_binomial(rng, 0, 0.3) == 0);
        REQUIRE(sample_binomial(rng, 5, 1.0) == 5);
        REQUIRE(sample_binomial(rng, 5, 0.0) == 0);
    }
    REQUIRE_THROWS_AS(sample_binomial(rng, 10, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_binomial(rng, 10, 1.1), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_binomial(rng, -1, 0.5), std::invalid_argument);
}

TEST_CASE("binomial mean at the daily death parameters") {
    // n = 1e5 with p = 0.009/21: mean must settle near n*p = 42.857
    auto rng = make_rng(707);
    const double p = 0.009 / 21.0;
    const auto m = sample_moments(rng, 10000,
                                  [p](RngStream& r) { return sample_binomial(r, 100000, p); });
    REQUIRE(m.mean == Catch::Approx(100000 * p).margin(0.5));
}

TEST_CASE("binomial split path and symmetry stay calibrated") {
    auto rng = make_rng(808);
    const auto big = sample_moments(rng, 20000, [](RngStream& r) {
        return sample_binomial(r, 1000000, 0.001);  // n*p = 1000, uses the split path
    });
    REQUIRE(big.mean == Catch::Approx(1000.0).margin(1.5));
    REQUIRE(big.variance == Catch::Approx(999.0).epsilon(0.05));

    const auto high_p = sample_moments(rng, 100000, [](RngStream& r) {
        return sample_binomial(r, 10, 0.75);
    });
    REQUIRE(high_p.mean == Catch::Approx(7.5).margin(0.02));
}

TEST_CASE("bernoulli frequencies") {
    auto rng = make_rng(909);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE_FALSE(sample_bernoulli(rng, 0.0));
        REQUIRE(sample_bernoulli(rng, 1.0));
    }
    // p = c*alpha = 0.2 * 0.25, the strong-isolation targeting probability
    std::size_t hits = 0;
    const std::size_t draws = 100000;
    for (std::size_t d = 0; d < draws; ++d)
        if (sample_bernoulli(rng, 0.05)) ++hits;
    REQUIRE(static_cast<double>(hits) / static_cast<double>(draws)
            == Catch::Approx(0.05).margin(0.002));
    REQUIRE_THROWS_AS(sample_bernoulli(rng, 1.5), std::invalid_argument);
}

TEST_CASE("sampler sequences are a pure function of seed and call order") {
    const auto drive = [](RngStream rng) {
        std::vector<std::int64_t> out;
        for (int i = 0; i < 200; ++i) {
            out.push_back(sample_poisson(rng, 7.0));
            out.push_back(sample_erlang_days(rng, 3, 1.0 / 7.0));
            out.push_back(sample_binomial(rng, 1000, 0.01));
            out.push_back(sample_bernoulli(rng, 0.3) ? 1 : 0);
            out.push_back(static_cast<std::int64_t>(sample_index(rng, 17)));
        }
        return out;
    };
    REQUIRE(drive(make_rng(77)) == drive(make_rng(77)));
}

TEST_CASE("uniform index covers its range without bias") {
    auto rng = make_rng(1111);
    std::array<int, 5> counts{};
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) counts[sample_index(rng, 5)] += 1;
    for (const int c : counts)
        REQUIRE(static_cast<double>(c) / draws == Catch::Approx(0.2).margin(0.01));
    REQUIRE(sample_int_range(rng, 3, 3) == 3);
    REQUIRE_THROWS_AS(sample_index(rng, 0), std::invalid_argument);
}
