// SPDX-License-Identifier: Apache-2.0
//
// harq-outage: outage analysis for Type I HARQ over time-correlated
// Rayleigh fading channels
// Copyright (C) 2026 the harq-outage authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "harq/series.hpp"
#include "test_util.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::equal_power_db;
using testutil::make_spec;

namespace {

// Pr{Poisson(x) >= a}, long double tail summation (independent route to the
// regularized Gamma CDF factors).
long double poisson_tail(std::int64_t a, long double x) {
    long double pmf = std::exp(-double(x));
    for (std::int64_t m = 1; m <= a; ++m)
        pmf *= x / (long double)(m);
    long double sum = pmf;
    std::int64_t m = a;
    while (m < a + 200000) {
        ++m;
        pmf *= x / (long double)(m);
        sum += pmf;
        if (pmf < sum * 1e-25L)
            break;
    }
    return sum;
}

double independent_outage_closed_form(const harq::ChannelSpec& spec,
                                      const harq::PowerProfile& power) {
    const double z = harq::snr_threshold(spec);
    double prod = 1.0;
    for (int k = 1; k <= spec.max_rounds; ++k)
        prod *= 1.0 - std::exp(-z / (harq::round_power(spec, power, k) *
                                     spec.sigma_sq[std::size_t(k - 1)]));
    return prod;
}

} // namespace

TEST_CASE("for_each_composition enumerates lexicographically") {
    std::vector<std::vector<int>> seen;
    harq::for_each_composition(2, 2, [&](std::span<const int> n) {
        seen.emplace_back(n.begin(), n.end());
    });
    REQUIRE(seen.size() == 3);
    CHECK(seen[0] == std::vector<int>{0, 2});
    CHECK(seen[1] == std::vector<int>{1, 1});
    CHECK(seen[2] == std::vector<int>{2, 0});

    for (int t : {0, 1, 3, 6}) {
        for (int parts : {1, 2, 3, 4}) {
            std::size_t count = 0;
            harq::for_each_composition(t, parts, [&](std::span<const int>) { ++count; });
            CHECK(double(count) == harq::composition_count(t, parts));
        }
    }
}

TEST_CASE("MixtureIndex validation") {
    const auto idx = harq::MixtureIndex::make({1, 0, 2});
    CHECK(idx.layer == 3);
    CHECK_THROWS_AS(harq::MixtureIndex::make({1, -1}), std::invalid_argument);
}

TEST_CASE("weight hand values") {
    const auto independent = make_spec(3, 0.0, 1.0, 2.0);
    CHECK(harq::weight(independent, harq::MixtureIndex::zero(3)) == 1.0);
    CHECK(harq::weight(independent, harq::MixtureIndex::make({1, 0, 0})) == 0.0);

    // K=1, rho=0.5: s1 = 1/3, so W([1]) = (3/4)(1/4) = 3/16
    const auto single = make_spec(1, 0.5, 1.0, 2.0);
    CHECK_THAT(harq::weight(single, harq::MixtureIndex::make({1})), WithinRel(0.1875, 1e-14));

    // K=2, rho=0.5: s = (1/3, 1/15), S = 2/5, so
    // W([1,1]) = (5/7) * 2 * (5/21) * (1/21) = 50/3087
    const auto pair = make_spec(2, 0.5, 1.0, 2.0);
    CHECK_THAT(harq::weight(pair, harq::MixtureIndex::make({1, 1})),
               WithinRel(50.0 / 3087.0, 1e-13));

    // n = 0 gives the prefactor 1/(1+S) for any spec
    const auto spec = make_spec(3, 0.7, 1.0, 2.0);
    CHECK_THAT(harq::weight(spec, harq::MixtureIndex::zero(3)),
               WithinRel(1.0 / (1.0 + harq::total_correlation_load(spec)), 1e-14));

    CHECK_THROWS_AS(harq::weight(spec, harq::MixtureIndex::zero(2)), std::invalid_argument);
}

TEST_CASE("weights stay inside [0, 1]") {
    std::mt19937 gen(7u);
    std::uniform_real_distribution<double> rho_dist(0.0, 0.95);
    std::uniform_int_distribution<int> k_dist(1, 4);
    std::uniform_int_distribution<int> n_dist(0, 6);
    for (int rep = 0; rep < 200; ++rep) {
        const int rounds = k_dist(gen);
        const auto spec = make_spec(rounds, rho_dist(gen), 1.0, 2.0);
        std::vector<int> n(std::size_t(rounds), 0);
        for (auto& v : n)
            v = n_dist(gen);
        const double w = harq::weight(spec, harq::MixtureIndex::make(n));
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
}

TEST_CASE("gamma_mixture_cdf values") {
    // z = 0 in every coordinate gives 0
    const auto spec2 = make_spec(2, 0.5, 1.0, 2.0);
    const auto power2 = equal_power_db(2, 0.0);
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(harq::gamma_mixture_cdf(spec2, power2, harq::MixtureIndex::zero(2), zeros) == 0.0);

    // n = 0, K = 1, theta = 1: exponential CDF at 3
    const auto spec1 = make_spec(1, 0.0, 1.0, 2.0);
    const auto power1 = harq::PowerProfile::make(1.0, {1.0});
    const std::vector<double> z3{3.0};
    CHECK_THAT(harq::gamma_mixture_cdf(spec1, power1, harq::MixtureIndex::zero(1), z3),
               WithinRel(1.0 - std::exp(-3.0), 1e-14));

    // n = [1, 0], theta = [2, 1] (rho = 0, sigma_sq = [2, 1]): P(2, 1.5) P(1, 3)
    const auto spec = harq::ChannelSpec::make(2, 0.0, 1.0, {2.0, 1.0}, 2.0);
    const auto power = harq::PowerProfile::make(1.0, {1.0, 1.0});
    const std::vector<double> z{3.0, 3.0};
    const double expected = double(poisson_tail(2, 1.5L) * poisson_tail(1, 3.0L));
    CHECK_THAT(harq::gamma_mixture_cdf(spec, power, harq::MixtureIndex::make({1, 0}), z),
               WithinRel(expected, 1e-12));
}

TEST_CASE("gamma_mixture_cdf is nondecreasing in each coordinate") {
    std::mt19937 gen(11u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int rounds = 1 + int(unit(gen) * 3.0);
        const auto spec = make_spec(rounds, 0.9 * unit(gen), 1.0, 2.0);
        const auto power = equal_power_db(rounds, 10.0 * unit(gen));
        std::vector<int> n(std::size_t(rounds), 0);
        for (auto& v : n)
            v = int(unit(gen) * 4.0);
        const auto idx = harq::MixtureIndex::make(n);
        std::vector<double> z(std::size_t(rounds), 0.0);
        for (auto& v : z)
            v = 6.0 * unit(gen);
        const double base = harq::gamma_mixture_cdf(spec, power, idx, z);
        for (std::size_t k = 0; k < z.size(); ++k) {
            auto bumped = z;
            bumped[k] += 0.5;
            CHECK(harq::gamma_mixture_cdf(spec, power, idx, bumped) + 1e-15 >= base);
        }
    }
}

TEST_CASE("independent channels collapse the series to the closed form") {
    for (int rounds : {1, 2, 3, 4}) {
        const auto spec = make_spec(rounds, 0.0, 1.0, 2.0);
        const auto power = equal_power_db(rounds, 5.0);
        const auto result = harq::outage_truncated(spec, power, 0);
        CHECK_THAT(result.value,
                   WithinAbs(independent_outage_closed_form(spec, power), 1e-14));
        CHECK(result.bound == 0.0);

        // only the zero index survives: higher layers contribute nothing
        const auto layers = harq::outage_layer_contributions(spec, power, 3);
        CHECK(layers[1] == 0.0);
        CHECK(layers[2] == 0.0);
        CHECK(layers[3] == 0.0);
    }
}

TEST_CASE("outage_truncated accounting") {
    const auto spec = make_spec(3, 0.6, 1.0, 2.0);
    const auto power = equal_power_db(3, 5.0);
    const auto result = harq::outage_truncated(spec, power, 7);
    CHECK(result.order == 7);
    CHECK(result.terms_evaluated == 120); // C(10, 3)
    const double q = harq::truncation_ratio(spec);
    CHECK_THAT(result.bound, WithinRel(std::pow(q, 8.0), 1e-14));
    CHECK(result.value > 0.0);
    CHECK(result.value <= 1.0);
}

TEST_CASE("truncation is monotone and the certified envelope holds") {
    std::mt19937 gen(23u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const int rounds = 1 + int(unit(gen) * 3.99);
        const double rho = 0.9 * unit(gen);
        const double delta = 0.5 + 1.5 * unit(gen);
        const double rate = 0.5 + 2.5 * unit(gen);
        const double db = -5.0 + 20.0 * unit(gen);
        const auto spec = make_spec(rounds, rho, delta, rate);
        const auto power = equal_power_db(rounds, db);

        const auto layers = harq::outage_layer_contributions(spec, power, 16);
        std::vector<double> partial(layers.size());
        double acc = 0.0;
        for (std::size_t t = 0; t < layers.size(); ++t) {
            acc += layers[t];
            partial[t] = acc;
        }
        const double q = harq::truncation_ratio(spec);
        for (int n = 0; n + 1 < int(layers.size()); ++n) {
            CHECK(partial[std::size_t(n + 1)] + 1e-15 >= partial[std::size_t(n)]);
            const double envelope = partial[std::size_t(n)] + std::pow(q, double(n + 1));
            for (int m = n + 1; m < int(layers.size()); ++m)
                CHECK(partial[std::size_t(m)] <= envelope + 1e-15);
        }
    }
}

TEST_CASE("measured truncation error stays under the geometric bound") {
    double worst_ratio = 0.0;
    for (double rho : {0.3, 0.6, 0.9}) {
        for (int rounds : {2, 4}) {
            const auto spec = make_spec(rounds, rho, 1.0, 2.0);
            const auto power = equal_power_db(rounds, 5.0);
            const auto layers = harq::outage_layer_contributions(spec, power, 28);
            const double q = harq::truncation_ratio(spec);
            for (int n = 0; n <= 8; ++n) {
                harq::detail::KahanSum tail;
                for (int t = n + 1; t <= n + 20; ++t)
                    tail.add(layers[std::size_t(t)]);
                const double bound = std::pow(q, double(n + 1));
                CHECK(tail.sum <= bound + 1e-14);
                if (tail.sum > 0.0)
                    worst_ratio = std::max(worst_ratio, tail.sum / bound);
            }
        }
    }
    // tightness is not asserted, only logged
    std::printf("note: largest measured tail/bound ratio = %.3e\n", worst_ratio);
}

TEST_CASE("outage decreases with power and increases with rate") {
    const auto eps = 1e-10;
    for (int rounds : {1, 3}) {
        double prev = 1.1;
        for (double db : {0.0, 4.0, 8.0, 12.0, 16.0}) {
            const auto spec = make_spec(rounds, 0.6, 1.0, 2.0);
            const auto out =
                harq::outage_truncated(spec, equal_power_db(rounds, db),
                                       harq::choose_truncation(spec, eps));
            CHECK(out.value < prev);
            prev = out.value;
        }
        prev = -0.1;
        for (double rate : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
            const auto spec = make_spec(rounds, 0.6, 1.0, rate);
            const auto out =
                harq::outage_truncated(spec, equal_power_db(rounds, 8.0),
                                       harq::choose_truncation(spec, eps));
            CHECK(out.value > prev);
            prev = out.value;
        }
    }
}

TEST_CASE("choose_truncation picks the smallest adequate order") {
    CHECK(harq::choose_truncation(make_spec(3, 0.0, 1.0, 2.0), 1e-9) == 0);

    // q = 1/2 via rho = sqrt(0.5), K = 1, delta = 1
    const auto half = make_spec(1, std::sqrt(0.5), 1.0, 2.0);
    CHECK_THAT(harq::truncation_ratio(half), WithinRel(0.5, 1e-14));
    CHECK(harq::choose_truncation(half, 1e-3) == 9);

    for (const auto& spec : {make_spec(4, 0.5, 1.0, 2.0), make_spec(2, 0.9, 1.0, 2.0)}) {
        for (double eps : {1e-3, 1e-8, 1e-12}) {
            const int chosen = harq::choose_truncation(spec, eps);
            const double q = harq::truncation_ratio(spec);
            int scanned = 0; // direct linear scan
            while (std::pow(q, double(scanned + 1)) > eps)
                ++scanned;
            CHECK(chosen == scanned);
        }
    }
    CHECK_THROWS_AS(harq::choose_truncation(half, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(harq::choose_truncation(half, 1.0), std::invalid_argument);
}

TEST_CASE("layer weight sums match the closed form") {
    const auto spec0 = make_spec(3, 0.0, 1.0, 2.0);
    CHECK(harq::layer_weight_sum(spec0, 0) == 1.0);
    CHECK(harq::layer_weight_sum(spec0, 1) == 0.0);
    CHECK(harq::layer_weight_sum(spec0, 4) == 0.0);

    const auto spec = make_spec(3, 0.6, 1.0, 2.0);
    const double q = harq::truncation_ratio(spec);
    CHECK_THAT(harq::layer_weight_sum(spec, 0),
               WithinRel(1.0 / (1.0 + harq::total_correlation_load(spec)), 1e-14));
    CHECK_THAT(harq::layer_weight_sum(spec, 4), WithinAbs((1.0 - q) * std::pow(q, 4.0), 1e-12));

    for (int rounds : {2, 3, 4}) {
        for (double rho : {0.3, 0.6, 0.9}) {
            const auto s = make_spec(rounds, rho, 1.0, 2.0);
            const double qq = harq::truncation_ratio(s);
            for (int t = 0; t <= 8; ++t)
                CHECK_THAT(harq::layer_weight_sum(s, t),
                           WithinAbs((1.0 - qq) * std::pow(qq, double(t)), 1e-12));
        }
    }
}

TEST_CASE("term budget failures are loud") {
    const auto spec = make_spec(4, 0.9, 1.0, 2.0);
    const auto power = equal_power_db(4, 10.0);
    CHECK_THROWS_AS(harq::outage_truncated(spec, power, 60, 1000), harq::resource_limit_error);
    CHECK_THROWS_WITH(harq::outage_truncated(spec, power, 60, 1000),
                      Catch::Matchers::ContainsSubstring("HARQ_TERM_CAP"));
    CHECK_THROWS_AS(harq::layer_weight_sum(spec, 400, 1000), harq::resource_limit_error);
    // generous cap passes
    CHECK_NOTHROW(harq::outage_truncated(spec, power, 20, harq::default_term_cap));
}
