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

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "harq/channel.hpp"
#include "harq/errors.hpp"
#include "harq/special_functions.hpp"

namespace harq {

/// Default cap on the number of series terms a single evaluation may touch.
/// Overridable per call; the CLI wires it to the HARQ_TERM_CAP environment
/// variable.
inline constexpr std::uint64_t default_term_cap = 10'000'000;

/// Multi-index n = [n_1, ..., n_K] of one mixture term, together with its
/// layer t = sum_k n_k.
struct MixtureIndex {
    std::vector<int> n;
    int layer = 0;

    static MixtureIndex make(std::vector<int> entries) {
        int total = 0;
        for (int v : entries) {
            if (v < 0)
                throw std::invalid_argument("MixtureIndex entries must be >= 0");
            total += v;
        }
        return MixtureIndex{std::move(entries), total};
    }

    static MixtureIndex zero(int rounds) {
        return MixtureIndex{std::vector<int>(std::size_t(rounds), 0), 0};
    }
};

/// Truncated series evaluation: the exact outage lies in
/// [value, value + bound].
struct TruncatedOutage {
    double value = 0.0;               // partial sum through layer `order`
    int order = 0;                    // truncation order N
    double bound = 0.0;               // certified tail bound q^{N+1}
    std::uint64_t terms_evaluated = 0;
};

/// Visits every composition of `total` into `parts` nonnegative integers in
/// lexicographic order (first coordinate slowest). Deterministic order keeps
/// floating-point sums reproducible.
template <class Fn>
void for_each_composition(int total, int parts, Fn&& fn) {
    if (total < 0 || parts < 1)
        throw std::invalid_argument("for_each_composition: total >= 0 and parts >= 1 required");
    std::vector<int> n(std::size_t(parts), 0);
    auto recurse = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == parts - 1) {
            n[std::size_t(pos)] = remaining;
            fn(std::span<const int>(n));
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            n[std::size_t(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    recurse(recurse, 0, total);
}

/// Number of compositions of t into k parts, C(t+k-1, k-1), as a double.
inline double composition_count(int t, int k) {
    double c = 1.0;
    for (int i = 1; i < k; ++i)
        c *= double(t + i) / double(i);
    return c;
}

/// Total series terms through layer N, C(N+k, k), as a double.
inline double series_term_count(int order, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i)
        c *= double(order + i) / double(i);
    return c;
}

namespace detail {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

inline void check_term_budget(double needed, std::uint64_t cap, const char* what) {
    if (needed > double(cap))
        throw resource_limit_error(std::string(what) + ": would evaluate " +
                                   std::to_string(std::uint64_t(needed)) +
                                   " series terms, cap is " + std::to_string(cap) +
                                   " (override with HARQ_TERM_CAP)");
}

} // namespace detail

/// Mixture weight W_n: in log domain, since the multinomial coefficient
/// overflows linear doubles long before W_n itself leaves [0, 1].
inline double weight(const ChannelSpec& spec, const MixtureIndex& index) {
    spec.validate();
    if (index.n.size() != std::size_t(spec.max_rounds))
        throw std::invalid_argument("MixtureIndex must have exactly K entries");
    const double total_load = total_correlation_load(spec);
    const double log_w0 = -std::log1p(total_load);
    double log_w = log_factorial(index.layer) + log_w0;
    for (int k = 1; k <= spec.max_rounds; ++k) {
        const int nk = index.n[std::size_t(k - 1)];
        log_w -= log_factorial(nk);
        if (nk > 0) {
            const double load = correlation_load(spec, k);
            if (load == 0.0)
                return 0.0;
            log_w += double(nk) * std::log(load / (1.0 + total_load));
        }
    }
    const double w = std::exp(log_w);
    return w < 1.0 ? w : 1.0;
}

/// Joint CDF of the independent Gamma vector indexed by n, evaluated at z:
/// prod_k P(n_k + 1, z_k / theta_k). Nondecreasing in every coordinate.
inline double gamma_mixture_cdf(const ChannelSpec& spec, const PowerProfile& power,
                                const MixtureIndex& index, std::span<const double> z) {
    if (index.n.size() != std::size_t(spec.max_rounds) || z.size() != index.n.size())
        throw std::invalid_argument("gamma_mixture_cdf: index and z must have exactly K entries");
    double prod = 1.0;
    for (int k = 1; k <= spec.max_rounds; ++k) {
        const double zk = z[std::size_t(k - 1)];
        if (!(zk >= 0.0))
            throw std::invalid_argument("gamma_mixture_cdf: z entries must be >= 0");
        prod *= regularized_lower_gamma(index.n[std::size_t(k - 1)] + 1,
                                        zk / gamma_scale(spec, power, k));
    }
    return prod;
}

/// Per-layer contributions sum_{|n|=t} W_n F_An(threshold, ...) for
/// t = 0..order. Partial sums of this vector give every truncation of the
/// series at once.
inline std::vector<double> outage_layer_contributions(const ChannelSpec& spec,
                                                      const PowerProfile& power, int order,
                                                      std::uint64_t term_cap = default_term_cap) {
    spec.validate();
    power.validate();
    detail::check_round_count(spec, power);
    if (order < 0)
        throw std::invalid_argument("truncation order must be >= 0");
    const int rounds = spec.max_rounds;
    detail::check_term_budget(series_term_count(order, rounds), term_cap,
                              "outage_layer_contributions");

    const double threshold = snr_threshold(spec);
    const double total_load = total_correlation_load(spec);
    const double log_w0 = -std::log1p(total_load);

    // Per-round tables over n = 0..order: the regularized Gamma CDF factor
    // and the log-weight factor n*log(s_k/(1+S)) - log(n!).
    const std::size_t width = std::size_t(order) + 1;
    std::vector<std::vector<double>> cdf_factor;
    std::vector<std::vector<double>> log_weight_factor;
    cdf_factor.resize(std::size_t(rounds));
    log_weight_factor.resize(std::size_t(rounds));
    for (int k = 1; k <= rounds; ++k) {
        const double x = threshold / gamma_scale(spec, power, k);
        const double load = correlation_load(spec, k);
        const double log_ratio =
            load > 0.0 ? std::log(load / (1.0 + total_load))
                       : -std::numeric_limits<double>::infinity();
        auto& cdf = cdf_factor[std::size_t(k - 1)];
        auto& lwf = log_weight_factor[std::size_t(k - 1)];
        cdf.resize(width);
        lwf.resize(width);
        for (int n = 0; n <= order; ++n) {
            cdf[std::size_t(n)] = regularized_lower_gamma(n + 1, x);
            lwf[std::size_t(n)] =
                (n == 0 ? 0.0 : double(n) * log_ratio) - log_factorial(n);
        }
    }

    std::vector<double> layers(width, 0.0);
    for (int t = 0; t <= order; ++t) {
        detail::KahanSum layer;
        const double log_layer_base = log_factorial(t) + log_w0;
        for_each_composition(t, rounds, [&](std::span<const int> n) {
            double log_w = log_layer_base;
            double cdf = 1.0;
            for (int k = 0; k < rounds; ++k) {
                const auto nk = std::size_t(n[std::size_t(k)]);
                log_w += log_weight_factor[std::size_t(k)][nk];
                cdf *= cdf_factor[std::size_t(k)][nk];
            }
            layer.add(std::exp(log_w) * cdf);
        });
        layers[std::size_t(t)] = layer.sum;
    }
    return layers;
}

/// Outage probability truncated at layer `order`, with the certified tail
/// bound q^{order+1}. Layers are accumulated in ascending order with
/// compensated summation.
inline TruncatedOutage outage_truncated(const ChannelSpec& spec, const PowerProfile& power,
                                        int order, std::uint64_t term_cap = default_term_cap) {
    const std::vector<double> layers = outage_layer_contributions(spec, power, order, term_cap);
    detail::KahanSum total;
    for (double layer : layers)
        total.add(layer);
    TruncatedOutage result;
    result.value = total.sum;
    result.order = order;
    result.bound = std::pow(truncation_ratio(spec), double(order + 1));
    result.terms_evaluated = std::uint64_t(series_term_count(order, spec.max_rounds) + 0.5);
    return result;
}

/// Smallest N with q^{N+1} <= target_eps (N = 0 when q = 0).
inline int choose_truncation(const ChannelSpec& spec, double target_eps) {
    spec.validate();
    if (!(target_eps > 0.0 && target_eps < 1.0))
        throw std::invalid_argument("target_eps must satisfy 0 < target_eps < 1");
    const double q = truncation_ratio(spec);
    if (q == 0.0)
        return 0;
    int order = int(std::floor(std::log(target_eps) / std::log(q))) - 1;
    if (order < 0)
        order = 0;
    while (order > 0 && std::pow(q, double(order)) <= target_eps)
        --order;
    while (std::pow(q, double(order + 1)) > target_eps)
        ++order;
    return order;
}

/// sum_{|n|=t} W_n by explicit enumeration. Equals (1-q) q^t by the
/// multinomial identity; the tests hold the two routes against each other.
inline double layer_weight_sum(const ChannelSpec& spec, int t,
                               std::uint64_t term_cap = default_term_cap) {
    spec.validate();
    if (t < 0)
        throw std::invalid_argument("layer index t must be >= 0");
    const int rounds = spec.max_rounds;
    detail::check_term_budget(composition_count(t, rounds), term_cap, "layer_weight_sum");

    const double total_load = total_correlation_load(spec);
    const double log_w0 = -std::log1p(total_load);
    std::vector<double> log_ratio(std::size_t(rounds), 0.0);
    for (int k = 1; k <= rounds; ++k) {
        const double load = correlation_load(spec, k);
        log_ratio[std::size_t(k - 1)] =
            load > 0.0 ? std::log(load / (1.0 + total_load))
                       : -std::numeric_limits<double>::infinity();
    }
    detail::KahanSum sum;
    const double log_base = log_factorial(t) + log_w0;
    for_each_composition(t, rounds, [&](std::span<const int> n) {
        double log_w = log_base;
        for (int k = 0; k < rounds; ++k) {
            const int nk = n[std::size_t(k)];
            log_w -= log_factorial(nk);
            if (nk > 0)
                log_w += double(nk) * log_ratio[std::size_t(k)];
        }
        sum.add(std::exp(log_w));
    });
    return sum.sum;
}

} // namespace harq
