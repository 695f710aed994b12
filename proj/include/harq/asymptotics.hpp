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
#include <stdexcept>
#include <utility>
#include <vector>

#include "harq/channel.hpp"
#include "harq/series.hpp"

namespace harq {

/// High-SNR outage split into its three decoupled factors:
///   term_a = (2^R - 1)^K          (rate)
///   term_b = prod_k 1/(P_k s_k^2) (transmit powers)
///   term_c = 1 / ell(rho, K)      (time-correlation penalty, >= 1)
struct AsymptoticBreakdown {
    double term_a = 0.0;
    double term_b = 0.0;
    double term_c = 0.0;
    double product = 0.0;
};

/// Correlation penalty ell(rho, K) = (1 + S) prod_k (1 - rho^{2(k+delta-1)}).
/// Lies in (0, 1], equals 1 at rho = 0, and is nonincreasing in rho.
inline double ell(const ChannelSpec& spec) {
    spec.validate();
    double one_minus_prod = 1.0;
    for (int k = 1; k <= spec.max_rounds; ++k)
        one_minus_prod *= 1.0 - correlation_exponent(spec, k);
    const double value = (1.0 + total_correlation_load(spec)) * one_minus_prod;
    // exactly 1 in exact arithmetic for K = 1; clamp the last-ulp excursion
    return value < 1.0 ? value : 1.0;
}

inline AsymptoticBreakdown asymptotic_breakdown(const ChannelSpec& spec,
                                                const PowerProfile& power) {
    spec.validate();
    power.validate();
    detail::check_round_count(spec, power);
    AsymptoticBreakdown b;
    b.term_a = std::pow(snr_threshold(spec), double(spec.max_rounds));
    b.term_b = 1.0;
    for (int k = 1; k <= spec.max_rounds; ++k)
        b.term_b /= round_power(spec, power, k) * spec.sigma_sq[std::size_t(k - 1)];
    b.term_c = 1.0 / ell(spec);
    b.product = b.term_a * b.term_b * b.term_c;
    return b;
}

/// Leading-order outage (2^R-1)^K prod_k 1/(P_k s_k^2) / ell(rho, K).
/// Decays as P_T^{-K}; only meaningful at high SNR (can exceed 1 elsewhere).
inline double outage_asymptotic(const ChannelSpec& spec, const PowerProfile& power) {
    return asymptotic_breakdown(spec, power).product;
}

/// The same leading term computed along the series route instead:
/// W_0 * prod_k (2^R-1)/theta_k. Algebraically identical to
/// outage_asymptotic; kept as a second path so the identity can be tested.
inline double asymptotic_leading_with_w0(const ChannelSpec& spec, const PowerProfile& power) {
    spec.validate();
    power.validate();
    detail::check_round_count(spec, power);
    const double threshold = snr_threshold(spec);
    double prod = weight(spec, MixtureIndex::zero(spec.max_rounds));
    for (int k = 1; k <= spec.max_rounds; ++k)
        prod *= threshold / gamma_scale(spec, power, k);
    return prod;
}

/// Diversity order estimate: negated least-squares slope of ln(outage)
/// against ln(P_T). Points are (p_total_linear, outage_value) pairs.
inline double diversity_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("diversity_slope: at least 2 points required");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [p, out] : points) {
        if (!(p > 0.0) || !std::isfinite(p))
            throw std::invalid_argument("diversity_slope: powers must be positive and finite");
        if (!(out > 0.0 && out < 1.0))
            throw std::invalid_argument("diversity_slope: outage values must lie in (0, 1)");
        mean_x += std::log(p);
        mean_y += std::log(out);
    }
    mean_x /= double(points.size());
    mean_y /= double(points.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [p, out] : points) {
        const double dx = std::log(p) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(out) - mean_y);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("diversity_slope: powers must be distinct");
    return -sxy / sxx;
}

} // namespace harq
