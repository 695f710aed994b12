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
#include <string>
#include <vector>

namespace harq {

/// Parameters of the exponentially time-correlated Rayleigh channel model.
/// Round k's coefficient shares a common Gaussian anchor with weight
/// rho^{k+delta-1}, so later rounds decorrelate geometrically.
struct ChannelSpec {
    int max_rounds = 1;           // K, maximum number of transmissions
    double rho = 0.0;             // time correlation, 0 <= rho < 1
    double delta = 1.0;           // feedback delay, > 0
    std::vector<double> sigma_sq; // average channel power gains, one per round
    double rate = 1.0;            // transmission rate R in bits/s/Hz

    void validate() const {
        if (max_rounds < 1)
            throw std::invalid_argument("K must satisfy K >= 1");
        if (!(rho >= 0.0 && rho < 1.0))
            throw std::invalid_argument("rho must satisfy 0 <= rho < 1");
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw std::invalid_argument("delta must satisfy delta > 0");
        if (sigma_sq.size() != std::size_t(max_rounds))
            throw std::invalid_argument("sigma_sq must have exactly K entries");
        for (double s : sigma_sq)
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::invalid_argument("sigma_sq entries must satisfy sigma_sq > 0");
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("rate must satisfy rate > 0");
    }

    static ChannelSpec make(int max_rounds, double rho, double delta,
                            std::vector<double> sigma_sq, double rate) {
        ChannelSpec spec{max_rounds, rho, delta, std::move(sigma_sq), rate};
        spec.validate();
        return spec;
    }
};

/// Per-round transmit power split: P_k = fractions[k-1] * p_total. Powers are
/// noise-normalized (unit-variance noise), i.e. SNR-scaled.
struct PowerProfile {
    double p_total = 1.0;          // P_T on a linear scale
    std::vector<double> fractions; // p_k > 0, one per round

    void validate() const {
        if (!(p_total > 0.0) || !std::isfinite(p_total))
            throw std::invalid_argument("p_total must satisfy p_total > 0");
        if (fractions.empty())
            throw std::invalid_argument("p_fractions must be nonempty");
        for (double f : fractions) {
            if (!(f > 0.0) || !std::isfinite(f))
                throw std::invalid_argument("p_fractions entries must satisfy p_k > 0");
            if (!std::isfinite(f * p_total))
                throw std::invalid_argument("per-round power p_k * p_total must be finite");
        }
    }

    static PowerProfile make(double p_total, std::vector<double> fractions) {
        PowerProfile power{p_total, std::move(fractions)};
        power.validate();
        return power;
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

namespace detail {

inline void check_round_index(const ChannelSpec& spec, int k) {
    if (k < 1 || k > spec.max_rounds)
        throw std::out_of_range("round index k must satisfy 1 <= k <= K");
}

inline void check_round_count(const ChannelSpec& spec, const PowerProfile& power) {
    if (power.fractions.size() != std::size_t(spec.max_rounds))
        throw std::invalid_argument("p_fractions must have exactly K entries");
}

} // namespace detail

/// rho^{2(k+delta-1)}: squared correlation between round k's coefficient and
/// the shared anchor. Strictly decreasing in k for 0 < rho < 1.
inline double correlation_exponent(const ChannelSpec& spec, int k) {
    detail::check_round_index(spec, k);
    return std::pow(spec.rho, 2.0 * (double(k) + spec.delta - 1.0));
}

/// P_k = p_k * P_T for round k (1-based).
inline double round_power(const ChannelSpec& spec, const PowerProfile& power, int k) {
    detail::check_round_index(spec, k);
    detail::check_round_count(spec, power);
    return power.fractions[std::size_t(k - 1)] * power.p_total;
}

/// Gamma scale of round k in the mixture representation:
/// theta_k = P_k * sigma_k^2 * (1 - rho^{2(k+delta-1)}).
inline double gamma_scale(const ChannelSpec& spec, const PowerProfile& power, int k) {
    return round_power(spec, power, k) * spec.sigma_sq[std::size_t(k - 1)] *
           (1.0 - correlation_exponent(spec, k));
}

/// s_k = rho^{2(k+delta-1)} / (1 - rho^{2(k+delta-1)}), the per-round
/// correlation load entering the mixture weights.
inline double correlation_load(const ChannelSpec& spec, int k) {
    const double e = correlation_exponent(spec, k);
    return e / (1.0 - e);
}

/// S = sum_k s_k. Finite for rho < 1.
inline double total_correlation_load(const ChannelSpec& spec) {
    double total = 0.0;
    for (int k = 1; k <= spec.max_rounds; ++k)
        total += correlation_load(spec, k);
    return total;
}

/// q = S / (1 + S), the geometric ratio governing the truncation tail.
inline double truncation_ratio(const ChannelSpec& spec) {
    const double total = total_correlation_load(spec);
    return total / (1.0 + total);
}

/// Per-round outage threshold 2^R - 1.
inline double snr_threshold(const ChannelSpec& spec) {
    return std::exp2(spec.rate) - 1.0;
}

} // namespace harq
