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
#include <vector>

#include "harq/channel.hpp"
#include "harq/series.hpp"
#include "harq/special_functions.hpp"

namespace harq {

/// Nodes and weights of the n-point Gauss-Laguerre rule for
/// int_0^inf e^{-t} f(t) dt ~= sum_i w_i f(x_i).
struct GaussLaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on the Laguerre recurrence, with the classical initial
/// guesses. Reliable in double precision for n up to a few hundred.
inline GaussLaguerreRule gauss_laguerre(int n) {
    if (n < 1)
        throw std::invalid_argument("gauss_laguerre: n must be >= 1");
    GaussLaguerreRule rule;
    rule.nodes.resize(std::size_t(n));
    rule.weights.resize(std::size_t(n));

    // Laguerre L_n and L_{n-1} at z.
    auto eval = [n](double z) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((double(2 * j - 1) - z) * p2 - double(j - 1) * p3) / double(j);
        }
        return std::pair<double, double>(p1, p2);
    };

    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * double(n));
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * double(n));
        } else {
            const double ai = double(i - 1);
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[std::size_t(i - 2)]);
        }
        double p1 = 0.0, p2 = 0.0, derivative = 0.0;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            const auto [v1, v2] = eval(z);
            p1 = v1;
            p2 = v2;
            derivative = double(n) * (p1 - p2) / z;
            const double z_prev = z;
            z = z_prev - p1 / derivative;
            if (std::abs(z - z_prev) <= 1e-14 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw std::runtime_error("gauss_laguerre: Newton iteration did not converge");
        const auto [v1, v2] = eval(z);
        derivative = double(n) * (v1 - v2) / z;
        rule.nodes[std::size_t(i)] = z;
        rule.weights[std::size_t(i)] = -1.0 / (derivative * double(n) * v2);
    }
    return rule;
}

/// Independent outage evaluation through the mixing-variable representation:
/// conditioned on the anchor power t ~ Exp(1), the per-round SNRs are
/// independent Rician powers, so
///   P_out = int_0^inf e^{-t} prod_k [1 - Q1(sqrt(2 s_k t), sqrt(2 z/theta_k))] dt,
/// evaluated by Gauss-Laguerre. Intended as a cross-check for K <= 4.
inline double outage_quadrature_oracle(const ChannelSpec& spec, const PowerProfile& power,
                                       int nodes = 64) {
    spec.validate();
    power.validate();
    detail::check_round_count(spec, power);
    if (nodes < 8)
        throw std::invalid_argument("outage_quadrature_oracle: nodes must be >= 8");

    const double threshold = snr_threshold(spec);
    const int rounds = spec.max_rounds;
    std::vector<double> two_load(std::size_t(rounds), 0.0);  // 2 s_k
    std::vector<double> below_arg(std::size_t(rounds), 0.0); // sqrt(2 z / theta_k)
    for (int k = 1; k <= rounds; ++k) {
        two_load[std::size_t(k - 1)] = 2.0 * correlation_load(spec, k);
        below_arg[std::size_t(k - 1)] = std::sqrt(2.0 * threshold / gamma_scale(spec, power, k));
    }

    const GaussLaguerreRule rule = gauss_laguerre(nodes);
    detail::KahanSum integral;
    for (int i = 0; i < nodes; ++i) {
        const double t = rule.nodes[std::size_t(i)];
        double prod = 1.0;
        for (int k = 0; k < rounds; ++k)
            prod *= 1.0 - marcum_q1(std::sqrt(two_load[std::size_t(k)] * t),
                                    below_arg[std::size_t(k)]);
        integral.add(rule.weights[std::size_t(i)] * prod);
    }
    return integral.sum;
}

} // namespace harq
