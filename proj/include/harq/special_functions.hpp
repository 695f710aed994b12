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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace harq {

/// ln(n!) with relative error <= 1e-14 for n up to 1e6. Small arguments are
/// served from a table; larger ones go through lgamma.
inline double log_factorial(std::int64_t n) {
    if (n < 0)
        throw std::invalid_argument("log_factorial: n must be >= 0");
    static constexpr int table_size = 256;
    static const std::array<double, table_size> table = [] {
        std::array<double, table_size> t{};
        for (int i = 0; i < table_size; ++i)
            t[std::size_t(i)] = std::lgamma(double(i) + 1.0);
        return t;
    }();
    if (n < table_size)
        return table[std::size_t(n)];
    return std::lgamma(double(n) + 1.0);
}

namespace detail {

/// ln of the Poisson(mu) pmf at m, mu > 0.
inline double poisson_log_pmf(std::int64_t m, double mu) {
    return double(m) * std::log(mu) - mu - log_factorial(m);
}

/// exp(lp), or 0 when the result would be subnormal. Subnormals carry almost
/// no significand, and seeding an upward pmf recurrence with one turns into a
/// constant relative error across the whole sum; the mass given up here is
/// below 1e-300 and is treated as zero by every caller.
inline double exp_or_zero(double lp) { return lp > -708.0 ? std::exp(lp) : 0.0; }

/// Pr{Poisson(mu) <= m}, robust for large means: the sum restarts at the
/// left tail edge (skipped mass < 1e-280) and re-seeds from logs whenever the
/// running pmf is still flushed to zero left of the mode.
inline double poisson_cdf(std::int64_t m, double mu) {
    if (m < 0)
        return 0.0;
    if (mu <= 0.0)
        return 1.0;
    std::int64_t start = 0;
    if (mu > 700.0) {
        const double sd = std::sqrt(mu);
        if (double(m) > mu + 40.0 * sd)
            return 1.0;
        start = std::int64_t(mu - 36.0 * sd);
        if (start < 0)
            start = 0;
        if (m < start)
            return 0.0;
    }
    double pmf = start == 0 ? exp_or_zero(-mu) : exp_or_zero(poisson_log_pmf(start, mu));
    double cdf = pmf;
    for (std::int64_t j = start + 1; j <= m; ++j) {
        pmf *= mu / double(j);
        if (pmf == 0.0 && double(j) < mu)
            pmf = exp_or_zero(poisson_log_pmf(j, mu));
        cdf += pmf;
    }
    return cdf < 1.0 ? cdf : 1.0;
}

} // namespace detail

/// Regularized lower incomplete gamma function P(a, x) for integer shape
/// a >= 1. Below x = a+1 the ascending series keeps full relative accuracy
/// where the distribution tail lives; above it the complement
/// 1 - e^{-x} sum_{m<a} x^m/m! (a Poisson CDF) avoids slow convergence.
inline double regularized_lower_gamma(std::int64_t a, double x) {
    if (a <= 0)
        throw std::invalid_argument("regularized_lower_gamma: a must be a positive integer");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::invalid_argument("regularized_lower_gamma: x must be >= 0 and finite");
    if (x == 0.0)
        return 0.0;
    const double ad = double(a);
    if (x < ad + 1.0) {
        double term = 1.0 / ad;
        double sum = term;
        for (int m = 1; m < 10000; ++m) {
            term *= x / (ad + double(m));
            sum += term;
            if (term < sum * 1e-17)
                break;
        }
        const double lp = ad * std::log(x) - x - log_factorial(a - 1) + std::log(sum);
        const double p = std::exp(lp);
        return p < 1.0 ? p : 1.0;
    }
    return 1.0 - detail::poisson_cdf(a - 1, x);
}

/// First-order Marcum Q function Q1(a, b), evaluated as a Poisson mixture of
/// Poisson CDFs:
///   Q1(a,b) = sum_m e^{-a^2/2} (a^2/2)^m / m! * Pr{Poisson(b^2/2) <= m}.
/// Used only by the quadrature cross-check, so the term loop favors clarity:
/// capped at 1e4 terms with early exit once terms drop below 1e-16 past the
/// mixing mode. For a^2/2 beyond the exp underflow threshold the sum starts
/// at the left tail edge of the mixing distribution.
inline double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("marcum_q1: a and b must be >= 0 and finite");
    if (b == 0.0)
        return 1.0;
    const double lam = 0.5 * a * a; // mixing mean
    const double mu = 0.5 * b * b;
    if (lam == 0.0)
        return std::exp(-mu);

    constexpr int max_terms = 10000;
    std::int64_t m = 0;
    if (lam > 700.0) {
        // skip the far left tail of the mixing distribution (mass < e^{-450})
        m = std::int64_t(lam - 30.0 * std::sqrt(lam));
        if (m < 0)
            m = 0;
    }
    double mix_pmf = detail::exp_or_zero(detail::poisson_log_pmf(m, lam));
    double body_pmf = detail::exp_or_zero(detail::poisson_log_pmf(m, mu));
    double body_cdf = m == 0 ? body_pmf : detail::poisson_cdf(m, mu);

    double sum = 0.0;
    for (int it = 0; it < max_terms; ++it) {
        const double term = mix_pmf * body_cdf;
        sum += term;
        // Sound once past the mixing mode with negligible terms: either the
        // mixing pmf itself has decayed, or the body CDF is past its mode so
        // the remaining tail is bounded by the mixing tail alone.
        if (double(m) > lam && term < 1e-16 && (mix_pmf < 1e-16 || double(m) > mu))
            break;
        ++m;
        // advance both pmfs; re-seed from logs while still flushed to zero
        // left of the mode, so underflow cannot poison the recurrences
        mix_pmf *= lam / double(m);
        if (mix_pmf == 0.0 && double(m) < lam)
            mix_pmf = detail::exp_or_zero(detail::poisson_log_pmf(m, lam));
        body_pmf *= mu / double(m);
        if (body_pmf == 0.0 && double(m) < mu)
            body_pmf = detail::exp_or_zero(detail::poisson_log_pmf(m, mu));
        body_cdf += body_pmf;
        if (body_cdf > 1.0)
            body_cdf = 1.0;
    }
    return sum < 1.0 ? sum : 1.0;
}

} // namespace harq
