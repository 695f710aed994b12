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
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "harq/channel.hpp"

namespace harq {

struct MCConfig {
    std::uint64_t samples = 1'000'000; // independent HARQ episodes
    std::uint64_t seed = 1;
    int streams = 1; // parallel substreams with derived seeds

    void validate() const {
        if (samples < 1)
            throw std::invalid_argument("mc.samples must satisfy samples >= 1");
        if (streams < 1)
            throw std::invalid_argument("mc.streams must satisfy streams >= 1");
    }
};

struct MCEstimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t failures = 0;

    // Below ~100 expected failures the normal-approximation interval is not
    // trustworthy; callers should fall back to the series for such points.
    bool rare_event() const { return p_hat * double(samples) < 100.0; }
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed derivation (seed, stream) -> engine seed, so substreams are
/// decorrelated and independent of thread scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    return splitmix64(state);
}

/// Deterministic per-stream generator: mt19937_64 with a hand-rolled
/// Box-Muller transform, so the draw sequence does not depend on the
/// standard library's normal_distribution implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(derive_stream_seed(seed, stream)) {}

    double uniform01() { // (0, 1]
        return double((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform01()));
        const double angle = 6.283185307179586476925286766559 * uniform01();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly-symmetric complex Gaussian with unit total variance.
    std::complex<double> complex_normal() {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        const double re = normal() * inv_sqrt2;
        const double im = normal() * inv_sqrt2;
        return {re, im};
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draws channel realizations of the anchored model
///   h_k = rho^{k+delta-1} sigma_k h_0 + sqrt(1 - rho^{2(k+delta-1)}) sigma_k w_k
/// with h_0, w_1..w_K iid CN(0,1). Draw order is fixed (h_0 first, then the
/// per-round innovations) so results are bit-reproducible for a given seed.
class ChannelSampler {
  public:
    ChannelSampler(const ChannelSpec& spec, const PowerProfile& power) {
        spec.validate();
        power.validate();
        detail::check_round_count(spec, power);
        const int rounds = spec.max_rounds;
        anchor_.resize(std::size_t(rounds));
        diffuse_.resize(std::size_t(rounds));
        power_.resize(std::size_t(rounds));
        for (int k = 1; k <= rounds; ++k) {
            const double sigma = std::sqrt(spec.sigma_sq[std::size_t(k - 1)]);
            const double corr = std::pow(spec.rho, double(k) + spec.delta - 1.0);
            anchor_[std::size_t(k - 1)] = corr * sigma;
            diffuse_[std::size_t(k - 1)] = std::sqrt(1.0 - corr * corr) * sigma;
            power_[std::size_t(k - 1)] = round_power(spec, power, k);
        }
    }

    int rounds() const { return int(power_.size()); }

    void draw_channel(Rng& rng, std::span<std::complex<double>> h) const {
        const std::complex<double> h0 = rng.complex_normal();
        for (std::size_t k = 0; k < power_.size(); ++k)
            h[k] = anchor_[k] * h0 + diffuse_[k] * rng.complex_normal();
    }

    void draw_snrs(Rng& rng, std::span<double> snr) const {
        const std::complex<double> h0 = rng.complex_normal();
        for (std::size_t k = 0; k < power_.size(); ++k) {
            const std::complex<double> hk = anchor_[k] * h0 + diffuse_[k] * rng.complex_normal();
            snr[k] = power_[k] * std::norm(hk);
        }
    }

    /// One episode; true when every round's SNR falls below the threshold.
    /// Always consumes the full episode's draws, early round failures or not.
    bool draw_outage(Rng& rng, double threshold) const {
        const std::complex<double> h0 = rng.complex_normal();
        bool all_below = true;
        for (std::size_t k = 0; k < power_.size(); ++k) {
            const std::complex<double> hk = anchor_[k] * h0 + diffuse_[k] * rng.complex_normal();
            all_below = all_below && (power_[k] * std::norm(hk) < threshold);
        }
        return all_below;
    }

  private:
    std::vector<double> anchor_;  // rho^{k+delta-1} sigma_k
    std::vector<double> diffuse_; // sqrt(1 - rho^{2(k+delta-1)}) sigma_k
    std::vector<double> power_;   // P_k
};

/// One HARQ episode's per-round SNRs.
inline std::vector<double> sample_episode(const ChannelSpec& spec, const PowerProfile& power,
                                          Rng& rng) {
    ChannelSampler sampler(spec, power);
    std::vector<double> snr(std::size_t(spec.max_rounds));
    sampler.draw_snrs(rng, snr);
    return snr;
}

/// Empirical outage probability with a binomial standard error. The result
/// is a pure function of (spec, power, mc): substreams own their derived
/// seeds and counts merge in stream order, so reruns are bit-identical
/// regardless of thread scheduling.
inline MCEstimate estimate_outage(const ChannelSpec& spec, const PowerProfile& power,
                                  const MCConfig& mc) {
    mc.validate();
    const ChannelSampler sampler(spec, power);
    const double threshold = snr_threshold(spec);

    const std::uint64_t streams = std::uint64_t(mc.streams);
    const std::uint64_t base = mc.samples / streams;
    const std::uint64_t remainder = mc.samples % streams;
    std::vector<std::uint64_t> counts(streams, 0);

    auto worker = [&](std::uint64_t stream) {
        const std::uint64_t quota = base + (stream < remainder ? 1 : 0);
        Rng rng(mc.seed, stream);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < quota; ++i)
            hits += sampler.draw_outage(rng, threshold) ? 1 : 0;
        counts[stream] = hits;
    };

    if (streams == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(streams);
        for (std::uint64_t s = 0; s < streams; ++s)
            pool.emplace_back(worker, s);
        for (auto& t : pool)
            t.join();
    }

    MCEstimate est;
    est.samples = mc.samples;
    for (std::uint64_t c : counts)
        est.failures += c;
    est.p_hat = double(est.failures) / double(mc.samples);
    est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / double(mc.samples));
    return est;
}

} // namespace harq
