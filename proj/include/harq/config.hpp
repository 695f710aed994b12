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

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "harq/channel.hpp"
#include "harq/monte_carlo.hpp"
#include "harq/series.hpp"

namespace harq {

/// Which config sections a subcommand needs. Channel commands require
/// {K, rho, rate}; studies add their own lists.
struct ConfigNeeds {
    bool channel = true;     // K / rho / delta / sigma_sq / rate / p_fractions
    bool point = false;      // p_total_db
    bool grid = false;       // db_grid
    bool n_list = false;     // truncation study
    bool ell_study = false;  // k_list + rho_grid
};

struct RunConfig {
    ChannelSpec spec;
    std::vector<double> fractions;
    std::optional<double> p_total_db;
    std::vector<double> db_grid;
    double eps = 1e-9;
    std::optional<MCConfig> mc;
    std::vector<int> n_list;
    std::vector<int> k_list;
    std::vector<double> rho_grid;
    double ell_delta = 1.0;
    std::uint64_t term_cap = default_term_cap;

    PowerProfile power_at_db(double db) const {
        return PowerProfile::make(db_to_linear(db), fractions);
    }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string("missing required config field '") + key + "'");
    if (!j[key].is_number())
        throw std::invalid_argument(std::string("config field '") + key + "' must be a number");
    return j[key].get<double>();
}

inline double number_or(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number())
        throw std::invalid_argument(std::string("config field '") + key + "' must be a number");
    return j[key].get<double>();
}

inline std::int64_t to_integer(double v, const char* what, double lo, double hi) {
    if (!std::isfinite(v) || v != std::floor(v) || v < lo || v > hi)
        throw std::invalid_argument(std::string("config field '") + what +
                                    "' must be an integer between " + std::to_string(long(lo)) +
                                    " and " + std::to_string(double(hi)));
    return std::int64_t(v);
}

inline std::vector<double> number_array(const nlohmann::json& j, const char* key) {
    if (!j[key].is_array())
        throw std::invalid_argument(std::string("config field '") + key +
                                    "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw std::invalid_argument(std::string("config field '") + key +
                                        "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j, const ConfigNeeds& needs) {
    if (!j.is_object())
        throw std::invalid_argument("config must be a JSON object");
    RunConfig cfg;

    if (needs.channel) {
        const int k = int(detail::to_integer(detail::require_number(j, "K"), "K", 0.0, 1e6));
        const double rho = detail::require_number(j, "rho");
        const double delta = detail::number_or(j, "delta", 1.0);
        const double rate = detail::require_number(j, "rate");
        std::vector<double> sigma_sq(std::size_t(std::max(k, 1)), 1.0);
        if (j.contains("sigma_sq"))
            sigma_sq = detail::number_array(j, "sigma_sq");
        cfg.spec = ChannelSpec::make(k, rho, delta, std::move(sigma_sq), rate);

        cfg.fractions.assign(std::size_t(k), 1.0);
        if (j.contains("p_fractions"))
            cfg.fractions = detail::number_array(j, "p_fractions");
        PowerProfile::make(1.0, cfg.fractions);
        if (cfg.fractions.size() != std::size_t(k))
            throw std::invalid_argument("p_fractions must have exactly K entries");
    }

    cfg.eps = detail::number_or(j, "eps", 1e-9);
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
        throw std::invalid_argument("eps must satisfy 0 < eps < 1");

    if (j.contains("p_total_db"))
        cfg.p_total_db = detail::require_number(j, "p_total_db");
    if (needs.point && !cfg.p_total_db)
        throw std::invalid_argument("missing required config field 'p_total_db'");

    if (j.contains("db_grid"))
        cfg.db_grid = detail::number_array(j, "db_grid");
    if (needs.grid) {
        if (cfg.db_grid.empty())
            throw std::invalid_argument("db_grid must be nonempty");
        if (!std::is_sorted(cfg.db_grid.begin(), cfg.db_grid.end()))
            throw std::invalid_argument("db_grid must be ascending");
    }

    if (j.contains("mc")) {
        const auto& m = j["mc"];
        if (!m.is_object())
            throw std::invalid_argument("config field 'mc' must be an object");
        MCConfig mc;
        mc.samples = std::uint64_t(
            detail::to_integer(detail::number_or(m, "samples", 1e6), "mc.samples", 1.0, 1e15));
        mc.seed = std::uint64_t(
            detail::to_integer(detail::number_or(m, "seed", 1), "mc.seed", 0.0, 9.0e18));
        mc.streams =
            int(detail::to_integer(detail::number_or(m, "streams", 1), "mc.streams", 0.0, 1e6));
        mc.validate();
        cfg.mc = mc;
    }

    if (j.contains("n_list")) {
        for (double v : detail::number_array(j, "n_list"))
            cfg.n_list.push_back(int(detail::to_integer(v, "n_list", 0.0, 1e6)));
        std::sort(cfg.n_list.begin(), cfg.n_list.end());
    }
    if (needs.n_list && cfg.n_list.empty())
        throw std::invalid_argument("n_list must be nonempty");

    if (needs.ell_study) {
        if (!j.contains("k_list"))
            throw std::invalid_argument("missing required config field 'k_list'");
        for (double v : detail::number_array(j, "k_list"))
            cfg.k_list.push_back(int(detail::to_integer(v, "k_list", 1.0, 1e6)));
        std::sort(cfg.k_list.begin(), cfg.k_list.end());
        if (!j.contains("rho_grid"))
            throw std::invalid_argument("missing required config field 'rho_grid'");
        cfg.rho_grid = detail::number_array(j, "rho_grid");
        for (double r : cfg.rho_grid)
            if (!(r >= 0.0 && r < 1.0))
                throw std::invalid_argument("rho_grid values must satisfy 0 <= rho < 1");
        std::sort(cfg.rho_grid.begin(), cfg.rho_grid.end());
        cfg.ell_delta = detail::number_or(j, "delta", 1.0);
        if (!(cfg.ell_delta > 0.0))
            throw std::invalid_argument("delta must satisfy delta > 0");
    }

    return cfg;
}

inline RunConfig load_run_config(const std::string& path, const ConfigNeeds& needs) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j, needs);
}

} // namespace harq
