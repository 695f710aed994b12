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
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "harq/asymptotics.hpp"
#include "harq/config.hpp"
#include "harq/monte_carlo.hpp"
#include "harq/quadrature.hpp"
#include "harq/series.hpp"

namespace harq {

/// One sweep grid point. MC columns stay empty when simulation is disabled.
struct SweepRow {
    double p_total_db = 0.0;
    double outage_series = 0.0;
    double bound = 0.0;
    int n_used = 0;
    double outage_asymptotic = 0.0;
    std::optional<double> mc_p_hat;
    std::optional<double> mc_stderr;
};

struct TruncationRow {
    int order = 0;
    double value = 0.0;
    double bound = 0.0;
    double error_vs_reference = 0.0;
};

struct EllRow {
    double rho = 0.0;
    int rounds = 0;
    double ell_value = 0.0;
};

struct DiversityReport {
    double slope = 0.0;
    int target = 0;
    double db_min = 0.0;
    double db_max = 0.0;
    int points = 0;
};

namespace detail {

// The configured eps is an absolute tail target. Deep in the high-SNR tail
// that would swamp the value itself, so the per-point target is tightened to
// a small fraction of the asymptotic scale. The reported bound is always
// q^{N+1} for the N actually used, so the certificate stays valid.
inline double effective_eps(const RunConfig& cfg, double asymptotic_value) {
    double eps = cfg.eps;
    const double relative = 1e-6 * asymptotic_value;
    if (relative > 0.0 && relative < eps)
        eps = std::max(relative, 1e-300);
    return eps;
}

} // namespace detail

/// Evaluates one grid point: certified series value, asymptotic value, and
/// optionally an MC estimate (seed shifted by the row index so rows are
/// independent but reruns are identical).
inline SweepRow evaluate_point(const RunConfig& cfg, double db, std::uint64_t row_index = 0) {
    SweepRow row;
    row.p_total_db = db;
    const PowerProfile power = cfg.power_at_db(db);
    row.outage_asymptotic = outage_asymptotic(cfg.spec, power);
    const int order = choose_truncation(cfg.spec, detail::effective_eps(cfg, row.outage_asymptotic));
    const TruncatedOutage trunc = outage_truncated(cfg.spec, power, order, cfg.term_cap);
    row.outage_series = trunc.value;
    row.bound = trunc.bound;
    row.n_used = trunc.order;
    if (cfg.mc) {
        MCConfig mc = *cfg.mc;
        mc.seed += row_index;
        const MCEstimate est = estimate_outage(cfg.spec, power, mc);
        row.mc_p_hat = est.p_hat;
        row.mc_stderr = est.std_error;
    }
    return row;
}

inline std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
    std::vector<SweepRow> rows;
    rows.reserve(cfg.db_grid.size());
    for (std::size_t i = 0; i < cfg.db_grid.size(); ++i)
        rows.push_back(evaluate_point(cfg, cfg.db_grid[i], i));
    return rows;
}

/// Truncation study at the configured p_total_db. The reference value is the
/// partial sum at max(n_list) + 20; the error column is the extra mass in
/// layers N+1 .. N_ref, which is nonnegative by construction.
inline std::vector<TruncationRow> run_truncation_study(const RunConfig& cfg) {
    const PowerProfile power = cfg.power_at_db(*cfg.p_total_db);
    const int max_order = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
    const int reference_order = max_order + 20;
    const std::vector<double> layers =
        outage_layer_contributions(cfg.spec, power, reference_order, cfg.term_cap);
    const double q = truncation_ratio(cfg.spec);

    std::vector<TruncationRow> rows;
    rows.reserve(cfg.n_list.size());
    for (int order : cfg.n_list) {
        detail::KahanSum value, tail;
        for (int t = 0; t <= reference_order; ++t)
            (t <= order ? value : tail).add(layers[std::size_t(t)]);
        rows.push_back({order, value.sum, std::pow(q, double(order + 1)), tail.sum});
    }
    return rows;
}

/// Correlation-penalty table over (K, rho), rows sorted by (K, rho).
inline std::vector<EllRow> run_ell_study(const RunConfig& cfg) {
    std::vector<EllRow> rows;
    rows.reserve(cfg.k_list.size() * cfg.rho_grid.size());
    for (int k : cfg.k_list)
        for (double rho : cfg.rho_grid) {
            const ChannelSpec spec = ChannelSpec::make(
                k, rho, cfg.ell_delta, std::vector<double>(std::size_t(k), 1.0), 1.0);
            rows.push_back({rho, k, ell(spec)});
        }
    return rows;
}

inline DiversityReport run_diversity(const RunConfig& cfg) {
    if (cfg.db_grid.size() < 3)
        throw std::invalid_argument("diversity requires a db_grid of at least 3 points");
    std::vector<std::pair<double, double>> points;
    points.reserve(cfg.db_grid.size());
    for (std::size_t i = 0; i < cfg.db_grid.size(); ++i) {
        const SweepRow row = evaluate_point(cfg, cfg.db_grid[i], i);
        points.emplace_back(db_to_linear(row.p_total_db), row.outage_series);
    }
    DiversityReport report;
    report.slope = diversity_slope(points);
    report.target = cfg.spec.max_rounds;
    report.db_min = cfg.db_grid.front();
    report.db_max = cfg.db_grid.back();
    report.points = int(cfg.db_grid.size());
    return report;
}

// ---------- serialization ----------

/// Scientific notation with 17 significant digits: lossless double
/// round-trips and byte-stable output.
inline std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string format_compact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_config_comment(std::ostream& os, const RunConfig& cfg) {
    os << "# K=" << cfg.spec.max_rounds << " rho=" << format_compact(cfg.spec.rho)
       << " delta=" << format_compact(cfg.spec.delta)
       << " rate=" << format_compact(cfg.spec.rate) << " eps=" << format_compact(cfg.eps);
    if (cfg.mc)
        os << " mc_samples=" << cfg.mc->samples << " mc_seed=" << cfg.mc->seed
           << " mc_streams=" << cfg.mc->streams;
    os << "\n";
}

inline const char* sweep_csv_header() {
    return "p_total_db,outage_series,bound,n_used,outage_asymptotic,mc_p_hat,mc_stderr";
}

inline void write_sweep_csv(std::ostream& os, const RunConfig& cfg,
                            const std::vector<SweepRow>& rows) {
    write_config_comment(os, cfg);
    os << "# exact series outage lies in [outage_series, outage_series + bound]\n";
    os << sweep_csv_header() << "\n";
    for (const SweepRow& r : rows) {
        os << format_sci(r.p_total_db) << ',' << format_sci(r.outage_series) << ','
           << format_sci(r.bound) << ',' << r.n_used << ',' << format_sci(r.outage_asymptotic)
           << ',';
        if (r.mc_p_hat)
            os << format_sci(*r.mc_p_hat);
        os << ',';
        if (r.mc_stderr)
            os << format_sci(*r.mc_stderr);
        os << "\n";
    }
}

inline nlohmann::json sweep_row_json(const SweepRow& r) {
    nlohmann::json j{{"p_total_db", r.p_total_db},
                     {"outage_series", r.outage_series},
                     {"bound", r.bound},
                     {"n_used", r.n_used},
                     {"outage_asymptotic", r.outage_asymptotic}};
    j["mc_p_hat"] = r.mc_p_hat ? nlohmann::json(*r.mc_p_hat) : nlohmann::json();
    j["mc_stderr"] = r.mc_stderr ? nlohmann::json(*r.mc_stderr) : nlohmann::json();
    return j;
}

inline void write_sweep_json(std::ostream& os, const std::vector<SweepRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const SweepRow& r : rows)
        out.push_back(sweep_row_json(r));
    os << out.dump(2) << "\n";
}

inline void write_truncation_csv(std::ostream& os, const RunConfig& cfg,
                                 const std::vector<TruncationRow>& rows) {
    write_config_comment(os, cfg);
    os << "# reference value is the partial sum at max(n_list)+20\n";
    os << "n,value,bound,error_vs_reference\n";
    for (const TruncationRow& r : rows)
        os << r.order << ',' << format_sci(r.value) << ',' << format_sci(r.bound) << ','
           << format_sci(r.error_vs_reference) << "\n";
}

inline void write_truncation_json(std::ostream& os, const std::vector<TruncationRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const TruncationRow& r : rows)
        out.push_back({{"n", r.order},
                       {"value", r.value},
                       {"bound", r.bound},
                       {"error_vs_reference", r.error_vs_reference}});
    os << out.dump(2) << "\n";
}

inline void write_ell_csv(std::ostream& os, const RunConfig& cfg,
                          const std::vector<EllRow>& rows) {
    os << "# delta=" << format_compact(cfg.ell_delta) << "\n";
    os << "rho,k,ell\n";
    for (const EllRow& r : rows)
        os << format_sci(r.rho) << ',' << r.rounds << ',' << format_sci(r.ell_value) << "\n";
}

inline void write_ell_json(std::ostream& os, const std::vector<EllRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const EllRow& r : rows)
        out.push_back({{"rho", r.rho}, {"k", r.rounds}, {"ell", r.ell_value}});
    os << out.dump(2) << "\n";
}

} // namespace harq
