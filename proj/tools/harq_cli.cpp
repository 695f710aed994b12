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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "harq/asymptotics.hpp"
#include "harq/config.hpp"
#include "harq/monte_carlo.hpp"
#include "harq/series.hpp"
#include "harq/sweep.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_resource_error = 3;

struct CommonOptions {
    std::string config_path;
    std::string out_path;     // empty -> stdout
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file")->required();
    cmd->add_option("--out", opt.out_path, "output file (default: stdout)");
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opt.seed, "override mc.seed");
}

std::uint64_t term_cap_from_env() {
    const char* raw = std::getenv("HARQ_TERM_CAP");
    if (!raw)
        return harq::default_term_cap;
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || cap == 0)
        throw std::invalid_argument("HARQ_TERM_CAP must be a positive integer");
    return cap;
}

harq::RunConfig load_config(const CommonOptions& opt, const harq::ConfigNeeds& needs,
                            bool ensure_mc = false) {
    harq::RunConfig cfg = harq::load_run_config(opt.config_path, needs);
    cfg.term_cap = term_cap_from_env();
    if (ensure_mc && !cfg.mc)
        cfg.mc = harq::MCConfig{};
    // --seed reseeds configured simulation; it does not switch MC on
    if (opt.seed && cfg.mc)
        cfg.mc->seed = *opt.seed;
    return cfg;
}

void emit(const CommonOptions& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file '" + opt.out_path + "'");
    out << text;
}

int cmd_outage(const CommonOptions& opt) {
    const harq::RunConfig cfg = load_config(opt, {.channel = true, .point = true});
    const harq::SweepRow row = harq::evaluate_point(cfg, *cfg.p_total_db, 0);
    std::ostringstream os;
    if (opt.format == "json") {
        os << harq::sweep_row_json(row).dump(2) << "\n";
    } else {
        harq::write_sweep_csv(os, cfg, {row});
    }
    emit(opt, os.str());
    return exit_ok;
}

int cmd_sweep(const CommonOptions& opt) {
    const harq::RunConfig cfg = load_config(opt, {.channel = true, .grid = true});
    const std::vector<harq::SweepRow> rows = harq::run_sweep(cfg);
    std::ostringstream os;
    if (opt.format == "json")
        harq::write_sweep_json(os, rows);
    else
        harq::write_sweep_csv(os, cfg, rows);
    emit(opt, os.str());
    return exit_ok;
}

int cmd_truncation_study(const CommonOptions& opt) {
    const harq::RunConfig cfg = load_config(opt, {.channel = true, .point = true, .n_list = true});
    const std::vector<harq::TruncationRow> rows = harq::run_truncation_study(cfg);
    std::ostringstream os;
    if (opt.format == "json")
        harq::write_truncation_json(os, rows);
    else
        harq::write_truncation_csv(os, cfg, rows);
    emit(opt, os.str());
    return exit_ok;
}

int cmd_ell_study(const CommonOptions& opt) {
    const harq::RunConfig cfg = load_config(opt, {.channel = false, .ell_study = true});
    const std::vector<harq::EllRow> rows = harq::run_ell_study(cfg);
    std::ostringstream os;
    if (opt.format == "json")
        harq::write_ell_json(os, rows);
    else
        harq::write_ell_csv(os, cfg, rows);
    emit(opt, os.str());
    return exit_ok;
}

int cmd_diversity(const CommonOptions& opt) {
    const harq::RunConfig cfg = load_config(opt, {.channel = true, .grid = true});
    const harq::DiversityReport report = harq::run_diversity(cfg);
    std::ostringstream os;
    if (opt.format == "json") {
        os << nlohmann::json{{"slope", report.slope},
                             {"target_k", report.target},
                             {"db_min", report.db_min},
                             {"db_max", report.db_max},
                             {"points", report.points}}
                  .dump(2)
           << "\n";
    } else {
        os << "slope,target_k,db_min,db_max,points\n"
           << harq::format_sci(report.slope) << ',' << report.target << ','
           << harq::format_sci(report.db_min) << ',' << harq::format_sci(report.db_max) << ','
           << report.points << "\n";
    }
    emit(opt, os.str());
    return exit_ok;
}

int cmd_mc(const CommonOptions& opt) {
    harq::RunConfig cfg = load_config(opt, {.channel = true, .point = true}, true);
    const harq::PowerProfile power = cfg.power_at_db(*cfg.p_total_db);
    const harq::MCEstimate est = harq::estimate_outage(cfg.spec, power, *cfg.mc);
    std::ostringstream os;
    if (opt.format == "json") {
        os << nlohmann::json{{"p_total_db", *cfg.p_total_db},
                             {"mc_p_hat", est.p_hat},
                             {"mc_stderr", est.std_error},
                             {"samples", est.samples},
                             {"failures", est.failures},
                             {"rare_event", est.rare_event()}}
                  .dump(2)
           << "\n";
    } else {
        os << "p_total_db,mc_p_hat,mc_stderr,samples,failures,rare_event\n"
           << harq::format_sci(*cfg.p_total_db) << ',' << harq::format_sci(est.p_hat) << ','
           << harq::format_sci(est.std_error) << ',' << est.samples << ',' << est.failures << ','
           << (est.rare_event() ? 1 : 0) << "\n";
    }
    if (est.rare_event())
        std::cerr << "note: rare-event regime, estimate unreliable "
                     "(fewer than 100 expected failures); prefer the series value\n";
    emit(opt, os.str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type I HARQ outage analysis over time-correlated Rayleigh fading"};
    app.require_subcommand(1);

    CommonOptions outage_opt, sweep_opt, trunc_opt, ell_opt, div_opt, mc_opt;
    CLI::App* outage = app.add_subcommand("outage", "single-point outage report");
    add_common_options(outage, outage_opt);
    CLI::App* sweep = app.add_subcommand("sweep", "outage versus transmit power grid");
    add_common_options(sweep, sweep_opt);
    CLI::App* trunc = app.add_subcommand("truncation-study", "truncated value versus order N");
    add_common_options(trunc, trunc_opt);
    CLI::App* ell = app.add_subcommand("ell-study", "correlation penalty over (K, rho)");
    add_common_options(ell, ell_opt);
    CLI::App* diversity = app.add_subcommand("diversity", "log-log diversity slope estimate");
    add_common_options(diversity, div_opt);
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo estimate at a single point");
    add_common_options(mc, mc_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (outage->parsed())
            return cmd_outage(outage_opt);
        if (sweep->parsed())
            return cmd_sweep(sweep_opt);
        if (trunc->parsed())
            return cmd_truncation_study(trunc_opt);
        if (ell->parsed())
            return cmd_ell_study(ell_opt);
        if (diversity->parsed())
            return cmd_diversity(div_opt);
        if (mc->parsed())
            return cmd_mc(mc_opt);
    } catch (const harq::resource_limit_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return exit_resource_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_ok;
}
