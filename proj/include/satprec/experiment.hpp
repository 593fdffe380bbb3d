// SPDX-License-Identifier: Apache-2.0
//
// satprec: statistical-CSI distributed precoding for cooperative LEO satellites
// Copyright (C) 2026 The satprec Authors
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


#ifndef SATPREC_EXPERIMENT_HPP
#define SATPREC_EXPERIMENT_HPP

#include "satprec/channel.hpp"
#include "satprec/constellation.hpp"
#include "satprec/solvers.hpp"
#include "satprec/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace satprec {

enum class SweepAxis { PTxDbm, KappaDb, Zeta2, NumSats, NumUsers };
enum class Method { SS_M, SS_WM, MS_SepWM, MS_JoWM, MS_JoCDWM, CFP };

const char* axis_key(SweepAxis a);       // config / CSV spelling: p_tx_dbm, kappa, zeta2, S, K
const char* axis_column(SweepAxis a);    // plot column: P_TX_dBm, kappa_dB, zeta2, S, K
const char* method_name(Method m);       // SS-M, ..., CFP-from-dataset
std::optional<SweepAxis> parse_axis(const std::string& s);
std::optional<Method> parse_method(const std::string& s);
/// The five solver methods in plotting order.
const std::vector<Method>& default_methods();

struct ExperimentConfig {
    ConstellationConfig constellation;
    double epoch_s = 0.0;
    double region_radius_km = 800.0;
    int num_users = 48;
    int num_sats = 5;
    ArrayGeometry array;
    LinkBudgetConfig link;
    SolverConfig solver;
    SweepAxis axis = SweepAxis::PTxDbm;
    std::vector<double> sweep_values{20, 25, 30, 35, 40, 45, 50};
    std::vector<Method> methods = default_methods();
    int n_drops = 50;
    int n_mc_rate = 200;
    std::uint64_t seed = 1;
    bool trace = true;
    std::string cfp_dataset;

    /// Throws Error(Config) naming the offending JSON path.
    void validate() const;
    int max_users() const;
    int max_sats() const;
};

/// Parses the JSON config text; unknown keys and type errors raise Error(Config)
/// with the JSON path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_schema();
/// Canonical JSON rendering (used for digests).
std::string config_to_json(const ExperimentConfig& cfg);

/// Scenario of one drop at one sweep point: K_max users / S_max satellites are drawn
/// once per drop and subsets taken for K / S sweeps.
struct DropScenario {
    ServiceRegion region;
    std::vector<std::size_t> satellites;  // constellation indices, closest first
    std::vector<LinkGeometry> geometry;   // K_max x S_max row-major
};

DropScenario generate_drop(const ExperimentConfig& cfg, const std::vector<SatelliteState>& constellation, int drop);
ScenarioScsi scenario_at(const ExperimentConfig& cfg, const DropScenario& drop, int drop_index, double sweep_value);

struct MethodRun {
    Method method = Method::MS_JoCDWM;
    int num_users = 0;
    int iterations = 0;
    long linear_solves = 0;
    double wall_seconds = 0.0;
};

struct ResultRow {
    std::string axis;
    double value = 0.0;
    std::string method;
    int n_ok = 0;
    int n_excluded = 0;
    double r_e_mean = 0.0;
    double r_e_stderr = 0.0;
    double r_ap1_mean = 0.0;
    double r_ap2_mean = 0.0;
    double iterations_mean = 0.0;
    double linear_solves_mean = 0.0;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::vector<MethodRun> runs;
    int breakdowns = 0;
};

/// Runs every drop (in parallel over `threads`), writes results.csv, traces.csv
/// (when enabled) and complexity.txt into out_dir.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads = 1);

std::string format_results_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(const std::string& text);

/// Whitespace-separated table: header "<axis column> <method...>", one row per sweep value.
std::string plot_table(const std::vector<ResultRow>& rows, SweepAxis axis, const std::vector<Method>& methods);
/// One rate_vs_<axis>.dat per axis present in the CSV. Returns the written paths.
std::vector<std::string> emit_plot_data(const std::string& csv_path, const std::string& out_dir);

struct ComplexityEntry {
    std::string method;
    int runs = 0;
    double iterations_mean = 0.0;
    int iterations_max = 0;
    double linear_solves_mean = 0.0;
    long linear_solves_max = 0;
    double wall_seconds = 0.0;
};

struct ComplexitySummary {
    std::vector<ComplexityEntry> entries;
    bool jocdwm_within_cap = true;   // every MS-JoCDWM run used <= I_max iterations
    bool cfp_single_solve = true;    // every CFP run used exactly K solves
    std::string text;
};

ComplexitySummary report_complexity(const std::vector<MethodRun>& runs, int i_max);

/// Exports `n` samples; sample i uses drop i of the config and a P_TX drawn from
/// {20, 25, ..., 50} dBm.
void export_dataset(const ExperimentConfig& cfg, int n, const std::string& path, int threads = 1);

} // namespace satprec

#endif
