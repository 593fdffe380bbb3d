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


#include "satprec/experiment.hpp"

#include "satprec/dataset.hpp"
#include "satprec/rates.hpp"
#include "satprec/te_utils.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace satprec {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Runs body(i) for i in [0, n) on `threads` workers; the first exception is rethrown.
template <class F> void parallel_for(int n, int threads, F&& body) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed on " + p.string());
}

std::uint64_t drop_seed(const ExperimentConfig& cfg, int drop) { return mix_seed(cfg.seed, static_cast<std::uint64_t>(drop)); }

struct Outcome {
    bool ok = false;
    double r_e = 0.0, r_ap1 = 0.0, r_ap2 = 0.0;
    int iterations = 0;
    long linear_solves = 0;
    double wall = 0.0;
    std::vector<IterationRecord> trace;
};

// outcomes[point][method]
using DropOutcome = std::vector<std::vector<Outcome>>;

} // namespace

DropScenario generate_drop(const ExperimentConfig& cfg, const std::vector<SatelliteState>& constellation, int drop) {
    const std::uint64_t ds = drop_seed(cfg, drop);
    DropScenario d;
    d.region = sample_region(mix_seed(ds, 1), cfg.constellation, cfg.region_radius_km, cfg.max_users());
    const double re = cfg.constellation.earth_radius_km;
    d.satellites = select_satellites(constellation, to_cartesian(d.region.center, re), cfg.max_sats());
    const int nk = cfg.max_users(), ns = cfg.max_sats();
    d.geometry.resize(static_cast<std::size_t>(nk * ns));
    for (int k = 0; k < nk; ++k) {
        const Vec3 user = to_cartesian(d.region.users[static_cast<std::size_t>(k)], re);
        for (int s = 0; s < ns; ++s)
            d.geometry[static_cast<std::size_t>(k * ns + s)] =
                link_geometry(constellation[d.satellites[static_cast<std::size_t>(s)]], user, cfg.link.carrier_hz);
    }
    return d;
}

ScenarioScsi scenario_at(const ExperimentConfig& cfg, const DropScenario& drop, int drop_index, double value) {
    LinkBudgetConfig link = cfg.link;
    int nk = cfg.num_users, ns = cfg.num_sats;
    switch (cfg.axis) {
    case SweepAxis::PTxDbm: link.p_tx_dbm = value; break;
    case SweepAxis::KappaDb:
        link.kappa_model = KappaModel::Constant;
        link.kappa_db = value;
        break;
    case SweepAxis::Zeta2: link.phase_error_variance = value; break;
    case SweepAxis::NumSats: ns = static_cast<int>(value); break;
    case SweepAxis::NumUsers: nk = static_cast<int>(value); break;
    }
    const int ns_max = cfg.max_sats();
    std::vector<LinkGeometry> geo(static_cast<std::size_t>(nk * ns));
    for (int k = 0; k < nk; ++k)
        for (int s = 0; s < ns; ++s) geo[static_cast<std::size_t>(k * ns + s)] = drop.geometry[static_cast<std::size_t>(k * ns_max + s)];
    ScenarioScsi scsi = link_budget_scsi(geo, nk, ns, link, cfg.array, mix_seed(drop_seed(cfg, drop_index), 2));
    for (int s = 0; s < ns; ++s) scsi.sat_ids[static_cast<std::size_t>(s)] = drop.satellites[static_cast<std::size_t>(s)];
    return scsi;
}

std::string format_results_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "axis,value,method,n_ok,n_excluded,r_e_mean,r_e_stderr,r_ap1_mean,r_ap2_mean,iterations_mean,linear_solves_mean\n";
    for (const ResultRow& r : rows)
        out << r.axis << ',' << num(r.value) << ',' << r.method << ',' << r.n_ok << ',' << r.n_excluded << ','
            << num(r.r_e_mean) << ',' << num(r.r_e_stderr) << ',' << num(r.r_ap1_mean) << ',' << num(r.r_ap2_mean) << ','
            << num(r.iterations_mean) << ',' << num(r.linear_solves_mean) << '\n';
    return out.str();
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("axis,value,method,", 0) != 0) fail("results CSV: missing or malformed header");
    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 11) fail("results CSV line " + std::to_string(line_no) + ": expected 11 fields");
        try {
            ResultRow r;
            r.axis = f[0];
            r.value = std::stod(f[1]);
            r.method = f[2];
            r.n_ok = std::stoi(f[3]);
            r.n_excluded = std::stoi(f[4]);
            r.r_e_mean = std::stod(f[5]);
            r.r_e_stderr = std::stod(f[6]);
            r.r_ap1_mean = std::stod(f[7]);
            r.r_ap2_mean = std::stod(f[8]);
            r.iterations_mean = std::stod(f[9]);
            r.linear_solves_mean = std::stod(f[10]);
            rows.push_back(r);
        } catch (const std::logic_error&) {
            fail("results CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

std::string plot_table(const std::vector<ResultRow>& rows, SweepAxis axis, const std::vector<Method>& methods) {
    std::ostringstream out;
    out << axis_column(axis);
    for (Method m : methods) out << ' ' << method_name(m);
    out << '\n';
    if (methods.empty()) return out.str();
    std::vector<double> values;
    for (const ResultRow& r : rows)
        if (r.axis == axis_key(axis) && std::find(values.begin(), values.end(), r.value) == values.end()) values.push_back(r.value);
    for (double v : values) {
        out << num(v);
        for (Method m : methods) {
            double cell = std::nan("");
            for (const ResultRow& r : rows)
                if (r.axis == axis_key(axis) && r.value == v && r.method == method_name(m)) cell = r.r_e_mean;
            out << ' ' << num(cell);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> emit_plot_data(const std::string& csv_path, const std::string& out_dir) {
    std::ifstream in(csv_path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + csv_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::vector<ResultRow> rows = parse_results_csv(ss.str());
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (SweepAxis a : {SweepAxis::PTxDbm, SweepAxis::KappaDb, SweepAxis::Zeta2, SweepAxis::NumSats, SweepAxis::NumUsers}) {
        std::vector<Method> present;
        bool any = false;
        for (Method m : {Method::SS_M, Method::SS_WM, Method::MS_SepWM, Method::MS_JoWM, Method::MS_JoCDWM, Method::CFP})
            for (const ResultRow& r : rows)
                if (r.axis == axis_key(a)) {
                    any = true;
                    if (r.method == method_name(m)) {
                        present.push_back(m);
                        break;
                    }
                }
        if (!any) continue;
        const auto path = std::filesystem::path(out_dir) / (std::string("rate_vs_") + axis_column(a) + ".dat");
        write_text(path, plot_table(rows, a, present));
        written.push_back(path.string());
    }
    return written;
}

ComplexitySummary report_complexity(const std::vector<MethodRun>& runs, int i_max) {
    ComplexitySummary sum;
    std::map<int, ComplexityEntry> by_method;
    for (const MethodRun& r : runs) {
        ComplexityEntry& e = by_method[static_cast<int>(r.method)];
        e.method = method_name(r.method);
        ++e.runs;
        e.iterations_mean += r.iterations;
        e.iterations_max = std::max(e.iterations_max, r.iterations);
        e.linear_solves_mean += static_cast<double>(r.linear_solves);
        e.linear_solves_max = std::max(e.linear_solves_max, r.linear_solves);
        e.wall_seconds += r.wall_seconds;
        if (r.method == Method::MS_JoCDWM && (r.iterations > i_max || r.linear_solves > static_cast<long>(i_max) * r.num_users))
            sum.jocdwm_within_cap = false;
        if (r.method == Method::CFP && r.linear_solves != r.num_users) sum.cfp_single_solve = false;
    }
    std::ostringstream out;
    if (!runs.empty()) out << "method runs iterations_mean iterations_max linear_solves_mean linear_solves_max wall_seconds_total\n";
    for (auto& [key, e] : by_method) {
        e.iterations_mean /= e.runs;
        e.linear_solves_mean /= e.runs;
        out << e.method << ' ' << e.runs << ' ' << num(e.iterations_mean) << ' ' << e.iterations_max << ' '
            << num(e.linear_solves_mean) << ' ' << e.linear_solves_max << ' ' << num(e.wall_seconds) << '\n';
        sum.entries.push_back(e);
    }
    if (!runs.empty()) {
        out << "MS-JoCDWM iterations <= I_max (" << i_max << "): " << (sum.jocdwm_within_cap ? "yes" : "NO") << '\n';
        out << "CFP linear solves == K: " << (sum.cfp_single_solve ? "yes" : "NO") << '\n';
        out << "wall-clock figures are indicative only\n";
    }
    sum.text = out.str();
    return sum;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads) {
    cfg.validate();
    const std::vector<SatelliteState> constellation = build_constellation(cfg.constellation, cfg.epoch_s);
    std::optional<Dataset> dataset;
    if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::CFP) != cfg.methods.end()) {
        try {
            dataset = read_dataset(cfg.cfp_dataset);
        } catch (const Error& e) {
            throw Error(ErrorKind::Config, std::string("$.cfp_dataset: ") + e.what());
        }
        if (dataset->records.empty()) throw Error(ErrorKind::Config, "$.cfp_dataset: dataset has no records");
    }

    const std::size_t n_points = cfg.sweep_values.size(), n_methods = cfg.methods.size();
    std::vector<DropOutcome> outcomes(static_cast<std::size_t>(cfg.n_drops));
    std::mutex log_mutex;

    parallel_for(cfg.n_drops, threads, [&](int d) {
        const DropScenario drop = generate_drop(cfg, constellation, d);
        const std::uint64_t mc_seed = mix_seed(drop_seed(cfg, d), 3);
        DropOutcome& out = outcomes[static_cast<std::size_t>(d)];
        out.assign(n_points, std::vector<Outcome>(n_methods));
        for (std::size_t p = 0; p < n_points; ++p) {
            const ScenarioScsi scsi = scenario_at(cfg, drop, d, cfg.sweep_values[p]);
            const std::vector<CovarianceFactors> factors = build_all_factors(scsi);
            for (std::size_t m = 0; m < n_methods; ++m) {
                Outcome& o = out[p][m];
                const Method method = cfg.methods[m];
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    CMat w;
                    if (method == Method::CFP) {
                        const DatasetRecord& rec = dataset->records[static_cast<std::size_t>(d) % dataset->records.size()];
                        if (rec.labels.a_bar.rows() != scsi.num_users || rec.labels.a_bar.cols() != scsi.num_sats + 1)
                            throw Error(ErrorKind::Config, "$.cfp_dataset: label dimensions do not match the scenario");
                        LinearSolveStats st;
                        w = cfp(rec.labels, mapping_inputs(scsi), cfg.solver, &st).w;
                        o.linear_solves = st.solves;
                    } else {
                        SolveResult r;
                        switch (method) {
                        case Method::SS_M: r = solve_baseline(scsi, Baseline::SS_M, cfg.solver); break;
                        case Method::SS_WM: r = solve_baseline(scsi, Baseline::SS_WM, cfg.solver); break;
                        case Method::MS_SepWM: r = solve_baseline(scsi, Baseline::MS_SepWM, cfg.solver); break;
                        case Method::MS_JoWM: r = solve_ms_jowm(scsi, cfg.solver); break;
                        default: r = solve_ms_jocdwm(scsi, cfg.solver); break;
                        }
                        if (r.trace.breakdown) fail_numeric(r.trace.breakdown_reason);
                        w = std::move(r.solution.w);
                        o.iterations = r.trace.iterations;
                        o.linear_solves = r.trace.linear_solves;
                        if (cfg.trace) o.trace = std::move(r.trace.records);
                    }
                    o.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    if (!w.allFinite()) fail_numeric("non-finite precoder");
                    o.r_ap1 = rate_ap1(w, scsi, factors).sum_rate;
                    o.r_ap2 = rate_ap2(w, scsi, factors).sum_rate;
                    o.r_e = rate_mc(w, scsi, cfg.n_mc_rate, mc_seed).sum_rate;
                    o.ok = true;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::Numerical) throw;
                    std::lock_guard<std::mutex> lock(log_mutex);
                    std::cerr << "drop " << d << ", " << axis_key(cfg.axis) << "=" << num(cfg.sweep_values[p]) << ", "
                              << method_name(method) << ": excluded (" << e.what() << ")\n";
                }
            }
        }
    });

    ExperimentOutput result;
    std::ostringstream traces;
    traces << "axis,value,method,drop,iteration,objective,r_ap1,r_ap2\n";
    for (std::size_t p = 0; p < n_points; ++p) {
        for (std::size_t m = 0; m < n_methods; ++m) {
            ResultRow row;
            row.axis = axis_key(cfg.axis);
            row.value = cfg.sweep_values[p];
            row.method = method_name(cfg.methods[m]);
            std::vector<double> re;
            for (int d = 0; d < cfg.n_drops; ++d) {
                const Outcome& o = outcomes[static_cast<std::size_t>(d)][p][m];
                if (!o.ok) {
                    ++row.n_excluded;
                    continue;
                }
                ++row.n_ok;
                re.push_back(o.r_e);
                row.r_e_mean += o.r_e;
                row.r_ap1_mean += o.r_ap1;
                row.r_ap2_mean += o.r_ap2;
                row.iterations_mean += o.iterations;
                row.linear_solves_mean += static_cast<double>(o.linear_solves);
                result.runs.push_back({cfg.methods[m], cfg.axis == SweepAxis::NumUsers ? static_cast<int>(row.value) : cfg.num_users,
                                       o.iterations, o.linear_solves, o.wall});
                for (const IterationRecord& rec : o.trace)
                    traces << row.axis << ',' << num(row.value) << ',' << row.method << ',' << d << ',' << rec.iteration << ','
                           << num(rec.objective) << ',' << num(rec.r_ap1) << ',' << num(rec.r_ap2) << '\n';
            }
            result.breakdowns += row.n_excluded;
            if (row.n_ok > 0) {
                const double n = row.n_ok;
                row.r_e_mean /= n;
                row.r_ap1_mean /= n;
                row.r_ap2_mean /= n;
                row.iterations_mean /= n;
                row.linear_solves_mean /= n;
                double var = 0.0;
                for (double x : re) var += (x - row.r_e_mean) * (x - row.r_e_mean);
                row.r_e_stderr = row.n_ok > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
            } else {
                row.r_e_mean = row.r_ap1_mean = row.r_ap2_mean = std::nan("");
            }
            result.rows.push_back(row);
        }
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        write_text(dir / "results.csv", format_results_csv(result.rows));
        if (cfg.trace) write_text(dir / "traces.csv", traces.str());
        write_text(dir / "complexity.txt", report_complexity(result.runs, cfg.solver.i_max).text);
    }
    return result;
}

void export_dataset(const ExperimentConfig& cfg, int n, const std::string& path, int threads) {
    cfg.validate();
    require(n >= 1, "export_dataset: n must be >= 1");
    static const double grid[] = {20, 25, 30, 35, 40, 45, 50};
    ExperimentConfig local = cfg;
    local.axis = SweepAxis::PTxDbm;
    const std::vector<SatelliteState> constellation = build_constellation(local.constellation, local.epoch_s);
    std::vector<DatasetRecord> records(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](int i) {
        const DropScenario drop = generate_drop(local, constellation, i);
        std::mt19937_64 rng(mix_seed(drop_seed(local, i), 4));
        const double p_tx = grid[std::uniform_int_distribution<int>(0, 6)(rng)];
        const ScenarioScsi scsi = scenario_at(local, drop, i, p_tx);
        const SolveResult r = solve_ms_jocdwm(scsi, local.solver);
        if (r.trace.breakdown) throw Error(ErrorKind::Numerical, "export_dataset: solver breakdown on sample " + std::to_string(i));
        DatasetRecord& rec = records[static_cast<std::size_t>(i)];
        rec.inputs = mapping_inputs(scsi);
        rec.labels = labels_from_aux(r.aux);
        rec.p_tx_dbm = p_tx;
        rec.r_ap1 = rate_ap1(r.solution.w, scsi).sum_rate;
    });
    DatasetHeader h;
    h.num_users = local.num_users;
    h.num_sats = local.num_sats;
    h.array = local.array;
    h.xi_convention = XiConvention::LeastSquares;
    h.n_samples = static_cast<std::uint64_t>(n);
    h.seed = local.seed;
    write_dataset(path, h, records, digest_hex(config_to_json(cfg)));
}

} // namespace satprec
