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


// Command-line front end: run / plots / export-dataset.

#include "satprec/dataset.hpp"
#include "satprec/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

using namespace satprec;

namespace {

int exit_code(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument: return 2;
    case ErrorKind::Numerical: return 3;
    case ErrorKind::Io: return 2;
    }
    return 2;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

void apply_overrides(ExperimentConfig& cfg, const std::string& methods, const std::string& sweep) {
    if (!methods.empty()) {
        cfg.methods.clear();
        for (const std::string& m : split(methods, ',')) {
            const auto parsed = parse_method(m);
            if (!parsed) throw Error(ErrorKind::Config, "--methods: unknown method '" + m + "'");
            cfg.methods.push_back(*parsed);
        }
    }
    if (!sweep.empty()) {
        const auto eq = sweep.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Config, "--sweep: expected axis=v1,v2,...");
        const auto axis = parse_axis(sweep.substr(0, eq));
        if (!axis) throw Error(ErrorKind::Config, "--sweep: unknown axis '" + sweep.substr(0, eq) + "'");
        cfg.axis = *axis;
        cfg.sweep_values.clear();
        for (const std::string& v : split(sweep.substr(eq + 1), ',')) {
            try {
                cfg.sweep_values.push_back(std::stod(v));
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::Config, "--sweep: bad value '" + v + "'");
            }
        }
    }
    cfg.validate();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"satprec: statistical-CSI distributed precoding for cooperative LEO satellites"};
    app.require_subcommand(0, 1);
    bool print_schema = false;
    app.add_flag("--print-schema", print_schema, "Print the experiment config schema and exit");

    std::string config_path, out_dir, methods, sweep;
    std::uint64_t seed = 0;
    int threads = 1;
    auto* run = app.add_subcommand("run", "Run a sweep experiment");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config)");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--methods", methods, "Comma-separated method list");
    run->add_option("--sweep", sweep, "Sweep override axis=v1,v2,...");

    std::string csv_in, plot_dir;
    auto* plots = app.add_subcommand("plots", "Write per-axis plot data from results.csv");
    plots->add_option("--in", csv_in, "results.csv")->required();
    plots->add_option("--out", plot_dir, "Output directory")->required();

    std::string ds_config, ds_out;
    int ds_n = 0;
    auto* exp = app.add_subcommand("export-dataset", "Export solver-labelled samples for external training");
    exp->add_option("--config", ds_config, "JSON config file")->required();
    exp->add_option("--n", ds_n, "Number of samples")->required()->check(CLI::PositiveNumber);
    exp->add_option("--out", ds_out, "Output file")->required();
    exp->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (print_schema) {
            std::cout << config_schema();
            return 0;
        }
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            if (*seed_opt) cfg.seed = seed;
            apply_overrides(cfg, methods, sweep);
            const ExperimentOutput out = run_experiment(cfg, out_dir, threads);
            std::cout << "wrote " << out.rows.size() << " result rows to " << out_dir << "/results.csv";
            if (out.breakdowns > 0) std::cout << " (" << out.breakdowns << " solves excluded after numerical breakdown)";
            std::cout << '\n';
            for (const ResultRow& r : out.rows)
                if (r.n_ok == 0) {
                    std::cerr << "every drop failed for " << r.method << " at " << r.axis << "=" << r.value << '\n';
                    return 3;
                }
            return 0;
        }
        if (*plots) {
            for (const std::string& p : emit_plot_data(csv_in, plot_dir)) std::cout << "wrote " << p << '\n';
            return 0;
        }
        if (*exp) {
            export_dataset(load_config(ds_config), ds_n, ds_out, threads);
            std::cout << "wrote " << ds_n << " samples to " << ds_out << " (manifest " << ds_out << ".json)\n";
            return 0;
        }
        std::cout << app.help();
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
