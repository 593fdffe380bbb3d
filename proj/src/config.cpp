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

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace satprec {

using nlohmann::json;

const char* axis_key(SweepAxis a) {
    switch (a) {
    case SweepAxis::PTxDbm: return "p_tx_dbm";
    case SweepAxis::KappaDb: return "kappa";
    case SweepAxis::Zeta2: return "zeta2";
    case SweepAxis::NumSats: return "S";
    case SweepAxis::NumUsers: return "K";
    }
    return "";
}

const char* axis_column(SweepAxis a) {
    switch (a) {
    case SweepAxis::PTxDbm: return "P_TX_dBm";
    case SweepAxis::KappaDb: return "kappa_dB";
    case SweepAxis::Zeta2: return "zeta2";
    case SweepAxis::NumSats: return "S";
    case SweepAxis::NumUsers: return "K";
    }
    return "";
}

const char* method_name(Method m) {
    switch (m) {
    case Method::SS_M: return "SS-M";
    case Method::SS_WM: return "SS-WM";
    case Method::MS_SepWM: return "MS-SepWM";
    case Method::MS_JoWM: return "MS-JoWM";
    case Method::MS_JoCDWM: return "MS-JoCDWM";
    case Method::CFP: return "CFP-from-dataset";
    }
    return "";
}

std::optional<SweepAxis> parse_axis(const std::string& s) {
    for (SweepAxis a : {SweepAxis::PTxDbm, SweepAxis::KappaDb, SweepAxis::Zeta2, SweepAxis::NumSats, SweepAxis::NumUsers})
        if (s == axis_key(a) || s == axis_column(a)) return a;
    return std::nullopt;
}

std::optional<Method> parse_method(const std::string& s) {
    for (Method m : {Method::SS_M, Method::SS_WM, Method::MS_SepWM, Method::MS_JoWM, Method::MS_JoCDWM, Method::CFP})
        if (s == method_name(m)) return m;
    return std::nullopt;
}

const std::vector<Method>& default_methods() {
    static const std::vector<Method> m{Method::SS_M, Method::SS_WM, Method::MS_SepWM, Method::MS_JoWM, Method::MS_JoCDWM};
    return m;
}

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::Config, path + ": " + what);
}

// Reads optional members of one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) config_error(path_.empty() ? "$" : path_, "expected an object");
    }

    template <class T> void read(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        const std::string p = child(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) config_error(p, "expected a boolean");
            out = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) config_error(p, "expected a string");
            out = v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) config_error(p, "expected a non-negative integer");
            out = v.get<std::uint64_t>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) config_error(p, "expected an integer");
            out = v.get<T>();
        } else {
            if (!v.is_number()) config_error(p, "expected a number");
            out = v.get<T>();
        }
    }

    void read_opt(const std::string& key, std::optional<double>& out) {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) return;
        double v = 0.0;
        read(key, v);
        out = v;
    }

    const json* sub(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string child(const std::string& key) const { return (path_.empty() ? "$" : path_) + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) config_error(child(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class F> void guarded(const std::string& path, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        config_error(path, e.what());
    }
}

} // namespace

int ExperimentConfig::max_users() const {
    int k = num_users;
    if (axis == SweepAxis::NumUsers)
        for (double v : sweep_values) k = std::max(k, static_cast<int>(v));
    return k;
}

int ExperimentConfig::max_sats() const {
    int s = num_sats;
    if (axis == SweepAxis::NumSats)
        for (double v : sweep_values) s = std::max(s, static_cast<int>(v));
    return s;
}

void ExperimentConfig::validate() const {
    guarded("$.constellation", [&] { constellation.validate(); });
    guarded("$.link_budget", [&] { link.validate(); });
    guarded("$.solver", [&] { solver.validate(); });
    if (!(region_radius_km > 0.0)) config_error("$.region.radius_km", "must be positive");
    if (num_users < 1) config_error("$.users", "must be >= 1");
    if (num_sats < 1) config_error("$.satellites", "must be >= 1");
    if (array.n_v < 1 || array.n_h < 1) config_error("$.array", "n_v and n_h must be >= 1");
    if (sweep_values.empty()) config_error("$.sweep.values", "must not be empty");
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        const double v = sweep_values[i];
        const std::string p = "$.sweep.values[" + std::to_string(i) + "]";
        if (!std::isfinite(v)) config_error(p, "must be finite");
        if ((axis == SweepAxis::NumSats || axis == SweepAxis::NumUsers) && (v < 1.0 || v != std::floor(v)))
            config_error(p, "must be a positive integer");
        if (axis == SweepAxis::Zeta2 && v < 0.0) config_error(p, "phase error variance must be non-negative");
    }
    if (max_sats() > constellation.size()) config_error("$.satellites", "more satellites than the constellation holds");
    if (n_drops < 1) config_error("$.n_drops", "must be >= 1");
    if (n_mc_rate < 1) config_error("$.n_mc_rate", "must be >= 1");
    if (methods.empty()) config_error("$.methods", "must not be empty");
    for (Method m : methods)
        if (m == Method::CFP && cfp_dataset.empty()) config_error("$.cfp_dataset", "required when CFP-from-dataset is requested");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        config_error("$", std::string("invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    Section top(root, "");
    if (const json* c = top.sub("constellation")) {
        Section s(*c, "$.constellation");
        s.read("num_planes", cfg.constellation.num_planes);
        s.read("sats_per_plane", cfg.constellation.sats_per_plane);
        s.read("inclination_deg", cfg.constellation.inclination_deg);
        s.read("altitude_km", cfg.constellation.altitude_km);
        s.read("phasing_factor", cfg.constellation.phasing_factor);
        s.read("earth_radius_km", cfg.constellation.earth_radius_km);
        s.read_opt("center_max_latitude_deg", cfg.constellation.center_max_latitude_deg);
        s.read("epoch_s", cfg.epoch_s);
        s.finish();
    }
    if (const json* c = top.sub("region")) {
        Section s(*c, "$.region");
        s.read("radius_km", cfg.region_radius_km);
        s.finish();
    }
    top.read("users", cfg.num_users);
    top.read("satellites", cfg.num_sats);
    if (const json* c = top.sub("array")) {
        Section s(*c, "$.array");
        s.read("n_v", cfg.array.n_v);
        s.read("n_h", cfg.array.n_h);
        s.finish();
    }
    if (const json* c = top.sub("link_budget")) {
        Section s(*c, "$.link_budget");
        LinkBudgetConfig& l = cfg.link;
        s.read("carrier_hz", l.carrier_hz);
        s.read("subcarrier_spacing_hz", l.subcarrier_spacing_hz);
        s.read("noise_figure_db", l.noise_figure_db);
        s.read("antenna_temperature_k", l.antenna_temperature_k);
        s.read("tx_element_gain_dbi", l.tx_element_gain_dbi);
        s.read("rx_gain_dbi", l.rx_gain_dbi);
        s.read("p_tx_dbm", l.p_tx_dbm);
        std::string model = l.kappa_model == KappaModel::Constant ? "constant" : "lognormal";
        s.read("kappa_model", model);
        if (model == "constant") l.kappa_model = KappaModel::Constant;
        else if (model == "lognormal") l.kappa_model = KappaModel::LogNormal;
        else config_error(s.child("kappa_model"), "expected \"constant\" or \"lognormal\"");
        s.read("kappa_db", l.kappa_db);
        s.read("kappa_std_db", l.kappa_std_db);
        s.read("phase_error_variance", l.phase_error_variance);
        s.finish();
    }
    if (const json* c = top.sub("solver")) {
        Section s(*c, "$.solver");
        s.read("i_max", cfg.solver.i_max);
        s.read("chi", cfg.solver.chi);
        s.read("i_max1", cfg.solver.i_max1);
        s.read("ridge_floor", cfg.solver.ridge_floor);
        std::string ls = cfg.solver.linear_solver == LinearSolver::Dense ? "dense" : "structured";
        s.read("linear_solver", ls);
        if (ls == "dense") cfg.solver.linear_solver = LinearSolver::Dense;
        else if (ls == "structured") cfg.solver.linear_solver = LinearSolver::Structured;
        else config_error(s.child("linear_solver"), "expected \"structured\" or \"dense\"");
        s.finish();
    }
    if (const json* c = top.sub("sweep")) {
        Section s(*c, "$.sweep");
        std::string axis = axis_key(cfg.axis);
        s.read("axis", axis);
        const auto a = parse_axis(axis);
        if (!a) config_error(s.child("axis"), "unknown sweep axis '" + axis + "'");
        cfg.axis = *a;
        if (const json* v = s.sub("values")) {
            if (!v->is_array()) config_error("$.sweep.values", "expected an array");
            cfg.sweep_values.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number()) config_error("$.sweep.values[" + std::to_string(i) + "]", "expected a number");
                cfg.sweep_values.push_back((*v)[i].get<double>());
            }
        }
        s.finish();
    }
    if (const json* v = top.sub("methods")) {
        if (!v->is_array()) config_error("$.methods", "expected an array");
        cfg.methods.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string p = "$.methods[" + std::to_string(i) + "]";
            if (!(*v)[i].is_string()) config_error(p, "expected a string");
            const auto m = parse_method((*v)[i].get<std::string>());
            if (!m) config_error(p, "unknown method '" + (*v)[i].get<std::string>() + "'");
            cfg.methods.push_back(*m);
        }
    }
    top.read("n_drops", cfg.n_drops);
    top.read("n_mc_rate", cfg.n_mc_rate);
    top.read("seed", cfg.seed);
    top.read("trace", cfg.trace);
    top.read("cfp_dataset", cfg.cfp_dataset);
    top.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    const ConstellationConfig& c = cfg.constellation;
    j["constellation"] = {{"num_planes", c.num_planes},
                          {"sats_per_plane", c.sats_per_plane},
                          {"inclination_deg", c.inclination_deg},
                          {"altitude_km", c.altitude_km},
                          {"phasing_factor", c.phasing_factor},
                          {"earth_radius_km", c.earth_radius_km},
                          {"center_max_latitude_deg", c.center_max_latitude_deg ? json(*c.center_max_latitude_deg) : json(nullptr)},
                          {"epoch_s", cfg.epoch_s}};
    j["region"] = {{"radius_km", cfg.region_radius_km}};
    j["users"] = cfg.num_users;
    j["satellites"] = cfg.num_sats;
    j["array"] = {{"n_v", cfg.array.n_v}, {"n_h", cfg.array.n_h}};
    const LinkBudgetConfig& l = cfg.link;
    j["link_budget"] = {{"carrier_hz", l.carrier_hz},
                        {"subcarrier_spacing_hz", l.subcarrier_spacing_hz},
                        {"noise_figure_db", l.noise_figure_db},
                        {"antenna_temperature_k", l.antenna_temperature_k},
                        {"tx_element_gain_dbi", l.tx_element_gain_dbi},
                        {"rx_gain_dbi", l.rx_gain_dbi},
                        {"p_tx_dbm", l.p_tx_dbm},
                        {"kappa_model", l.kappa_model == KappaModel::Constant ? "constant" : "lognormal"},
                        {"kappa_db", l.kappa_db},
                        {"kappa_std_db", l.kappa_std_db},
                        {"phase_error_variance", l.phase_error_variance}};
    j["solver"] = {{"i_max", cfg.solver.i_max},
                   {"chi", cfg.solver.chi},
                   {"i_max1", cfg.solver.i_max1},
                   {"ridge_floor", cfg.solver.ridge_floor},
                   {"linear_solver", cfg.solver.linear_solver == LinearSolver::Dense ? "dense" : "structured"}};
    j["sweep"] = {{"axis", axis_key(cfg.axis)}, {"values", cfg.sweep_values}};
    std::vector<std::string> methods;
    for (Method m : cfg.methods) methods.emplace_back(method_name(m));
    j["methods"] = methods;
    j["n_drops"] = cfg.n_drops;
    j["n_mc_rate"] = cfg.n_mc_rate;
    j["seed"] = cfg.seed;
    j["trace"] = cfg.trace;
    j["cfp_dataset"] = cfg.cfp_dataset;
    return j.dump(2);
}

std::string config_schema() {
    return R"SCHEMA({
  "description": "satprec experiment config. Every key is optional; defaults shown.",
  "constellation": {
    "num_planes": "integer >= 1 (28)",
    "sats_per_plane": "integer >= 1 (60)",
    "inclination_deg": "number in [0, 180] (53)",
    "altitude_km": "number > 0 (600)",
    "phasing_factor": "integer in [0, num_planes-1] (1)",
    "earth_radius_km": "number > 0 (6371)",
    "center_max_latitude_deg": "number or null (null = inclination)",
    "epoch_s": "number (0)"
  },
  "region": { "radius_km": "number > 0 (800)" },
  "users": "integer >= 1 (48)",
  "satellites": "integer >= 1 (5)",
  "array": { "n_v": "integer >= 1 (10)", "n_h": "integer >= 1 (10)" },
  "link_budget": {
    "carrier_hz": "number > 0 (2e9)",
    "subcarrier_spacing_hz": "number > 0 (30e3)",
    "noise_figure_db": "number (7)",
    "antenna_temperature_k": "number > 0 (290)",
    "tx_element_gain_dbi": "number (6)",
    "rx_gain_dbi": "number (0)",
    "p_tx_dbm": "number, per-satellite per-subcarrier budget (35)",
    "kappa_model": "\"constant\" | \"lognormal\" (lognormal)",
    "kappa_db": "number, constant value or lognormal mean (25)",
    "kappa_std_db": "number >= 0 (3)",
    "phase_error_variance": "number >= 0, rad^2 (0.5)"
  },
  "solver": {
    "i_max": "integer >= 1 (10)",
    "chi": "number > 0 (0.001)",
    "i_max1": "integer >= 1, baseline iteration cap (300)",
    "ridge_floor": "number >= 0 (1e-12)",
    "linear_solver": "\"structured\" | \"dense\" (structured)"
  },
  "sweep": {
    "axis": "\"p_tx_dbm\" | \"kappa\" (dB, constant model) | \"zeta2\" | \"S\" | \"K\" (p_tx_dbm)",
    "values": "non-empty array of numbers ([20, 25, 30, 35, 40, 45, 50])"
  },
  "methods": "array of \"SS-M\", \"SS-WM\", \"MS-SepWM\", \"MS-JoWM\", \"MS-JoCDWM\", \"CFP-from-dataset\"",
  "n_drops": "integer >= 1 (50)",
  "n_mc_rate": "integer >= 1 (200)",
  "seed": "unsigned 64-bit integer (1)",
  "trace": "boolean, write traces.csv (true)",
  "cfp_dataset": "path to a dataset file whose record d holds the labels for drop d (\"\")"
}
)SCHEMA";
}

} // namespace satprec
