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


#include "satprec/channel.hpp"

#include <cmath>

namespace satprec {

void LinkStat::validate() const {
    require(gamma > 0.0 && std::isfinite(gamma), "LinkStat: gamma must be positive");
    require(kappa >= 0.0, "LinkStat: kappa must be non-negative");
    require(std::abs(mean_phase) <= 1.0 + 1e-12, "LinkStat: |mean_phase| must not exceed 1");
    require(phase_var >= 0.0, "LinkStat: phase variance must be non-negative");
}

ScenarioScsi::ScenarioScsi(int users, int sats, ArrayGeometry geometry)
    : num_users(users), num_sats(sats), array(geometry),
      stats(static_cast<std::size_t>(users * sats)),
      noise_power(static_cast<std::size_t>(users), 1.0),
      weights(static_cast<std::size_t>(users), 1.0),
      power_budget(static_cast<std::size_t>(sats), 1.0),
      user_ids(static_cast<std::size_t>(users)),
      sat_ids(static_cast<std::size_t>(sats)) {
    for (int k = 0; k < users; ++k) user_ids[static_cast<std::size_t>(k)] = static_cast<std::uint64_t>(k);
    for (int s = 0; s < sats; ++s) sat_ids[static_cast<std::size_t>(s)] = static_cast<std::uint64_t>(s);
}

void ScenarioScsi::validate() const {
    require(num_users >= 1 && num_sats >= 1, "scenario: need at least one user and one satellite");
    require(array.n_v >= 1 && array.n_h >= 1, "scenario: array dimensions must be >= 1");
    const auto ku = static_cast<std::size_t>(num_users), ss = static_cast<std::size_t>(num_sats);
    require(stats.size() == ku * ss, "scenario: stats grid has wrong size");
    require(noise_power.size() == ku && weights.size() == ku, "scenario: per-user vectors have wrong size");
    require(power_budget.size() == ss, "scenario: power budget has wrong size");
    require(user_ids.size() == ku && sat_ids.size() == ss, "scenario: id vectors have wrong size");
    for (const auto& st : stats) st.validate();
    for (double n : noise_power) require(n > 0.0, "scenario: noise power must be positive");
    for (double b : weights) require(b >= 0.0, "scenario: weights must be non-negative");
    for (double p : power_budget) require(p > 0.0, "scenario: power budget must be positive");
}

ScenarioScsi permute_scenario(const ScenarioScsi& scsi, const std::vector<int>& user_perm, const std::vector<int>& sat_perm) {
    require(user_perm.size() == static_cast<std::size_t>(scsi.num_users), "permute_scenario: user permutation size");
    require(sat_perm.size() == static_cast<std::size_t>(scsi.num_sats), "permute_scenario: satellite permutation size");
    ScenarioScsi out(scsi.num_users, scsi.num_sats, scsi.array);
    for (int k = 0; k < scsi.num_users; ++k) {
        const int ok = user_perm[static_cast<std::size_t>(k)];
        const auto ku = static_cast<std::size_t>(k), oku = static_cast<std::size_t>(ok);
        out.noise_power[ku] = scsi.noise_power[oku];
        out.weights[ku] = scsi.weights[oku];
        out.user_ids[ku] = scsi.user_ids[oku];
        for (int s = 0; s < scsi.num_sats; ++s) out.at(k, s) = scsi.at(ok, sat_perm[static_cast<std::size_t>(s)]);
    }
    for (int s = 0; s < scsi.num_sats; ++s) {
        const auto os = static_cast<std::size_t>(sat_perm[static_cast<std::size_t>(s)]);
        out.power_budget[static_cast<std::size_t>(s)] = scsi.power_budget[os];
        out.sat_ids[static_cast<std::size_t>(s)] = scsi.sat_ids[os];
    }
    return out;
}

CVec steering_vector(double theta_x, double theta_y, const ArrayGeometry& array) {
    const double xv = std::cos(theta_y);
    const double xh = std::sin(theta_y) * std::cos(theta_x);
    const double scale = 1.0 / std::sqrt(static_cast<double>(array.n_t()));
    CVec v(array.n_t());
    for (int p = 0; p < array.n_v; ++p)
        for (int q = 0; q < array.n_h; ++q)
            v(p * array.n_h + q) = scale * std::polar(1.0, -kPi * (p * xv + q * xh));
    return v;
}

cd rho(const LinkStat& stat) {
    if (stat.kappa <= 0.0) return {0.0, 0.0};
    if (std::isinf(stat.kappa)) return std::sqrt(stat.gamma / 2.0) * cd(1.0, 1.0) * stat.mean_phase;
    return std::sqrt(stat.kappa * stat.gamma / (2.0 * (stat.kappa + 1.0))) * cd(1.0, 1.0) * stat.mean_phase;
}

CVec mean_channel(const LinkStat& stat, const ArrayGeometry& array) {
    return rho(stat) * steering_vector(stat.theta_x, stat.theta_y, array);
}

CMat covariance_block(const LinkStat& s1, const LinkStat& s2, bool same_satellite, const ArrayGeometry& array) {
    const CVec v1 = steering_vector(s1.theta_x, s1.theta_y, array);
    if (same_satellite) return s1.gamma * v1.conjugate() * v1.transpose();
    const CVec v2 = steering_vector(s2.theta_x, s2.theta_y, array);
    return (std::conj(rho(s1)) * rho(s2)) * v1.conjugate() * v2.transpose();
}

double mean_phase_factor(double phase_var) {
    require(phase_var >= 0.0, "mean_phase_factor: variance must be non-negative");
    return std::exp(-phase_var / 2.0);
}

cd sample_link_coefficient(const LinkStat& stat, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double k = stat.kappa;
    const double los_amp = std::isinf(k) ? std::sqrt(stat.gamma) : std::sqrt(k * stat.gamma / (k + 1.0));
    const double nlos_var = std::isinf(k) ? 0.0 : stat.gamma / (k + 1.0);
    const double re = gauss(rng), im = gauss(rng);
    const cd scatter = std::sqrt(nlos_var / 2.0) * cd(re, im);
    const double phase_err = std::sqrt(stat.phase_var) * gauss(rng);
    return (std::polar(los_amp, kPi / 4.0) + scatter) * std::polar(1.0, phase_err);
}

ChannelRealization sample_realization(const ScenarioScsi& scsi, std::mt19937_64& rng) {
    ChannelRealization out;
    out.num_users = scsi.num_users;
    out.num_sats = scsi.num_sats;
    out.h_bar.reserve(scsi.stats.size());
    for (int k = 0; k < scsi.num_users; ++k)
        for (int s = 0; s < scsi.num_sats; ++s) {
            const LinkStat& st = scsi.at(k, s);
            const cd coeff = sample_link_coefficient(st, rng);
            out.h_bar.push_back(coeff * steering_vector(st.theta_x, st.theta_y, scsi.array));
        }
    return out;
}

void LinkBudgetConfig::validate() const {
    require(subcarrier_spacing_hz > 0.0, "link budget: bandwidth must be positive");
    require(carrier_hz > 0.0, "link budget: carrier frequency must be positive");
    require(antenna_temperature_k > 0.0, "link budget: antenna temperature must be positive");
    require(phase_error_variance >= 0.0, "link budget: phase error variance must be non-negative");
    require(kappa_std_db >= 0.0, "link budget: kappa spread must be non-negative");
}

double free_space_path_loss_db(double range_km, double carrier_hz) {
    require(range_km > 0.0, "free_space_path_loss_db: range must be positive");
    return 20.0 * std::log10(4.0 * kPi * range_km * 1e3 * carrier_hz / kSpeedOfLight);
}

double noise_power_w(double temperature_k, double bandwidth_hz, double noise_figure_db) {
    require(bandwidth_hz > 0.0, "noise_power_w: bandwidth must be positive");
    return kBoltzmann * temperature_k * bandwidth_hz * db_to_linear(noise_figure_db);
}

ScenarioScsi link_budget_scsi(const std::vector<LinkGeometry>& geometry, int num_users, int num_sats,
                              const LinkBudgetConfig& config, const ArrayGeometry& array, std::uint64_t kappa_seed) {
    config.validate();
    require(geometry.size() == static_cast<std::size_t>(num_users * num_sats), "link_budget_scsi: geometry grid size");
    ScenarioScsi scsi(num_users, num_sats, array);
    const double sigma2 = noise_power_w(config.antenna_temperature_k, config.subcarrier_spacing_hz, config.noise_figure_db);
    const double gains_db = config.tx_element_gain_dbi + config.rx_gain_dbi + linear_to_db(array.n_t());
    const double phase_mean = mean_phase_factor(config.phase_error_variance);
    for (int k = 0; k < num_users; ++k) {
        scsi.noise_power[static_cast<std::size_t>(k)] = sigma2;
        for (int s = 0; s < num_sats; ++s) {
            const LinkGeometry& g = geometry[static_cast<std::size_t>(k * num_sats + s)];
            LinkStat& st = scsi.at(k, s);
            st.gamma = db_to_linear(gains_db - free_space_path_loss_db(g.slant_range_km, config.carrier_hz));
            st.theta_x = g.theta_x;
            st.theta_y = g.theta_y;
            st.phase_var = config.phase_error_variance;
            st.mean_phase = phase_mean;
            if (config.kappa_model == KappaModel::Constant) {
                st.kappa = db_to_linear(config.kappa_db);
            } else {
                std::mt19937_64 rng(mix_seed(kappa_seed, static_cast<std::uint64_t>(k) * 4096u + static_cast<std::uint64_t>(s)));
                std::normal_distribution<double> gauss(config.kappa_db, config.kappa_std_db);
                st.kappa = db_to_linear(gauss(rng));
            }
        }
    }
    for (auto& p : scsi.power_budget) p = dbm_to_watt(config.p_tx_dbm);
    return scsi;
}

} // namespace satprec
