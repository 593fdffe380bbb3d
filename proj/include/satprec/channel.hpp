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


#ifndef SATPREC_CHANNEL_HPP
#define SATPREC_CHANNEL_HPP

#include "satprec/constellation.hpp"
#include "satprec/types.hpp"

#include <random>
#include <vector>

namespace satprec {

struct ArrayGeometry {
    int n_v = 10;
    int n_h = 10;
    int n_t() const { return n_v * n_h; }
};

// Statistical CSI of one (satellite, user) link.
struct LinkStat {
    double gamma = 1.0;      // average channel power
    double kappa = 0.0;      // Rician factor, linear
    double theta_x = 0.0;    // departure angles in the array frame
    double theta_y = 0.0;
    cd mean_phase{1.0, 0.0}; // E{phi}
    double phase_var = 0.0;  // variance of the Gaussian phase error

    void validate() const;
};

// K x S grid of link statistics plus per-user and per-satellite parameters.
// `user_ids` / `sat_ids` are identity labels that travel with the rows and
// columns when a scenario is permuted; random streams are keyed on them.
struct ScenarioScsi {
    int num_users = 0;
    int num_sats = 0;
    ArrayGeometry array;
    std::vector<LinkStat> stats;     // row-major: stats[k * num_sats + s]
    std::vector<double> noise_power; // per user, W
    std::vector<double> weights;     // per user
    std::vector<double> power_budget;// per satellite, W
    std::vector<std::uint64_t> user_ids;
    std::vector<std::uint64_t> sat_ids;

    ScenarioScsi() = default;
    ScenarioScsi(int users, int sats, ArrayGeometry geometry);

    LinkStat& at(int k, int s) { return stats[static_cast<std::size_t>(k * num_sats + s)]; }
    const LinkStat& at(int k, int s) const { return stats[static_cast<std::size_t>(k * num_sats + s)]; }
    int stacked_dim() const { return num_sats * array.n_t(); }
    void validate() const;
};

/// Permuted copy: new user k is old user user_perm[k], new satellite s is old sat_perm[s].
ScenarioScsi permute_scenario(const ScenarioScsi& scsi, const std::vector<int>& user_perm, const std::vector<int>& sat_perm);

/// UPA steering vector v_{Nv}(cos ty) kron v_{Nh}(sin ty cos tx), unit l2 norm.
CVec steering_vector(double theta_x, double theta_y, const ArrayGeometry& array);

/// sqrt(kappa*gamma/(2(kappa+1))) (1+j) mean_phase.
cd rho(const LinkStat& stat);

CVec mean_channel(const LinkStat& stat, const ArrayGeometry& array);

/// E{h1^* h2^T}: gamma v^* v^T on the same satellite, rho1^* rho2 v1^* v2^T otherwise.
CMat covariance_block(const LinkStat& s1, const LinkStat& s2, bool same_satellite, const ArrayGeometry& array);

/// E{exp(j x)} for x ~ N(0, phase_var).
double mean_phase_factor(double phase_var);

struct ChannelRealization {
    int num_users = 0;
    int num_sats = 0;
    std::vector<CVec> h_bar; // [k * num_sats + s]
    const CVec& at(int k, int s) const { return h_bar[static_cast<std::size_t>(k * num_sats + s)]; }
};

/// One draw of every link: h = a v exp(j x), a Rician with LoS phase pi/4, x ~ N(0, phase_var).
ChannelRealization sample_realization(const ScenarioScsi& scsi, std::mt19937_64& rng);

/// Scalar fading coefficient a*exp(j x) of one link, drawn from `rng`.
cd sample_link_coefficient(const LinkStat& stat, std::mt19937_64& rng);

enum class KappaModel { Constant, LogNormal };

struct LinkBudgetConfig {
    double carrier_hz = 2e9;
    double subcarrier_spacing_hz = 30e3;
    double noise_figure_db = 7.0;
    double antenna_temperature_k = 290.0;
    double tx_element_gain_dbi = 6.0;
    double rx_gain_dbi = 0.0;
    double p_tx_dbm = 35.0;          // per-satellite, per-subcarrier budget
    KappaModel kappa_model = KappaModel::LogNormal;
    double kappa_db = 25.0;          // Constant model value / LogNormal mean
    double kappa_std_db = 3.0;       // LogNormal spread
    double phase_error_variance = 0.5;

    void validate() const;
};

double free_space_path_loss_db(double range_km, double carrier_hz);
double noise_power_w(double temperature_k, double bandwidth_hz, double noise_figure_db);

/// Builds sCSI from per-link geometry (K x S, row-major as in ScenarioScsi).
/// gamma = N_T * G_tx,el * G_rx / FSPL: the array gain is carried by gamma because
/// the steering vector has unit norm.
ScenarioScsi link_budget_scsi(const std::vector<LinkGeometry>& geometry, int num_users, int num_sats,
                              const LinkBudgetConfig& config, const ArrayGeometry& array, std::uint64_t kappa_seed);

} // namespace satprec

#endif
