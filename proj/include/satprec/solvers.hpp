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


#ifndef SATPREC_SOLVERS_HPP
#define SATPREC_SOLVERS_HPP

#include "satprec/channel.hpp"
#include "satprec/factorization.hpp"
#include "satprec/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace satprec {

// Stacked precoders, one column per user: column k is [w_{1,k}; ...; w_{S,k}].
struct PrecoderSolution {
    int num_users = 0;
    int num_sats = 0;
    int n_t = 0;
    CMat w;
    RVec eta;
    RVec per_user_power;
    std::vector<bool> active;

    PrecoderSolution() = default;
    PrecoderSolution(int users, int sats, int nt);

    auto block(int s, int k) { return w.block(s * n_t, k, n_t, 1); }
    auto block(int s, int k) const { return w.block(s * n_t, k, n_t, 1); }
    /// Tr(W_s W_s^H).
    double satellite_power(int s) const;
};

// Virtual receivers and weights of the alternating optimisation. For the
// mean-channel variant `a` has a single row (scalar receivers).
struct AuxVars {
    CMat a;
    RVec u;
    RVec e_tilde;
};

enum class InitScheme { MatchedFilter, Random };
enum class LinearSolver { Structured, Dense };

struct SolverConfig {
    int i_max = 10;
    double chi = 1e-3;
    int i_max1 = 300;
    InitScheme init = InitScheme::MatchedFilter;
    std::uint64_t init_seed = 0;
    double ridge_floor = 1e-12;
    LinearSolver linear_solver = LinearSolver::Structured;
    double residual_tol = 1e-9;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;     // 0 = initial precoder
    double objective = 0.0; // sum beta (u e - log2 u) at the optimal receivers/weights
    double r_ap1 = 0.0;
    double r_ap2 = 0.0;
    std::vector<double> e_tilde;
};

struct ConvergenceTrace {
    std::vector<IterationRecord> records;
    int iterations = 0;
    long linear_solves = 0;
    long dense_fallbacks = 0;
    bool converged = false;
    bool breakdown = false;
    std::string breakdown_reason;
};

struct SolveResult {
    PrecoderSolution solution;
    AuxVars aux;             // receivers/weights used in the last precoder update
    ConvergenceTrace trace;
};

struct LinearSolveStats {
    long solves = 0;
    long dense_fallbacks = 0;
};

/// Matched filter to the stacked mean channel with ||w_k||^2 = P_k = sum_s P_s / K.
/// Users without a mean component get the steering direction of their strongest link.
PrecoderSolution init_precoder(const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors,
                               const SolverConfig& cfg = {});

/// a_k = Q_k w_k / (sum_{i != k} ||Q~_k w_i||^2 + ||Q_k w_k||^2 + sigma2).
CVec update_receiver(const CMat& w, int k, const CovarianceFactors& fk, double sigma2);

/// MSE of user k with the multi-output receiver a_k. Throws on a non-real result or e <= 0.
double mse_cdwmmse(const CMat& w, int k, const CVec& a_k, const CovarianceFactors& fk, double sigma2);

// Xi_k = c_k Omega_k + sum_{i != k} c_i Omega~_i, c_i = beta_i u_i ||a_i||^2.
// Held as B = sum_i c_i Omega~_i (block diagonal, eigendecomposed per satellite)
// plus the rank-(S+1) user correction c_k (Omega_k - Omega~_k).
class XiSystem {
public:
    XiSystem(const std::vector<CovarianceFactors>& factors, const std::vector<double>& coeff);

    int dim() const { return num_sats_ * n_t_; }
    CVec apply(int k, const CVec& x) const;
    CMat dense(int k) const;
    /// (Xi_k + mu I)^{-1} d.
    CVec solve(int k, double mu, const CVec& d, const SolverConfig& cfg, LinearSolveStats& stats) const;

private:
    CVec apply_block(const CVec& x, double mu) const;
    CVec solve_block(const CVec& x, double mu) const;
    CVec solve_dense(int k, double mu, const CVec& d, const SolverConfig& cfg) const;

    const std::vector<CovarianceFactors>* factors_;
    std::vector<double> coeff_;
    int num_sats_ = 0;
    int n_t_ = 0;
    std::vector<CMat> eigvec_;
    std::vector<RVec> eigval_;
};

struct ClosedFormResult {
    CVec w;
    double eta = 0.0;
    bool active = false;
};

/// w = eta (Xi_k + mu I)^{-1} rhs with eta = sqrt(P_k / ||.||^2). A zero right-hand
/// side gives a zero precoder and active = false.
ClosedFormResult closed_form_precoder(const XiSystem& xi, int k, const CVec& rhs, double mu, double p_k,
                                      const SolverConfig& cfg, LinearSolveStats& stats);

/// Convenience form: rhs = beta u Q^H a, mu = beta u ||a||^2 sigma2 / P_k.
ClosedFormResult closed_form_precoder(const XiSystem& xi, int k, const CovarianceFactors& fk, const CVec& a_k,
                                      double u_k, double beta_k, double sigma2_k, double p_k,
                                      const SolverConfig& cfg, LinearSolveStats& stats);

/// W_s <- min(sqrt(P_s / ||W_s||_F^2), 1) W_s.
void project_per_satellite(PrecoderSolution& sol, const std::vector<double>& power_budget);

/// sum beta (u e - log2 u) with optimal u = 1/e, i.e. sum beta (1 + log2 e).
double wmmse_objective(const std::vector<double>& weights, const std::vector<double>& e_tilde);

SolveResult solve_ms_jocdwm(const ScenarioScsi& scsi, const SolverConfig& cfg = {});
SolveResult solve_ms_jowm(const ScenarioScsi& scsi, const SolverConfig& cfg = {});

enum class Baseline { SS_M, SS_WM, MS_SepWM };

/// Baselines on the mean channels. The single-satellite schemes use satellite 0
/// (the one closest to the region centre) with budget P_0.
SolveResult solve_baseline(const ScenarioScsi& scsi, Baseline which, const SolverConfig& cfg = {});

/// Sum-power WMMSE on an explicit mean channel matrix (rows h_k^T). Returns the
/// precoder (N x K) and appends its surrogate objective per iteration to `objective`.
CMat wmmse_mean_channel(const CMat& h, const std::vector<double>& noise, const std::vector<double>& weights,
                        double power, const SolverConfig& cfg, std::vector<double>* objective = nullptr,
                        int* iterations = nullptr, long* linear_solves = nullptr);

/// Regularised channel inversion h^H (h h^H + (sum sigma^2 / P) I)^{-1}, scaled to total power P.
CMat rzf_mean_channel(const CMat& h, const std::vector<double>& noise, double power);

} // namespace satprec

#endif
