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


#ifndef SATPREC_FACTORIZATION_HPP
#define SATPREC_FACTORIZATION_HPP

#include "satprec/channel.hpp"
#include "satprec/types.hpp"

#include <vector>

namespace satprec {

// Low-rank factors of one user's channel covariance, stored row-sparse.
//
// Q (rows 0..S) has the stacked mean channel m^T = E{h^T} in row 0 and, in row
// s+1, c_s v_s^T placed in satellite block s. Q~ (rows 0..S-1) has c~_s v_s^T in
// block s. With c_s = varkappa_s rho_s and c~_s = varkappa~_s rho_s the products
// Q^H Q and Q~^H Q~ reproduce the full and block-diagonal covariances exactly.
struct CovarianceFactors {
    int num_sats = 0;
    int n_t = 0;
    CVec mean;                      // stacked E{h} (S*N_T)
    std::vector<CVec> directions;   // v_s per satellite (N_T)
    std::vector<cd> mean_coeff;     // rho_s, so the mean block is rho_s v_s
    std::vector<cd> block_coeff;    // c_s
    std::vector<cd> tilde_coeff;    // c~_s
    std::vector<double> varkappa;
    std::vector<double> varkappa_tilde;
    std::vector<bool> gamma_below_mean; // links with gamma < |rho|^2 (guarded, clamped to zero)

    int stacked_dim() const { return num_sats * n_t; }

    /// Q w (S+1 entries).
    CVec q_apply(const CVec& w) const;
    /// Q^H a (S*N_T entries).
    CVec q_adjoint(const CVec& a) const;
    /// Q~ w (S entries).
    CVec q_tilde_apply(const CVec& w) const;
    CVec q_tilde_adjoint(const CVec& a) const;

    /// v_s^T w_s for every satellite.
    CVec block_projections(const CVec& w) const;

    CMat dense_q() const;
    CMat dense_q_tilde() const;
};

enum class QuadFormKind { Full, Block };

CovarianceFactors build_factors(const ScenarioScsi& scsi, int user);
std::vector<CovarianceFactors> build_all_factors(const ScenarioScsi& scsi);

/// ||Q w||^2 (Full) or ||Q~ w||^2 (Block).
double quad_form(const CovarianceFactors& f, const CVec& w, QuadFormKind which);

/// Steering vectors of every user towards satellite s, as columns (N_T x K).
std::vector<CMat> steering_bank(const std::vector<CovarianceFactors>& factors);

/// g[s](k, i) = v_{s,k}^T w_{s,i}: all per-satellite link gains of a stacked precoder
/// (columns of `w` are users).
std::vector<CMat> block_gains(const std::vector<CMat>& bank, const CMat& w);

// Per-user quadratic forms derived from block gains.
struct UserTerms {
    CVec q_own;            // Q_k w_k
    cd mean_signal;        // E{h_k}^T w_k
    double signal = 0.0;   // ||Q_k w_k||^2
    double interference = 0.0; // sum_{i != k} ||Q~_k w_i||^2
};
UserTerms user_terms(const CovarianceFactors& fk, const std::vector<CMat>& gains, int k);

/// Dense covariances assembled block-by-block from covariance_block.
CMat dense_omega(const ScenarioScsi& scsi, int user);
CMat dense_omega_tilde(const ScenarioScsi& scsi, int user);

/// Upper-triangular R with R^H R = omega. Semidefinite inputs get diagonal jitter
/// of at most 1e-12 * max diagonal.
CMat cholesky_reference(const CMat& omega);

} // namespace satprec

#endif
