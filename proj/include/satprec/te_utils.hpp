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


#ifndef SATPREC_TE_UTILS_HPP
#define SATPREC_TE_UTILS_HPP

#include "satprec/channel.hpp"
#include "satprec/solvers.hpp"
#include "satprec/types.hpp"

#include <string>
#include <vector>

namespace satprec {

// Network-facing tensors: D is K x S x 5 with [gamma, kappa, theta_x, theta_y, phi_bar],
// F is K x 2 with [sigma2, beta], p holds the satellite budgets.
struct MappingInputs {
    int num_users = 0;
    int num_sats = 0;
    ArrayGeometry array;
    std::vector<double> d;   // row-major K x S x 5
    RMat f;
    RVec p;

    double& d_at(int k, int s, int c) { return d[static_cast<std::size_t>((k * num_sats + s) * 5 + c)]; }
    double d_at(int k, int s, int c) const { return d[static_cast<std::size_t>((k * num_sats + s) * 5 + c)]; }
};

// a_bar row k = u_k a_k^T, u_bar_k = u_k ||a_k||^2.
struct MappingLabels {
    CMat a_bar;  // K x (S+1)
    RVec u_bar;  // K
};

MappingInputs mapping_inputs(const ScenarioScsi& scsi);
/// Scenario seen by the mapping; the phase variance is recovered from a real phi_bar.
ScenarioScsi scenario_from_inputs(const MappingInputs& in);
MappingLabels labels_from_aux(const AuxVars& aux);

/// Closed-form precoding from labels: one linear solve per user, eta normalisation,
/// per-satellite projection.
PrecoderSolution cfp(const MappingLabels& labels, const MappingInputs& inputs, const SolverConfig& cfg = {},
                     LinearSolveStats* stats = nullptr);

enum class MappingKind { Solver, Cfp };

struct EquivarianceReport {
    bool ok = false;
    double precoder_error = 0.0;  // max |W'_{s,k} - W_{pi_S(s), pi_K(k)}|, relative
    double label_error = 0.0;     // same for (A_bar, u_bar)
    double sum_rate_error = 0.0;  // |R' - R| / max(1, |R|)
};

/// Compares the mapping on (D, F, p) and on its permuted copy. New user k is old
/// user_perm[k]; new satellite s is old sat_perm[s].
EquivarianceReport check_equivariance(const ScenarioScsi& scsi, const std::vector<int>& user_perm,
                                      const std::vector<int>& sat_perm, MappingKind kind,
                                      const SolverConfig& cfg = {}, double tol = 1e-9);

enum class XiConvention { Printed, LeastSquares };

/// ||X - xi X_hat||_F^2 / (||X||_F^2 + eps) with xi = <X_hat, X>/<X, X> (printed) or
/// <X_hat, X>/<X_hat, X_hat> (least squares); <A, B> = Tr(A^H B).
double si_nmse(const CMat& x_hat, const CMat& x, XiConvention conv, double eps = 1e-8);
double vcossim(const CMat& x_hat, const CMat& x);

/// c * mean_k l(a_bar_k) + (1 - c) * l(u_bar) with l = si_nmse.
double combined_loss(const MappingLabels& predicted, const MappingLabels& target, XiConvention conv, double c = 0.5);

const char* to_string(XiConvention conv);

} // namespace satprec

#endif
