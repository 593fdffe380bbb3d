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


#include "satprec/solvers.hpp"

#include <cmath>
#include <limits>

namespace satprec {

CMat rzf_mean_channel(const CMat& h, const std::vector<double>& noise, double power) {
    require(power > 0.0, "rzf: power must be positive");
    require(noise.size() == static_cast<std::size_t>(h.rows()), "rzf: noise count mismatch");
    double total_noise = 0.0;
    for (double s : noise) total_noise += s;
    CMat gram = h * h.adjoint();
    gram.diagonal().array() += total_noise / power;
    CMat w = h.adjoint() * gram.llt().solve(CMat::Identity(h.rows(), h.rows()));
    const double nrm2 = w.squaredNorm();
    if (nrm2 > 0.0) w *= std::sqrt(power / nrm2);
    return w;
}

CMat wmmse_mean_channel(const CMat& h, const std::vector<double>& noise, const std::vector<double>& weights,
                        double power, const SolverConfig& cfg, std::vector<double>* objective, int* iterations,
                        long* linear_solves) {
    const Eigen::Index nk = h.rows();
    CMat w = rzf_mean_channel(h, noise, power);
    std::vector<double> e(static_cast<std::size_t>(nk)), e_prev;
    int n = 0;
    long solves = 0;
    while (true) {
        const CMat hw = h * w;
        CVec g(nk);
        for (Eigen::Index k = 0; k < nk; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const double load = hw.row(k).squaredNorm() + noise[ku];
            g(k) = hw(k, k) / load;
            e[ku] = (load - std::norm(hw(k, k))) / load;
        }
        if (objective) objective->push_back(wmmse_objective(weights, e));
        if (n >= cfg.i_max1) break;
        if (!e_prev.empty()) {
            double gain = 0.0;
            for (std::size_t k = 0; k < e.size(); ++k) gain += weights[k] * std::log2(e_prev[k] / e[k]);
            if (gain <= cfg.chi) break;
        }
        e_prev = e;
        RVec d(nk);
        CVec rhs(nk);
        double mu = 0.0;
        for (Eigen::Index k = 0; k < nk; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const double u = 1.0 / e[ku];
            d(k) = weights[ku] * u * std::norm(g(k));
            rhs(k) = weights[ku] * u * g(k);
            mu += d(k) * noise[ku];
        }
        mu /= power;
        if (!(mu > 0.0)) break;
        // (H^H D H + mu I)^{-1} H^H diag(rhs) = H^H (D H H^H + mu I)^{-1} diag(rhs)
        CMat m = d.cast<cd>().asDiagonal() * (h * h.adjoint());
        m.diagonal().array() += mu;
        CMat w_bar = h.adjoint() * m.partialPivLu().solve(CMat(rhs.asDiagonal()));
        ++solves;
        ++n;
        const double nrm2 = w_bar.squaredNorm();
        if (!(nrm2 > 0.0) || !w_bar.allFinite()) break;
        w = std::sqrt(power / nrm2) * w_bar;
    }
    if (iterations) *iterations = n;
    if (linear_solves) *linear_solves = solves;
    return w;
}

namespace {

CMat mean_channel_matrix(const ScenarioScsi& scsi, int s) {
    const int nt = scsi.array.n_t();
    CMat h(scsi.num_users, nt);
    for (int k = 0; k < scsi.num_users; ++k) h.row(k) = mean_channel(scsi.at(k, s), scsi.array).transpose();
    return h;
}

} // namespace

SolveResult solve_baseline(const ScenarioScsi& scsi, Baseline which, const SolverConfig& cfg) {
    scsi.validate();
    cfg.validate();
    const int nt = scsi.array.n_t();
    SolveResult res;
    res.solution = PrecoderSolution(scsi.num_users, scsi.num_sats, nt);
    PrecoderSolution& sol = res.solution;
    ConvergenceTrace& trace = res.trace;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const int served = which == Baseline::MS_SepWM ? scsi.num_sats : 1;
    std::vector<double> objective;
    for (int s = 0; s < served; ++s) {
        const CMat h = mean_channel_matrix(scsi, s);
        const double p = scsi.power_budget[static_cast<std::size_t>(s)];
        CMat w;
        if (which == Baseline::SS_M) {
            w = rzf_mean_channel(h, scsi.noise_power, p);
            trace.linear_solves += 1;
        } else {
            int iters = 0;
            long solves = 0;
            std::vector<double>* obj = s == 0 ? &objective : nullptr;
            w = wmmse_mean_channel(h, scsi.noise_power, scsi.weights, p, cfg, obj, &iters, &solves);
            trace.iterations = std::max(trace.iterations, iters);
            trace.linear_solves += solves + 1;
        }
        sol.w.middleRows(s * nt, nt) = w;
    }
    for (std::size_t i = 0; i < objective.size(); ++i) {
        IterationRecord rec;
        rec.iteration = static_cast<int>(i);
        rec.objective = objective[i];
        rec.r_ap1 = nan;
        rec.r_ap2 = nan;
        trace.records.push_back(rec);
    }
    for (int k = 0; k < scsi.num_users; ++k) {
        sol.per_user_power(k) = sol.w.col(k).squaredNorm();
        sol.active[static_cast<std::size_t>(k)] = sol.per_user_power(k) > 0.0;
    }
    trace.converged = true;
    return res;
}

} // namespace satprec
