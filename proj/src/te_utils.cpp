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


#include "satprec/te_utils.hpp"

#include "satprec/factorization.hpp"
#include "satprec/rates.hpp"

#include <algorithm>
#include <cmath>

namespace satprec {

MappingInputs mapping_inputs(const ScenarioScsi& scsi) {
    MappingInputs in;
    in.num_users = scsi.num_users;
    in.num_sats = scsi.num_sats;
    in.array = scsi.array;
    in.d.assign(static_cast<std::size_t>(scsi.num_users * scsi.num_sats * 5), 0.0);
    in.f.resize(scsi.num_users, 2);
    in.p.resize(scsi.num_sats);
    for (int k = 0; k < scsi.num_users; ++k) {
        for (int s = 0; s < scsi.num_sats; ++s) {
            const LinkStat& st = scsi.at(k, s);
            require(std::abs(st.mean_phase.imag()) == 0.0, "mapping_inputs: mean phase factor must be real");
            in.d_at(k, s, 0) = st.gamma;
            in.d_at(k, s, 1) = st.kappa;
            in.d_at(k, s, 2) = st.theta_x;
            in.d_at(k, s, 3) = st.theta_y;
            in.d_at(k, s, 4) = st.mean_phase.real();
        }
        in.f(k, 0) = scsi.noise_power[static_cast<std::size_t>(k)];
        in.f(k, 1) = scsi.weights[static_cast<std::size_t>(k)];
    }
    for (int s = 0; s < scsi.num_sats; ++s) in.p(s) = scsi.power_budget[static_cast<std::size_t>(s)];
    return in;
}

ScenarioScsi scenario_from_inputs(const MappingInputs& in) {
    ScenarioScsi scsi(in.num_users, in.num_sats, in.array);
    for (int k = 0; k < in.num_users; ++k) {
        for (int s = 0; s < in.num_sats; ++s) {
            LinkStat& st = scsi.at(k, s);
            st.gamma = in.d_at(k, s, 0);
            st.kappa = in.d_at(k, s, 1);
            st.theta_x = in.d_at(k, s, 2);
            st.theta_y = in.d_at(k, s, 3);
            const double phi = in.d_at(k, s, 4);
            st.mean_phase = phi;
            st.phase_var = phi > 0.0 && phi <= 1.0 ? -2.0 * std::log(phi) : 0.0;
        }
        scsi.noise_power[static_cast<std::size_t>(k)] = in.f(k, 0);
        scsi.weights[static_cast<std::size_t>(k)] = in.f(k, 1);
    }
    for (int s = 0; s < in.num_sats; ++s) scsi.power_budget[static_cast<std::size_t>(s)] = in.p(s);
    return scsi;
}

MappingLabels labels_from_aux(const AuxVars& aux) {
    MappingLabels l;
    const auto nk = aux.a.cols();
    l.a_bar.resize(nk, aux.a.rows());
    l.u_bar.resize(nk);
    for (Eigen::Index k = 0; k < nk; ++k) {
        l.a_bar.row(k) = aux.u(k) * aux.a.col(k).transpose();
        l.u_bar(k) = aux.u(k) * aux.a.col(k).squaredNorm();
    }
    return l;
}

PrecoderSolution cfp(const MappingLabels& labels, const MappingInputs& inputs, const SolverConfig& cfg,
                     LinearSolveStats* stats) {
    const ScenarioScsi scsi = scenario_from_inputs(inputs);
    scsi.validate();
    const int nk = scsi.num_users;
    require(labels.a_bar.rows() == nk && labels.a_bar.cols() == scsi.num_sats + 1, "cfp: a_bar has the wrong shape");
    require(labels.u_bar.size() == nk, "cfp: u_bar has the wrong length");
    require(labels.a_bar.allFinite() && labels.u_bar.allFinite(), "cfp: labels must be finite");
    const std::vector<CovarianceFactors> factors = build_all_factors(scsi);
    PrecoderSolution sol(nk, scsi.num_sats, scsi.array.n_t());
    double total = 0.0;
    for (double p : scsi.power_budget) total += p;
    const double p_k = total / nk;

    std::vector<double> coeff(static_cast<std::size_t>(nk));
    for (int k = 0; k < nk; ++k) coeff[static_cast<std::size_t>(k)] = scsi.weights[static_cast<std::size_t>(k)] * labels.u_bar(k);
    const XiSystem xi(factors, coeff);
    LinearSolveStats local;
    for (int k = 0; k < nk; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const CVec a_bar = labels.a_bar.row(k).transpose();
        const CVec rhs = scsi.weights[ku] * factors[ku].q_adjoint(a_bar);
        const double mu = coeff[ku] * scsi.noise_power[ku] / p_k;
        const ClosedFormResult cf = closed_form_precoder(xi, k, rhs, mu, p_k, cfg, local);
        sol.w.col(k) = cf.w;
        sol.eta(k) = cf.eta;
        sol.per_user_power(k) = p_k;
        sol.active[ku] = cf.active;
    }
    project_per_satellite(sol, scsi.power_budget);
    if (stats) {
        stats->solves += local.solves;
        stats->dense_fallbacks += local.dense_fallbacks;
    }
    return sol;
}

namespace {

double rel_diff(const CMat& a, const CMat& b) {
    const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

struct MappingOutput {
    CMat w;
    MappingLabels labels;
    double sum_rate = 0.0;
};

} // namespace

EquivarianceReport check_equivariance(const ScenarioScsi& scsi, const std::vector<int>& user_perm,
                                      const std::vector<int>& sat_perm, MappingKind kind,
                                      const SolverConfig& cfg, double tol) {
    const ScenarioScsi perm = permute_scenario(scsi, user_perm, sat_perm);
    const int nk = scsi.num_users, ns = scsi.num_sats, nt = scsi.array.n_t();

    const SolveResult base = solve_ms_jocdwm(scsi, cfg);
    MappingOutput orig{base.solution.w, labels_from_aux(base.aux), 0.0};
    MappingOutput moved;
    if (kind == MappingKind::Solver) {
        const SolveResult r = solve_ms_jocdwm(perm, cfg);
        moved = {r.solution.w, labels_from_aux(r.aux), 0.0};
    } else {
        orig.w = cfp(orig.labels, mapping_inputs(scsi), cfg).w;
        // labels transform like the mapping outputs
        MappingLabels pl;
        pl.a_bar.resize(nk, ns + 1);
        pl.u_bar.resize(nk);
        for (int k = 0; k < nk; ++k) {
            const int ok = user_perm[static_cast<std::size_t>(k)];
            pl.a_bar(k, 0) = orig.labels.a_bar(ok, 0);
            for (int s = 0; s < ns; ++s) pl.a_bar(k, s + 1) = orig.labels.a_bar(ok, sat_perm[static_cast<std::size_t>(s)] + 1);
            pl.u_bar(k) = orig.labels.u_bar(ok);
        }
        moved = {cfp(pl, mapping_inputs(perm), cfg).w, pl, 0.0};
    }
    orig.sum_rate = rate_ap1(orig.w, scsi).sum_rate;
    moved.sum_rate = rate_ap1(moved.w, perm).sum_rate;

    CMat expect_w(ns * nt, nk);
    CMat expect_a(nk, ns + 1);
    CMat expect_u(nk, 1), got_u(nk, 1);
    for (int k = 0; k < nk; ++k) {
        const int ok = user_perm[static_cast<std::size_t>(k)];
        for (int s = 0; s < ns; ++s) {
            const int os = sat_perm[static_cast<std::size_t>(s)];
            expect_w.block(s * nt, k, nt, 1) = orig.w.block(os * nt, ok, nt, 1);
            expect_a(k, s + 1) = orig.labels.a_bar(ok, os + 1);
        }
        expect_a(k, 0) = orig.labels.a_bar(ok, 0);
        expect_u(k, 0) = orig.labels.u_bar(ok);
        got_u(k, 0) = moved.labels.u_bar(k);
    }
    EquivarianceReport rep;
    rep.precoder_error = rel_diff(moved.w, expect_w);
    rep.label_error = std::max(rel_diff(moved.labels.a_bar, expect_a), rel_diff(got_u, expect_u));
    rep.sum_rate_error = std::abs(moved.sum_rate - orig.sum_rate) / std::max(1.0, std::abs(orig.sum_rate));
    rep.ok = rep.precoder_error <= tol && rep.label_error <= tol && rep.sum_rate_error <= tol;
    return rep;
}

double si_nmse(const CMat& x_hat, const CMat& x, XiConvention conv, double eps) {
    require(x_hat.rows() == x.rows() && x_hat.cols() == x.cols(), "si_nmse: shape mismatch");
    const cd inner = (x_hat.adjoint() * x).trace();  // <X_hat, X>
    cd xi = 0.0;
    if (conv == XiConvention::Printed) {
        const double den = x.squaredNorm();
        if (den > 0.0) xi = inner / den;
    } else {
        const double den = x_hat.squaredNorm();
        if (den > 0.0) xi = inner / den;
    }
    return (x - xi * x_hat).squaredNorm() / (x.squaredNorm() + eps);
}

double vcossim(const CMat& x_hat, const CMat& x) {
    require(x_hat.rows() == x.rows() && x_hat.cols() == x.cols(), "vcossim: shape mismatch");
    const double na = x_hat.norm(), nb = x.norm();
    require(na > 0.0 && nb > 0.0, "vcossim: zero-norm input");
    return std::abs((x_hat.adjoint() * x).trace()) / (na * nb);
}

double combined_loss(const MappingLabels& predicted, const MappingLabels& target, XiConvention conv, double c) {
    require(predicted.a_bar.rows() == target.a_bar.rows() && predicted.a_bar.cols() == target.a_bar.cols(),
            "combined_loss: a_bar shape mismatch");
    require(predicted.u_bar.size() == target.u_bar.size(), "combined_loss: u_bar length mismatch");
    const auto nk = target.a_bar.rows();
    double la = 0.0;
    for (Eigen::Index k = 0; k < nk; ++k)
        la += si_nmse(CMat(predicted.a_bar.row(k)), CMat(target.a_bar.row(k)), conv);
    la /= static_cast<double>(std::max<Eigen::Index>(nk, 1));
    const double lu = si_nmse(CMat(predicted.u_bar.cast<cd>()), CMat(target.u_bar.cast<cd>()), conv);
    return c * la + (1.0 - c) * lu;
}

const char* to_string(XiConvention conv) { return conv == XiConvention::Printed ? "printed" : "least_squares"; }

} // namespace satprec
