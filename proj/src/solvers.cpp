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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace satprec {

PrecoderSolution::PrecoderSolution(int users, int sats, int nt)
    : num_users(users), num_sats(sats), n_t(nt), w(CMat::Zero(sats * nt, users)), eta(RVec::Ones(users)),
      per_user_power(RVec::Zero(users)), active(static_cast<std::size_t>(users), true) {}

double PrecoderSolution::satellite_power(int s) const { return w.middleRows(s * n_t, n_t).squaredNorm(); }

void SolverConfig::validate() const {
    require(i_max >= 1, "solver: i_max must be >= 1");
    require(i_max1 >= 1, "solver: i_max1 must be >= 1");
    require(chi > 0.0, "solver: chi must be positive");
    require(ridge_floor >= 0.0, "solver: ridge_floor must be non-negative");
    require(residual_tol > 0.0, "solver: residual_tol must be positive");
}

PrecoderSolution init_precoder(const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors,
                               const SolverConfig& cfg) {
    const int nt = scsi.array.n_t();
    PrecoderSolution sol(scsi.num_users, scsi.num_sats, nt);
    double total = 0.0;
    for (double p : scsi.power_budget) total += p;
    const double p_k = total / scsi.num_users;
    std::mt19937_64 rng(cfg.init_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < scsi.num_users; ++k) {
        const CovarianceFactors& f = factors[static_cast<std::size_t>(k)];
        CVec w;
        if (cfg.init == InitScheme::Random) {
            w.resize(f.stacked_dim());
            for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = cd(gauss(rng), gauss(rng));
        } else if (f.mean.norm() > 0.0) {
            w = f.mean.conjugate();
        } else {
            // dominant eigenvector of blockdiag(gamma_s v* v^T); lowest s on ties
            int best = 0;
            for (int s = 1; s < scsi.num_sats; ++s)
                if (scsi.at(k, s).gamma > scsi.at(k, best).gamma) best = s;
            w = CVec::Zero(f.stacked_dim());
            w.segment(best * nt, nt) = f.directions[static_cast<std::size_t>(best)].conjugate();
        }
        sol.w.col(k) = std::sqrt(p_k) * w / w.norm();
        sol.per_user_power(k) = p_k;
    }
    return sol;
}

CVec update_receiver(const CMat& w, int k, const CovarianceFactors& fk, double sigma2) {
    require(k >= 0 && k < w.cols(), "update_receiver: user index out of range");
    const CVec qw = fk.q_apply(w.col(k));
    double interference = 0.0;
    for (Eigen::Index i = 0; i < w.cols(); ++i)
        if (i != k) interference += fk.q_tilde_apply(w.col(i)).squaredNorm();
    return qw / (interference + qw.squaredNorm() + sigma2);
}

double mse_cdwmmse(const CMat& w, int k, const CVec& a_k, const CovarianceFactors& fk, double sigma2) {
    require(k >= 0 && k < w.cols(), "mse_cdwmmse: user index out of range");
    require(a_k.size() == fk.num_sats + 1, "mse_cdwmmse: receiver dimension mismatch");
    const CVec qw = fk.q_apply(w.col(k));
    double load = qw.squaredNorm() + sigma2;
    for (Eigen::Index i = 0; i < w.cols(); ++i)
        if (i != k) load += fk.q_tilde_apply(w.col(i)).squaredNorm();
    const cd e = a_k.squaredNorm() * load - a_k.dot(qw) - qw.dot(a_k) + 1.0;
    if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e)))
        fail_numeric("mse_cdwmmse: MSE has a non-negligible imaginary part");
    if (!(e.real() > 0.0)) fail_numeric("mse_cdwmmse: non-positive MSE");
    return e.real();
}

XiSystem::XiSystem(const std::vector<CovarianceFactors>& factors, const std::vector<double>& coeff)
    : factors_(&factors), coeff_(coeff) {
    require(!factors.empty(), "XiSystem: no users");
    require(coeff.size() == factors.size(), "XiSystem: coefficient count mismatch");
    num_sats_ = factors.front().num_sats;
    n_t_ = factors.front().n_t;
    const auto nk = static_cast<Eigen::Index>(factors.size());
    eigvec_.resize(static_cast<std::size_t>(num_sats_));
    eigval_.resize(static_cast<std::size_t>(num_sats_));
    for (int s = 0; s < num_sats_; ++s) {
        const auto su = static_cast<std::size_t>(s);
        CMat g(n_t_, nk);
        for (Eigen::Index i = 0; i < nk; ++i) {
            const CovarianceFactors& f = factors[static_cast<std::size_t>(i)];
            const double c = std::max(coeff[static_cast<std::size_t>(i)], 0.0);
            g.col(i) = (std::sqrt(c) * std::abs(f.tilde_coeff[su])) * f.directions[su].conjugate();
        }
        Eigen::SelfAdjointEigenSolver<CMat> eig(g * g.adjoint());
        if (eig.info() != Eigen::Success) fail_numeric("XiSystem: eigendecomposition failed");
        eigvec_[su] = eig.eigenvectors();
        eigval_[su] = eig.eigenvalues().cwiseMax(0.0);
    }
}

CVec XiSystem::apply_block(const CVec& x, double mu) const {
    CVec out(x.size());
    for (int s = 0; s < num_sats_; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const CVec t = eigvec_[su].adjoint() * x.segment(s * n_t_, n_t_);
        out.segment(s * n_t_, n_t_) = eigvec_[su] * (eigval_[su].array() + mu).matrix().cwiseProduct(t);
    }
    return out;
}

CVec XiSystem::solve_block(const CVec& x, double mu) const {
    CVec out(x.size());
    for (int s = 0; s < num_sats_; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const CVec t = eigvec_[su].adjoint() * x.segment(s * n_t_, n_t_);
        out.segment(s * n_t_, n_t_) = eigvec_[su] * t.cwiseQuotient((eigval_[su].array() + mu).matrix().cast<cd>());
    }
    return out;
}

CVec XiSystem::apply(int k, const CVec& x) const {
    require(x.size() == dim(), "XiSystem: vector dimension mismatch");
    const CovarianceFactors& f = (*factors_)[static_cast<std::size_t>(k)];
    const double c = coeff_[static_cast<std::size_t>(k)];
    CVec out = apply_block(x, 0.0);
    // c_k (Omega_k - Omega~_k) x
    out += (c * cd(f.mean.transpose() * x)) * f.mean.conjugate();
    for (int s = 0; s < num_sats_; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const double diff = std::norm(f.block_coeff[su]) - std::norm(f.tilde_coeff[su]);
        const cd proj = f.directions[su].transpose() * x.segment(s * n_t_, n_t_);
        out.segment(s * n_t_, n_t_) += (c * diff * proj) * f.directions[su].conjugate();
    }
    return out;
}

CMat XiSystem::dense(int k) const {
    const CovarianceFactors& f = (*factors_)[static_cast<std::size_t>(k)];
    const double c = coeff_[static_cast<std::size_t>(k)];
    CMat xi = CMat::Zero(dim(), dim());
    for (int s = 0; s < num_sats_; ++s) {
        const auto su = static_cast<std::size_t>(s);
        xi.block(s * n_t_, s * n_t_, n_t_, n_t_) = eigvec_[su] * eigval_[su].cast<cd>().asDiagonal() * eigvec_[su].adjoint();
        const double diff = std::norm(f.block_coeff[su]) - std::norm(f.tilde_coeff[su]);
        xi.block(s * n_t_, s * n_t_, n_t_, n_t_) += (c * diff) * f.directions[su].conjugate() * f.directions[su].transpose();
    }
    xi += c * f.mean.conjugate() * f.mean.transpose();
    return 0.5 * (xi + xi.adjoint());
}

CVec XiSystem::solve_dense(int k, double mu, const CVec& d, const SolverConfig& cfg) const {
    CMat a = dense(k);
    const double scale = std::max(a.diagonal().real().maxCoeff(), mu);
    double jitter = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        CMat m = a;
        m.diagonal().array() += mu + jitter;
        Eigen::LLT<CMat> llt(m);
        if (llt.info() == Eigen::Success) return llt.solve(d);
        jitter = jitter == 0.0 ? std::max(cfg.ridge_floor, 1e-300) * scale : jitter * 10.0;
    }
    fail_numeric("XiSystem: dense factorisation failed");
}

CVec XiSystem::solve(int k, double mu, const CVec& d, const SolverConfig& cfg, LinearSolveStats& stats) const {
    require(d.size() == dim(), "XiSystem: right-hand side dimension mismatch");
    ++stats.solves;
    if (cfg.linear_solver == LinearSolver::Dense) return solve_dense(k, mu, d, cfg);

    const CovarianceFactors& f = (*factors_)[static_cast<std::size_t>(k)];
    const double c = coeff_[static_cast<std::size_t>(k)];
    double max_eig = 0.0;
    for (const RVec& e : eigval_) max_eig = std::max(max_eig, e.size() ? e.maxCoeff() : 0.0);
    const double shift = std::max(mu, cfg.ridge_floor * std::max(max_eig, 1.0));

    // Woodbury on (B + shift I) + U C U^H with U = [conj(m), blocks conj(v_s)].
    const int r = num_sats_ + 1;
    CMat y = CMat::Zero(dim(), r);
    RVec cdiag(r);
    y.col(0) = solve_block(f.mean.conjugate(), shift);
    cdiag(0) = c;
    for (int s = 0; s < num_sats_; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const CVec t = eigvec_[su].adjoint() * f.directions[su].conjugate();
        y.col(s + 1).segment(s * n_t_, n_t_) = eigvec_[su] * t.cwiseQuotient((eigval_[su].array() + shift).matrix().cast<cd>());
        cdiag(s + 1) = c * (std::norm(f.block_coeff[su]) - std::norm(f.tilde_coeff[su]));
    }
    // U^H z for z with the column structure of U
    auto u_adjoint = [&](const CVec& z) {
        CVec out(r);
        out(0) = f.mean.transpose() * z;
        for (int s = 0; s < num_sats_; ++s)
            out(s + 1) = f.directions[static_cast<std::size_t>(s)].transpose() * z.segment(s * n_t_, n_t_);
        return out;
    };
    const CVec z = solve_block(d, shift);
    CMat uy(r, r);
    for (int j = 0; j < r; ++j) uy.col(j) = u_adjoint(y.col(j));
    CMat small = cdiag.cast<cd>().asDiagonal() * uy;
    small.diagonal().array() += 1.0;
    const CVec rhs = cdiag.cast<cd>().cwiseProduct(u_adjoint(z));
    const CVec x = z - y * small.partialPivLu().solve(rhs);

    const CVec resid = apply(k, x) + shift * x - d;
    const double op_norm = max_eig + c * f.mean.squaredNorm() + cdiag.tail(num_sats_).cwiseAbs().maxCoeff() + shift;
    if (x.allFinite() && resid.norm() <= cfg.residual_tol * (op_norm * x.norm() + d.norm())) return x;
    ++stats.dense_fallbacks;
    return solve_dense(k, shift, d, cfg);
}

ClosedFormResult closed_form_precoder(const XiSystem& xi, int k, const CVec& rhs, double mu, double p_k,
                                      const SolverConfig& cfg, LinearSolveStats& stats) {
    require(p_k > 0.0, "closed_form_precoder: P_k must be positive");
    ClosedFormResult out;
    if (rhs.squaredNorm() == 0.0) {
        out.w = CVec::Zero(rhs.size());
        return out;
    }
    const CVec w_bar = xi.solve(k, mu, rhs, cfg, stats);
    const double nrm2 = w_bar.squaredNorm();
    if (!(nrm2 > 0.0) || !std::isfinite(nrm2)) fail_numeric("closed_form_precoder: degenerate solution");
    out.eta = std::sqrt(p_k / nrm2);
    out.w = out.eta * w_bar;
    out.active = true;
    return out;
}

ClosedFormResult closed_form_precoder(const XiSystem& xi, int k, const CovarianceFactors& fk, const CVec& a_k,
                                      double u_k, double beta_k, double sigma2_k, double p_k,
                                      const SolverConfig& cfg, LinearSolveStats& stats) {
    const CVec rhs = (beta_k * u_k) * fk.q_adjoint(a_k);
    const double mu = beta_k * u_k * a_k.squaredNorm() * sigma2_k / p_k;
    return closed_form_precoder(xi, k, rhs, mu, p_k, cfg, stats);
}

void project_per_satellite(PrecoderSolution& sol, const std::vector<double>& power_budget) {
    require(power_budget.size() == static_cast<std::size_t>(sol.num_sats), "project_per_satellite: budget count mismatch");
    for (int s = 0; s < sol.num_sats; ++s) {
        const double p = sol.satellite_power(s);
        const double budget = power_budget[static_cast<std::size_t>(s)];
        if (p > budget) sol.w.middleRows(s * sol.n_t, sol.n_t) *= std::sqrt(budget / p);
    }
}

double wmmse_objective(const std::vector<double>& weights, const std::vector<double>& e_tilde) {
    double obj = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) obj += weights[k] * (1.0 + std::log2(e_tilde[k]));
    return obj;
}

namespace {

struct IterateState {
    std::vector<CVec> a;      // receivers (S+1 or 1 entries)
    std::vector<double> e;    // MSE of the solver's own formulation
    IterationRecord record;
};

// Receivers, MSEs and both rate surrogates of the current precoder.
IterateState evaluate_iterate(const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors,
                              const std::vector<CMat>& bank, const CMat& w, bool multi_output) {
    const int nk = scsi.num_users;
    IterateState st;
    st.a.resize(static_cast<std::size_t>(nk));
    st.e.resize(static_cast<std::size_t>(nk));
    const std::vector<CMat> gains = block_gains(bank, w);
    for (int k = 0; k < nk; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const UserTerms t = user_terms(factors[ku], gains, k);
        const double sigma2 = scsi.noise_power[ku], beta = scsi.weights[ku];
        const double load = t.interference + t.signal + sigma2;
        const double e_full = (t.interference + sigma2) / load;
        const double e_mean = std::max(load - std::norm(t.mean_signal), t.interference + sigma2) / load;
        st.record.r_ap1 += beta * std::log2(1.0 / e_full);
        st.record.r_ap2 += beta * std::log2(1.0 / e_mean);
        if (multi_output) {
            st.a[ku] = t.q_own / load;
            st.e[ku] = e_full;
        } else {
            st.a[ku] = CVec::Constant(1, t.mean_signal / load);
            st.e[ku] = e_mean;
        }
    }
    st.record.objective = wmmse_objective(scsi.weights, st.e);
    st.record.e_tilde = st.e;
    return st;
}

SolveResult run_alternating(const ScenarioScsi& scsi, const SolverConfig& cfg, bool multi_output) {
    scsi.validate();
    cfg.validate();
    const int nk = scsi.num_users;
    const std::vector<CovarianceFactors> factors = build_all_factors(scsi);
    const std::vector<CMat> bank = steering_bank(factors);

    SolveResult res;
    res.solution = init_precoder(scsi, factors, cfg);
    PrecoderSolution& sol = res.solution;
    ConvergenceTrace& trace = res.trace;
    LinearSolveStats stats;

    std::vector<double> e_prev;
    IterateState cur = evaluate_iterate(scsi, factors, bank, sol.w, multi_output);
    int n = 0;
    while (true) {
        cur.record.iteration = n;
        trace.records.push_back(cur.record);
        if (n >= cfg.i_max) break;
        // The first comparison needs two computed MSE sets; before that the loop always runs.
        if (!e_prev.empty()) {
            double gain = 0.0;
            for (int k = 0; k < nk; ++k)
                gain += scsi.weights[static_cast<std::size_t>(k)] * std::log2(e_prev[static_cast<std::size_t>(k)] / cur.e[static_cast<std::size_t>(k)]);
            if (gain <= cfg.chi) {
                trace.converged = true;
                break;
            }
        }
        ++n;
        e_prev = cur.e;

        std::vector<double> coeff(static_cast<std::size_t>(nk));
        AuxVars aux;
        aux.a = CMat::Zero(multi_output ? scsi.num_sats + 1 : 1, nk);
        aux.u = RVec(nk);
        aux.e_tilde = RVec(nk);
        for (int k = 0; k < nk; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            aux.e_tilde(k) = cur.e[ku];
            aux.u(k) = 1.0 / cur.e[ku];
            aux.a.col(k) = cur.a[ku];
            coeff[ku] = scsi.weights[ku] * aux.u(k) * cur.a[ku].squaredNorm();
        }
        const XiSystem xi(factors, coeff);
        for (int k = 0; k < nk; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const CovarianceFactors& f = factors[ku];
            const double bu = scsi.weights[ku] * aux.u(k);
            const CVec rhs = multi_output ? CVec(bu * f.q_adjoint(cur.a[ku])) : CVec((bu * cur.a[ku](0)) * f.mean.conjugate());
            const double mu = coeff[ku] * scsi.noise_power[ku] / sol.per_user_power(k);
            const ClosedFormResult cf = closed_form_precoder(xi, k, rhs, mu, sol.per_user_power(k), cfg, stats);
            sol.w.col(k) = cf.w;
            sol.eta(k) = cf.eta;
            sol.active[ku] = cf.active;
        }
        res.aux = std::move(aux);
        if (!sol.w.allFinite()) {
            trace.breakdown = true;
            trace.breakdown_reason = "non-finite precoder";
            break;
        }
        cur = evaluate_iterate(scsi, factors, bank, sol.w, multi_output);
    }
    trace.iterations = n;
    trace.linear_solves = stats.solves;
    trace.dense_fallbacks = stats.dense_fallbacks;
    if (trace.breakdown) sol.w.setZero();
    project_per_satellite(sol, scsi.power_budget);
    return res;
}

} // namespace

SolveResult solve_ms_jocdwm(const ScenarioScsi& scsi, const SolverConfig& cfg) { return run_alternating(scsi, cfg, true); }

SolveResult solve_ms_jowm(const ScenarioScsi& scsi, const SolverConfig& cfg) { return run_alternating(scsi, cfg, false); }

} // namespace satprec
