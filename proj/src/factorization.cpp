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


#include "satprec/factorization.hpp"

#include <cmath>
#include <limits>

namespace satprec {

CVec CovarianceFactors::block_projections(const CVec& w) const {
    require(w.size() == stacked_dim(), "CovarianceFactors: vector dimension mismatch");
    CVec p(num_sats);
    for (int s = 0; s < num_sats; ++s) p(s) = directions[static_cast<std::size_t>(s)].transpose() * w.segment(s * n_t, n_t);
    return p;
}

CVec CovarianceFactors::q_apply(const CVec& w) const {
    const CVec p = block_projections(w);
    CVec out(num_sats + 1);
    out(0) = mean.transpose() * w;
    for (int s = 0; s < num_sats; ++s) out(s + 1) = block_coeff[static_cast<std::size_t>(s)] * p(s);
    return out;
}

CVec CovarianceFactors::q_adjoint(const CVec& a) const {
    require(a.size() == num_sats + 1, "CovarianceFactors: receiver dimension mismatch");
    CVec out = mean.conjugate() * a(0);
    for (int s = 0; s < num_sats; ++s)
        out.segment(s * n_t, n_t) += (std::conj(block_coeff[static_cast<std::size_t>(s)]) * a(s + 1)) *
                                     directions[static_cast<std::size_t>(s)].conjugate();
    return out;
}

CVec CovarianceFactors::q_tilde_apply(const CVec& w) const {
    CVec p = block_projections(w);
    for (int s = 0; s < num_sats; ++s) p(s) *= tilde_coeff[static_cast<std::size_t>(s)];
    return p;
}

CVec CovarianceFactors::q_tilde_adjoint(const CVec& a) const {
    require(a.size() == num_sats, "CovarianceFactors: receiver dimension mismatch");
    CVec out = CVec::Zero(stacked_dim());
    for (int s = 0; s < num_sats; ++s)
        out.segment(s * n_t, n_t) = (std::conj(tilde_coeff[static_cast<std::size_t>(s)]) * a(s)) *
                                    directions[static_cast<std::size_t>(s)].conjugate();
    return out;
}

CMat CovarianceFactors::dense_q() const {
    CMat q = CMat::Zero(num_sats + 1, stacked_dim());
    q.row(0) = mean.transpose();
    for (int s = 0; s < num_sats; ++s)
        q.block(s + 1, s * n_t, 1, n_t) = block_coeff[static_cast<std::size_t>(s)] * directions[static_cast<std::size_t>(s)].transpose();
    return q;
}

CMat CovarianceFactors::dense_q_tilde() const {
    CMat q = CMat::Zero(num_sats, stacked_dim());
    for (int s = 0; s < num_sats; ++s)
        q.block(s, s * n_t, 1, n_t) = tilde_coeff[static_cast<std::size_t>(s)] * directions[static_cast<std::size_t>(s)].transpose();
    return q;
}

CovarianceFactors build_factors(const ScenarioScsi& scsi, int user) {
    require(user >= 0 && user < scsi.num_users, "build_factors: user index out of range");
    CovarianceFactors f;
    f.num_sats = scsi.num_sats;
    f.n_t = scsi.array.n_t();
    f.mean = CVec::Zero(f.stacked_dim());
    const auto ns = static_cast<std::size_t>(f.num_sats);
    f.directions.resize(ns);
    f.mean_coeff.resize(ns);
    f.block_coeff.resize(ns);
    f.tilde_coeff.resize(ns);
    f.varkappa.resize(ns);
    f.varkappa_tilde.resize(ns);
    f.gamma_below_mean.assign(ns, false);
    for (int s = 0; s < f.num_sats; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const LinkStat& st = scsi.at(user, s);
        const CVec v = steering_vector(st.theta_x, st.theta_y, scsi.array);
        const cd r = rho(st);
        const double r2 = std::norm(r);
        f.directions[su] = v;
        f.mean_coeff[su] = r;
        f.mean.segment(s * f.n_t, f.n_t) = r * v;
        if (r2 > 0.0) {
            double ratio = st.gamma / r2 - 1.0;
            if (ratio < 0.0) {
                f.gamma_below_mean[su] = true;
                ratio = 0.0;
            }
            f.varkappa[su] = std::sqrt(ratio);
            f.varkappa_tilde[su] = std::sqrt(st.gamma / r2);
            f.block_coeff[su] = f.varkappa[su] * r;
            f.tilde_coeff[su] = f.varkappa_tilde[su] * r;
        } else {
            // No mean component: the scattered part carries all of gamma.
            f.varkappa[su] = std::numeric_limits<double>::infinity();
            f.varkappa_tilde[su] = std::numeric_limits<double>::infinity();
            f.block_coeff[su] = std::sqrt(st.gamma);
            f.tilde_coeff[su] = std::sqrt(st.gamma);
        }
    }
    return f;
}

std::vector<CovarianceFactors> build_all_factors(const ScenarioScsi& scsi) {
    std::vector<CovarianceFactors> out;
    out.reserve(static_cast<std::size_t>(scsi.num_users));
    for (int k = 0; k < scsi.num_users; ++k) out.push_back(build_factors(scsi, k));
    return out;
}

std::vector<CMat> steering_bank(const std::vector<CovarianceFactors>& factors) {
    require(!factors.empty(), "steering_bank: no users");
    const int ns = factors.front().num_sats, nt = factors.front().n_t;
    const int nk = static_cast<int>(factors.size());
    std::vector<CMat> bank(static_cast<std::size_t>(ns), CMat(nt, nk));
    for (int s = 0; s < ns; ++s)
        for (int k = 0; k < nk; ++k) bank[static_cast<std::size_t>(s)].col(k) = factors[static_cast<std::size_t>(k)].directions[static_cast<std::size_t>(s)];
    return bank;
}

std::vector<CMat> block_gains(const std::vector<CMat>& bank, const CMat& w) {
    std::vector<CMat> g(bank.size());
    if (bank.empty()) return g;
    const auto nt = bank.front().rows();
    require(w.rows() == nt * static_cast<Eigen::Index>(bank.size()), "block_gains: precoder dimension mismatch");
    for (std::size_t s = 0; s < bank.size(); ++s)
        g[s].noalias() = bank[s].transpose() * w.middleRows(static_cast<Eigen::Index>(s) * nt, nt);
    return g;
}

UserTerms user_terms(const CovarianceFactors& fk, const std::vector<CMat>& gains, int k) {
    UserTerms t;
    t.q_own = CVec::Zero(fk.num_sats + 1);
    const auto nk = gains.front().cols();
    for (int s = 0; s < fk.num_sats; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const cd gkk = gains[su](k, k);
        t.q_own(0) += fk.mean_coeff[su] * gkk;
        t.q_own(s + 1) = fk.block_coeff[su] * gkk;
        double row = 0.0;
        for (Eigen::Index i = 0; i < nk; ++i)
            if (i != k) row += std::norm(gains[su](k, i));
        t.interference += std::norm(fk.tilde_coeff[su]) * row;
    }
    t.mean_signal = t.q_own(0);
    t.signal = t.q_own.squaredNorm();
    return t;
}

double quad_form(const CovarianceFactors& f, const CVec& w, QuadFormKind which) {
    return which == QuadFormKind::Full ? f.q_apply(w).squaredNorm() : f.q_tilde_apply(w).squaredNorm();
}

CMat dense_omega(const ScenarioScsi& scsi, int user) {
    const int nt = scsi.array.n_t(), ns = scsi.num_sats;
    CMat omega(ns * nt, ns * nt);
    for (int s1 = 0; s1 < ns; ++s1)
        for (int s2 = 0; s2 < ns; ++s2)
            omega.block(s1 * nt, s2 * nt, nt, nt) = covariance_block(scsi.at(user, s1), scsi.at(user, s2), s1 == s2, scsi.array);
    return omega;
}

CMat dense_omega_tilde(const ScenarioScsi& scsi, int user) {
    const int nt = scsi.array.n_t(), ns = scsi.num_sats;
    CMat omega = CMat::Zero(ns * nt, ns * nt);
    for (int s = 0; s < ns; ++s)
        omega.block(s * nt, s * nt, nt, nt) = covariance_block(scsi.at(user, s), scsi.at(user, s), true, scsi.array);
    return omega;
}

CMat cholesky_reference(const CMat& omega) {
    require(omega.rows() == omega.cols(), "cholesky_reference: matrix must be square");
    const double scale = std::max(omega.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    require((omega - omega.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "cholesky_reference: matrix is not Hermitian");
    const double max_diag = omega.diagonal().real().maxCoeff();
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        CMat a = omega;
        a.diagonal().array() += jitter;
        Eigen::LLT<CMat> llt(a);
        if (llt.info() == Eigen::Success) return llt.matrixU();
        jitter = jitter == 0.0 ? 1e-16 * max_diag : jitter * 10.0;
        if (jitter > 1e-12 * max_diag) jitter = 1e-12 * max_diag;
    }
    fail_numeric("cholesky_reference: factorisation failed even with diagonal jitter");
}

} // namespace satprec
