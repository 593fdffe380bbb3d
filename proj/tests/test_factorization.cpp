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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "satprec/factorization.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace satprec;
using satprec::testing::RandomScenarioSpec;
using satprec::testing::random_scenario;
using satprec::testing::uniform;

namespace {

double rel_fro(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

CVec random_cvec(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = cd(g(rng), g(rng));
    return x;
}

// Covariance of the stacked channel written out entry by entry from the link statistics.
CMat omega_oracle(const ScenarioScsi& scsi, int k) {
    const int nt = scsi.array.n_t();
    CMat om(scsi.num_sats * nt, scsi.num_sats * nt);
    for (int s1 = 0; s1 < scsi.num_sats; ++s1)
        for (int s2 = 0; s2 < scsi.num_sats; ++s2) {
            const LinkStat& a = scsi.at(k, s1);
            const LinkStat& b = scsi.at(k, s2);
            const CVec v1 = steering_vector(a.theta_x, a.theta_y, scsi.array);
            const CVec v2 = steering_vector(b.theta_x, b.theta_y, scsi.array);
            const double ka = a.kappa, kb = b.kappa;
            // E{h1^*} E{h2^T} for distinct satellites; LoS amplitude sqrt(k g/(k+1)), phase pi/4
            const cd m1 = std::sqrt(ka * a.gamma / (ka + 1.0)) * std::polar(1.0, kPi / 4) * a.mean_phase;
            const cd m2 = std::sqrt(kb * b.gamma / (kb + 1.0)) * std::polar(1.0, kPi / 4) * b.mean_phase;
            for (int i = 0; i < nt; ++i)
                for (int j = 0; j < nt; ++j)
                    om(s1 * nt + i, s2 * nt + j) = s1 == s2 ? a.gamma * std::conj(v1(i)) * v1(j) : std::conj(m1 * v1(i)) * m2 * v2(j);
        }
    return om;
}

} // namespace

TEST_CASE("dense covariances agree with an entrywise oracle") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
        RandomScenarioSpec spec;
        spec.sats = 1 + t % 3;
        spec.zero_kappa_prob = 0.2;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        for (int k = 0; k < scsi.num_users; ++k) {
            const CMat oracle = omega_oracle(scsi, k);
            CHECK(rel_fro(dense_omega(scsi, k), oracle) < 1e-13);
            CMat tilde = CMat::Zero(oracle.rows(), oracle.cols());
            const int nt = scsi.array.n_t();
            for (int s = 0; s < scsi.num_sats; ++s) tilde.block(s * nt, s * nt, nt, nt) = oracle.block(s * nt, s * nt, nt, nt);
            CHECK(rel_fro(dense_omega_tilde(scsi, k), tilde) < 1e-13);
        }
    }
}

TEST_CASE("factor products reproduce both covariances") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 40; ++t) {
        RandomScenarioSpec spec;
        spec.sats = 1 + t % 5;
        spec.n_v = spec.n_h = (t % 4 == 0) ? 10 : 2;
        spec.users = 2;
        spec.zero_kappa_prob = 0.25;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        for (int k = 0; k < scsi.num_users; ++k) {
            const CovarianceFactors f = build_factors(scsi, k);
            const CMat q = f.dense_q(), qt = f.dense_q_tilde();
            CHECK(q.rows() == scsi.num_sats + 1);
            CHECK(qt.rows() == scsi.num_sats);
            CHECK(rel_fro(q.adjoint() * q, omega_oracle(scsi, k)) < 1e-10);
            CHECK(rel_fro(qt.adjoint() * qt, dense_omega_tilde(scsi, k)) < 1e-10);
        }
    }
}

TEST_CASE("coefficient identities: |c|^2 - |c~|^2 = -|rho|^2 and the kappa = 0 fallback") {
    std::mt19937_64 rng(33);
    RandomScenarioSpec spec;
    spec.users = 6;
    spec.sats = 4;
    spec.zero_kappa_prob = 0.3;
    const ScenarioScsi scsi = random_scenario(rng, spec);
    for (int k = 0; k < scsi.num_users; ++k) {
        const CovarianceFactors f = build_factors(scsi, k);
        for (int s = 0; s < scsi.num_sats; ++s) {
            const auto su = static_cast<std::size_t>(s);
            const LinkStat& st = scsi.at(k, s);
            const double r2 = std::norm(rho(st));
            if (st.kappa == 0.0) {
                CHECK(r2 == 0.0);
                CHECK(std::isinf(f.varkappa[su]));
                CHECK(std::norm(f.block_coeff[su]) == doctest::Approx(st.gamma).epsilon(1e-14));
                CHECK(std::norm(f.tilde_coeff[su]) == doctest::Approx(st.gamma).epsilon(1e-14));
            } else {
                const double diff = std::norm(f.block_coeff[su]) - std::norm(f.tilde_coeff[su]);
                CHECK(std::abs(diff + r2) < 1e-12 * st.gamma);
                // c and c~ share the phase of rho
                CHECK(std::abs(std::arg(f.block_coeff[su] / f.mean_coeff[su])) < 1e-12);
                CHECK(std::norm(f.tilde_coeff[su]) == doctest::Approx(st.gamma).epsilon(1e-12));
            }
            CHECK_FALSE(f.gamma_below_mean[su]);
        }
    }
}

TEST_CASE("gamma below |rho|^2 is clamped and flagged") {
    ScenarioScsi scsi(1, 1, ArrayGeometry{2, 2});
    LinkStat& st = scsi.at(0, 0);
    st.gamma = 1.0;
    // pure LoS with |E{phi}| a hair above 1 (allowed by the validation slack)
    st.kappa = std::numeric_limits<double>::infinity();
    st.mean_phase = cd(1.0 + 1e-13, 0.0);
    const CovarianceFactors f = build_factors(scsi, 0);
    CHECK(f.gamma_below_mean[0]);
    CHECK(f.varkappa[0] == 0.0);
    CHECK(std::abs(f.block_coeff[0]) == 0.0);
}

TEST_CASE("matrix-free operators match the dense factors") {
    std::mt19937_64 rng(34);
    for (int t = 0; t < 20; ++t) {
        RandomScenarioSpec spec;
        spec.sats = 1 + t % 5;
        spec.zero_kappa_prob = 0.2;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        const CovarianceFactors f = build_factors(scsi, t % scsi.num_users);
        const CMat q = f.dense_q(), qt = f.dense_q_tilde();
        const CVec w = random_cvec(rng, f.stacked_dim());
        const CVec a = random_cvec(rng, f.num_sats + 1);
        const CVec at = random_cvec(rng, f.num_sats);
        CHECK((f.q_apply(w) - q * w).norm() < 1e-12 * (q * w).norm());
        CHECK((f.q_tilde_apply(w) - qt * w).norm() < 1e-12 * (qt * w).norm());
        CHECK((f.q_adjoint(a) - q.adjoint() * a).norm() < 1e-12 * (q.adjoint() * a).norm());
        CHECK((f.q_tilde_adjoint(at) - qt.adjoint() * at).norm() < 1e-12 * (qt.adjoint() * at).norm());
        // <Q w, a> = <w, Q^H a>
        const cd lhs = a.dot(f.q_apply(w));
        const cd rhs = f.q_adjoint(a).dot(w);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs) + 1e-14);
        const CMat om = dense_omega(scsi, t % scsi.num_users);
        const double qf = (w.adjoint() * om * w)(0, 0).real();
        CHECK(quad_form(f, w, QuadFormKind::Full) == doctest::Approx(qf).epsilon(1e-10));
        const double qft = (w.adjoint() * dense_omega_tilde(scsi, t % scsi.num_users) * w)(0, 0).real();
        CHECK(quad_form(f, w, QuadFormKind::Block) == doctest::Approx(qft).epsilon(1e-10));
    }
}

TEST_CASE("block gains and per-user terms match dense quadratic forms") {
    std::mt19937_64 rng(35);
    for (int t = 0; t < 10; ++t) {
        RandomScenarioSpec spec;
        spec.users = 4;
        spec.sats = 3;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        const auto factors = build_all_factors(scsi);
        const auto bank = steering_bank(factors);
        CMat w(scsi.stacked_dim(), scsi.num_users);
        for (int k = 0; k < scsi.num_users; ++k) w.col(k) = random_cvec(rng, scsi.stacked_dim());
        const auto gains = block_gains(bank, w);
        for (int k = 0; k < scsi.num_users; ++k) {
            const UserTerms ut = user_terms(factors[static_cast<std::size_t>(k)], gains, k);
            const CMat om = dense_omega(scsi, k), omt = dense_omega_tilde(scsi, k);
            const double sig = (w.col(k).adjoint() * om * w.col(k))(0, 0).real();
            double intf = 0.0;
            for (int i = 0; i < scsi.num_users; ++i)
                if (i != k) intf += (w.col(i).adjoint() * omt * w.col(i))(0, 0).real();
            CHECK(ut.signal == doctest::Approx(sig).epsilon(1e-10));
            CHECK(ut.interference == doctest::Approx(intf).epsilon(1e-10));
            const cd mean_sig = factors[static_cast<std::size_t>(k)].mean.transpose() * w.col(k);
            CHECK(std::abs(ut.mean_signal - mean_sig) < 1e-12 * std::abs(mean_sig) + 1e-15);
        }
    }
}

TEST_CASE("cholesky_reference: exact on definite input, jitter-bounded on the rank-deficient covariance") {
    std::mt19937_64 rng(36);
    CMat a(6, 6);
    for (int i = 0; i < 6; ++i) a.col(i) = random_cvec(rng, 6);
    const CMat pd = a.adjoint() * a + CMat::Identity(6, 6);
    const CMat r = cholesky_reference(pd);
    CHECK(rel_fro(r.adjoint() * r, pd) < 1e-13);
    CHECK(r.isUpperTriangular(1e-14));

    RandomScenarioSpec spec;
    spec.sats = 3;
    const ScenarioScsi scsi = random_scenario(rng, spec);
    const CMat om = dense_omega(scsi, 0); // rank <= S + 1 out of S*N_T
    const CMat ro = cholesky_reference(om);
    CHECK((ro.adjoint() * ro - om).norm() <= 1e-12 * om.diagonal().real().maxCoeff() * std::sqrt(double(om.rows())) + 1e-12 * om.norm());

    CMat nh = pd;
    nh(0, 1) += cd(0.1, 0.0);
    CHECK_THROWS_AS(cholesky_reference(nh), Error);
}
