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

#include "satprec/rates.hpp"
#include "satprec/solvers.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace satprec;
using satprec::testing::RandomScenarioSpec;
using satprec::testing::random_permutation;
using satprec::testing::random_scenario;
using satprec::testing::uniform;

namespace {

CVec random_cvec(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = cd(g(rng), g(rng));
    return x;
}

CMat random_precoder(std::mt19937_64& rng, const ScenarioScsi& scsi, double scale = 1.0) {
    CMat w(scsi.stacked_dim(), scsi.num_users);
    for (int k = 0; k < scsi.num_users; ++k) w.col(k) = scale * random_cvec(rng, scsi.stacked_dim());
    return w;
}

double quad(const CMat& m, const CVec& x) { return (x.adjoint() * m * x)(0, 0).real(); }

void make_deterministic(ScenarioScsi& scsi) {
    for (auto& st : scsi.stats) {
        st.kappa = std::numeric_limits<double>::infinity();
        st.phase_var = 0.0;
        st.mean_phase = 1.0;
    }
}

struct NaiveEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Separate sampler: full channel vectors, own RNG, Rician split written as LoS + CN(0, g/(k+1)).
NaiveEstimate naive_mc(const CMat& w, const ScenarioScsi& scsi, int trials, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    const int nt = scsi.array.n_t();
    std::vector<double> per_trial(static_cast<std::size_t>(trials), 0.0);
    for (int t = 0; t < trials; ++t) {
        for (int k = 0; k < scsi.num_users; ++k) {
            cd sig = 0.0;
            double intf = 0.0;
            for (int s = 0; s < scsi.num_sats; ++s) {
                const LinkStat& st = scsi.at(k, s);
                const double los_p = std::isinf(st.kappa) ? st.gamma : st.gamma * st.kappa / (1.0 + st.kappa);
                const double nlos_p = st.gamma - los_p;
                const double x = n01(rng), y = n01(rng), ph = n01(rng);
                const cd amp = std::sqrt(los_p) * cd(std::cos(kPi / 4), std::sin(kPi / 4)) + std::sqrt(nlos_p / 2.0) * cd(x, y);
                const cd phase = std::exp(cd(0.0, std::sqrt(st.phase_var) * ph));
                const CVec h = amp * phase * steering_vector(st.theta_x, st.theta_y, scsi.array);
                sig += h.dot(w.col(k).segment(s * nt, nt).conjugate());
                for (int i = 0; i < scsi.num_users; ++i)
                    if (i != k) intf += std::norm(h.dot(w.col(i).segment(s * nt, nt).conjugate()));
            }
            per_trial[static_cast<std::size_t>(t)] +=
                scsi.weights[static_cast<std::size_t>(k)] * std::log2(1.0 + std::norm(sig) / (intf + scsi.noise_power[static_cast<std::size_t>(k)]));
        }
    }
    NaiveEstimate e;
    for (double v : per_trial) e.mean += v;
    e.mean /= trials;
    double var = 0.0;
    for (double v : per_trial) var += (v - e.mean) * (v - e.mean);
    e.stderr_ = std::sqrt(var / (trials - 1) / trials);
    return e;
}

} // namespace

TEST_CASE("zero precoder gives zero rate for all three evaluators") {
    std::mt19937_64 rng(61);
    const ScenarioScsi scsi = random_scenario(rng, RandomScenarioSpec{});
    const CMat w = CMat::Zero(scsi.stacked_dim(), scsi.num_users);
    CHECK(rate_ap1(w, scsi).sum_rate == 0.0);
    CHECK(rate_ap2(w, scsi).sum_rate == 0.0);
    CHECK(rate_mc(w, scsi, 50, 3).sum_rate == 0.0);
}

TEST_CASE("rate_ap1 and rate_ap2 agree with dense-covariance oracles") {
    std::mt19937_64 rng(62);
    for (int t = 0; t < 20; ++t) {
        RandomScenarioSpec spec;
        spec.users = 2 + t % 4;
        spec.sats = 1 + t % 4;
        spec.zero_kappa_prob = 0.2;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        const CMat w = random_precoder(rng, scsi, 0.3);
        const RateReport ap1 = rate_ap1(w, scsi), ap2 = rate_ap2(w, scsi);
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < scsi.num_users; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const CMat om = dense_omega(scsi, k), omt = dense_omega_tilde(scsi, k);
            double intf = 0.0;
            for (int i = 0; i < scsi.num_users; ++i)
                if (i != k) intf += quad(omt, w.col(i));
            const double sig = quad(om, w.col(k));
            const double n = scsi.noise_power[ku];
            const double r1 = std::log2(1.0 + sig / (intf + n));
            // scalar receiver on the mean channel: e = 1 - |m^T w|^2 / load
            const cd mw = build_factors(scsi, k).mean.transpose() * w.col(k);
            const double load = intf + sig + n;
            const double r2 = std::log2(load / (load - std::norm(mw)));
            CHECK(std::abs(ap1.per_user_rate[ku] - r1) < 1e-9);
            CHECK(std::abs(ap2.per_user_rate[ku] - r2) < 1e-9);
            CHECK(ap2.per_user_rate[ku] <= ap1.per_user_rate[ku] + 1e-12);
            CHECK(ap1.per_user_rate[ku] >= 0.0);
            s1 += scsi.weights[ku] * r1;
            s2 += scsi.weights[ku] * r2;
        }
        CHECK(ap1.sum_rate == doctest::Approx(s1).epsilon(1e-12));
        CHECK(ap2.sum_rate == doctest::Approx(s2).epsilon(1e-12));
    }
}

TEST_CASE("deterministic channels: AP1 = AP2 = MC, and the single-link closed form") {
    std::mt19937_64 rng(63);
    for (int t = 0; t < 10; ++t) {
        RandomScenarioSpec spec;
        spec.users = 1 + t % 3;
        spec.sats = 1 + t % 3;
        ScenarioScsi scsi = random_scenario(rng, spec);
        make_deterministic(scsi);
        const CMat w = random_precoder(rng, scsi, 0.5);
        const double ap1 = rate_ap1(w, scsi).sum_rate;
        CHECK(std::abs(rate_ap2(w, scsi).sum_rate - ap1) < 1e-9);
        if (scsi.num_users == 1) {
            const RateReport mc = rate_mc(w, scsi, 7, 11);
            CHECK(std::abs(mc.sum_rate - ap1) < 1e-12 * std::max(1.0, ap1));
            CHECK(*mc.mc_stderr < 1e-12);
        }
    }
    ScenarioScsi one(1, 1, ArrayGeometry{4, 5});
    one.at(0, 0) = LinkStat{1.7, std::numeric_limits<double>::infinity(), 0.3, 1.2, 1.0, 0.0};
    one.noise_power[0] = 0.05;
    const double p = 2.5;
    const CMat w = std::sqrt(p) * steering_vector(0.3, 1.2, one.array).conjugate();
    CHECK(std::abs(rate_ap1(w, one).sum_rate - std::log2(1.0 + 1.7 * p / 0.05)) < 1e-12);
}

TEST_CASE("AP1 - AP2 gap grows with the phase-error variance") {
    std::mt19937_64 rng(64);
    RandomScenarioSpec spec;
    spec.users = 3;
    spec.sats = 3;
    ScenarioScsi scsi = random_scenario(rng, spec);
    for (auto& st : scsi.stats) st.kappa = 1e4;
    const CMat w = solve_ms_jocdwm(scsi).solution.w;
    double prev = -1.0;
    for (double var : {0.0, 0.1, 0.3, 0.6, 1.0}) {
        for (auto& st : scsi.stats) {
            st.phase_var = var;
            st.mean_phase = mean_phase_factor(var);
        }
        const double gap = rate_ap1(w, scsi).sum_rate - rate_ap2(w, scsi).sum_rate;
        CHECK(gap >= prev - 1e-12);
        prev = gap;
    }
    CHECK(prev > 0.0);
}

TEST_CASE("rate_mc matches an independently written naive sampler") {
    std::mt19937_64 rng(65);
    for (int t = 0; t < 3; ++t) {
        RandomScenarioSpec spec;
        spec.users = 2;
        spec.sats = 2;
        spec.kappa_max = 30.0;
        spec.zero_kappa_prob = t == 2 ? 0.5 : 0.0;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        const CMat w = solve_ms_jocdwm(scsi).solution.w;
        const RateReport mc = rate_mc(w, scsi, 20000, 100 + t);
        const NaiveEstimate nv = naive_mc(w, scsi, 20000, 500u + static_cast<unsigned>(t));
        const double se = std::sqrt(*mc.mc_stderr * *mc.mc_stderr + nv.stderr_ * nv.stderr_);
        CHECK(std::abs(mc.sum_rate - nv.mean) < 3.0 * se);
    }
}

TEST_CASE("rate_mc: Jensen bound for a signal-only user") {
    std::mt19937_64 rng(66);
    for (int t = 0; t < 5; ++t) {
        RandomScenarioSpec spec;
        spec.users = 1;
        spec.sats = 1 + t;
        spec.kappa_max = 10.0;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        const CMat w = random_precoder(rng, scsi, 0.5);
        const RateReport mc = rate_mc(w, scsi, 4000, 7);
        CHECK(mc.sum_rate <= rate_ap1(w, scsi).sum_rate + 3.0 * *mc.mc_stderr);
    }
}

TEST_CASE("rate_mc: bit-identical reruns and seed sensitivity") {
    std::mt19937_64 rng(67);
    RandomScenarioSpec spec;
    spec.users = 3;
    spec.sats = 2;
    const ScenarioScsi scsi = random_scenario(rng, spec);
    const CMat w = random_precoder(rng, scsi, 0.5);
    const RateReport a = rate_mc(w, scsi, 10000, 42), b = rate_mc(w, scsi, 10000, 42), c = rate_mc(w, scsi, 10000, 43);
    CHECK(a.sum_rate == b.sum_rate);
    CHECK(a.per_user_rate == b.per_user_rate);
    CHECK(*a.mc_stderr == *b.mc_stderr);
    CHECK(a.sum_rate != c.sum_rate);
    CHECK_THROWS_AS(rate_mc(w, scsi, 0, 1), Error);
}

TEST_CASE("all three evaluators are invariant under user and satellite permutation") {
    std::mt19937_64 rng(68);
    for (int t = 0; t < 20; ++t) {
        RandomScenarioSpec spec;
        spec.users = 4;
        spec.sats = 3;
        const ScenarioScsi scsi = random_scenario(rng, spec);
        const CMat w = random_precoder(rng, scsi, 0.5);
        const auto up = random_permutation(rng, scsi.num_users);
        const auto sp = random_permutation(rng, scsi.num_sats);
        const ScenarioScsi perm = permute_scenario(scsi, up, sp);
        const int nt = scsi.array.n_t();
        CMat wp(w.rows(), w.cols());
        for (int k = 0; k < scsi.num_users; ++k)
            for (int s = 0; s < scsi.num_sats; ++s)
                wp.col(k).segment(s * nt, nt) = w.col(up[static_cast<std::size_t>(k)]).segment(sp[static_cast<std::size_t>(s)] * nt, nt);
        const RateReport a1 = rate_ap1(w, scsi), b1 = rate_ap1(wp, perm);
        const RateReport a2 = rate_ap2(w, scsi), b2 = rate_ap2(wp, perm);
        const RateReport am = rate_mc(w, scsi, 300, 5), bm = rate_mc(wp, perm, 300, 5);
        CHECK(std::abs(a1.sum_rate - b1.sum_rate) < 1e-9);
        CHECK(std::abs(a2.sum_rate - b2.sum_rate) < 1e-9);
        CHECK(std::abs(am.sum_rate - bm.sum_rate) < 1e-12 * am.sum_rate);
        for (int k = 0; k < scsi.num_users; ++k) {
            const auto ku = static_cast<std::size_t>(k), ok = static_cast<std::size_t>(up[ku]);
            CHECK(std::abs(b1.per_user_rate[ku] - a1.per_user_rate[ok]) < 1e-9);
            CHECK(std::abs(b2.per_user_rate[ku] - a2.per_user_rate[ok]) < 1e-9);
            CHECK(std::abs(bm.per_user_rate[ku] - am.per_user_rate[ok]) < 1e-12 * std::max(1.0, am.per_user_rate[ok]));
        }
    }
}

TEST_CASE("dimension checks") {
    std::mt19937_64 rng(69);
    const ScenarioScsi scsi = random_scenario(rng, RandomScenarioSpec{});
    const CMat bad = CMat::Zero(scsi.stacked_dim() + 1, scsi.num_users);
    CHECK_THROWS_AS(rate_ap1(bad, scsi), Error);
    CHECK_THROWS_AS(rate_mc(bad, scsi, 10, 1), Error);
}
