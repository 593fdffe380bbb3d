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

#include "satprec/ofdm.hpp"

#include <cmath>
#include <random>

using namespace satprec;

namespace {

// Direct geometric sum (1/N) sum_i exp(j 2 pi i x / N), x = nu/df - offset.
cd ici_direct(double nu_bar, int offset, const OfdmParams& p) {
    const long double x = static_cast<long double>(nu_bar) / p.delta_f - offset;
    std::complex<long double> acc = 0.0L;
    for (int i = 0; i < p.n_subcarriers; ++i) {
        const long double ang = 2.0L * 3.14159265358979323846264338327950288L * i * x / p.n_subcarriers;
        acc += std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    acc /= static_cast<long double>(p.n_subcarriers);
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

CVec random_symbol(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVec x(n);
    for (int i = 0; i < n; ++i) x(i) = cd(g(rng), g(rng));
    return x;
}

} // namespace

TEST_CASE("phase_error_phi: trivial cases, unit modulus, exponent oracle") {
    OfdmParams p;
    CompensationError e;
    for (int n = 0; n < p.n_subcarriers; ++n) CHECK(std::abs(phase_error_phi(n, e, p) - cd(1.0, 0.0)) < 1e-15);
    e.tau_bar = 1e-9;
    CHECK(std::abs(phase_error_phi(0, e, p) - cd(1.0, 0.0)) < 1e-9);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        CompensationError r;
        r.tau_bar = u(rng) * p.t_cp();
        r.nu_cps = 40e3 * u(rng);
        const int n = static_cast<int>(rng() % static_cast<unsigned>(p.n_subcarriers));
        const cd phi = phase_error_phi(n, r, p);
        CHECK(std::abs(std::abs(phi) - 1.0) < 1e-15);
        // exponent assembled term by term in long double; ~3e4 cycles at 64-bit
        // mantissa leaves ~1e-14 rad of rounding between the two groupings
        const long double cycles = static_cast<long double>(p.f0) * r.tau_bar + static_cast<long double>(n) * p.delta_f * r.tau_bar -
                                   static_cast<long double>(r.nu_cps) * r.tau_bar;
        const long double ang = 2.0L * 3.14159265358979323846264338327950288L * (cycles - std::floor(cycles));
        CHECK(std::abs(phi - cd(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang)))) < 1e-13);
    }
}

TEST_CASE("ici_kernel: removable limit, orthogonality, direct-sum oracle") {
    OfdmParams p;
    CHECK(std::abs(ici_kernel(0.0, 0, p) - cd(1.0, 0.0)) < 1e-15);
    for (int off = 1; off < p.n_subcarriers; ++off) {
        CHECK(std::abs(ici_kernel(0.0, off, p)) < 1e-15);
        CHECK(std::abs(ici_kernel(0.0, -off, p)) < 1e-15);
    }
    CHECK(std::abs(ici_kernel(0.01 * p.delta_f, 0, p) - ici_direct(0.01 * p.delta_f, 0, p)) < 1e-12);
    // 100-point grid over (nu_bar, offset)
    for (int i = 0; i < 10; ++i)
        for (int off = -5; off < 5; ++off) {
            const double nu = (-0.95 + 0.2 * i) * p.delta_f;
            CHECK(std::abs(ici_kernel(nu, off, p) - ici_direct(nu, off, p)) < 1e-12);
        }
    CHECK_THROWS_AS(ici_kernel(0.0, p.n_subcarriers, p), Error);
}

TEST_CASE("ici_kernel: energy and periodicity") {
    OfdmParams p;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double nu = u(rng) * p.delta_f;
        for (int n = 0; n < p.n_subcarriers; ++n) {
            double e = 0.0;
            for (int j = 0; j < p.n_subcarriers; ++j) e += std::norm(ici_kernel(nu, j - n, p));
            CHECK(e <= 1.0 + 1e-9);
        }
        for (int off = -3; off <= 3; ++off)
            CHECK(std::abs(ici_kernel(nu + p.n_subcarriers * p.delta_f, off, p) - ici_kernel(nu, off, p)) < 1e-9);
    }
    double e0 = 0.0;
    for (int j = 0; j < p.n_subcarriers; ++j) e0 += std::norm(ici_kernel(0.0, j - 3, p));
    CHECK(std::abs(e0 - 1.0) < 1e-9);
}

TEST_CASE("classify_delay_case: the three cases and the sample decomposition") {
    OfdmParams p;
    CHECK(classify_delay_case(-p.t_cp() / 2, p).label == DelayCase::WithinCp);
    CHECK(classify_delay_case(p.t_s(), p).label == DelayCase::Late);
    CHECK(classify_delay_case(-(p.t_cp() + p.t_s()), p).label == DelayCase::BeyondCp);
    CHECK(classify_delay_case(0.0, p).label == DelayCase::WithinCp);
    const auto c = classify_delay_case(-1.4 * p.t_s(), p);
    CHECK(c.n_de == -1);
    CHECK(c.tau_hat == doctest::Approx(-0.4 * p.t_s()));
    const auto d = classify_delay_case(2.7 * p.t_s(), p);
    CHECK(d.n_de == 2);
    CHECK(d.tau_hat > 0.0);
    CHECK(std::abs(d.tau_hat) < p.t_s());
}

TEST_CASE("simulate_single_link: identity and pure delay reproduce the model exactly") {
    OfdmParams p;
    std::mt19937_64 rng(21);
    std::vector<CVec> tx{random_symbol(rng, 8), random_symbol(rng, 8), random_symbol(rng, 8)};
    const auto id = simulate_single_link(p, CompensationError{}, tx);
    for (std::size_t m = 0; m < tx.size(); ++m) CHECK((id[m] - tx[m]).norm() < 1e-9 * tx[m].norm());

    for (double frac : {0.1, 0.37, 0.5, 0.93}) {
        CompensationError e;
        e.tau_bar = -frac * p.t_cp();
        e.nu_cps = 12.5e3;
        const auto out = simulate_single_link(p, e, tx);
        for (std::size_t m = 0; m < tx.size(); ++m) {
            for (int n = 0; n < 8; ++n) CHECK(std::abs(out[m](n) - tx[m](n) * phase_error_phi(n, e, p)) < 1e-9 * tx[m].norm());
            CHECK((out[m] - analytic_link_model(p, e, tx[m])).norm() < 1e-9 * tx[m].norm());
        }
    }
}

TEST_CASE("simulate_single_link: residual Doppler matches the ICI model") {
    OfdmParams p;
    std::mt19937_64 rng(22);
    std::vector<CVec> tx{random_symbol(rng, 8), random_symbol(rng, 8)};
    for (double nu : {0.01, -0.2, 0.45}) {
        CompensationError e;
        e.tau_bar = -0.3 * p.t_cp();
        e.nu_bar = nu * p.delta_f;
        e.nu_cps = 30e3;
        const auto out = simulate_single_link(p, e, tx);
        for (std::size_t m = 0; m < tx.size(); ++m) {
            const cd common = std::polar(1.0, 2.0 * kPi * e.nu_bar * static_cast<double>(m) * p.t_sym());
            const CVec model = common * analytic_link_model(p, e, tx[m]);
            CHECK((out[m] - model).norm() < 1e-6 * model.norm());
        }
    }
}

TEST_CASE("simulate_single_link: rejects the ISI regimes") {
    OfdmParams p;
    std::vector<CVec> tx{CVec::Ones(8)};
    CompensationError late;
    late.tau_bar = p.t_s();
    CHECK_THROWS_AS(simulate_single_link(p, late, tx), Error);
    CompensationError early;
    early.tau_bar = -(p.t_cp() + p.t_s());
    CHECK_THROWS_AS(simulate_single_link(p, early, tx), Error);
    CompensationError fast;
    fast.nu_bar = p.delta_f;
    CHECK_THROWS_AS(simulate_single_link(p, fast, tx), Error);
}
