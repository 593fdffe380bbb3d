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


#include "satprec/ofdm.hpp"

#include <cmath>

namespace satprec {

namespace {

// exp(j 2 pi cycles), with the integer part removed in extended precision.
cd cis_cycles(long double cycles) {
    const long double frac = cycles - std::floor(cycles);
    return std::polar(1.0, static_cast<double>(2.0L * static_cast<long double>(kPi) * frac));
}

} // namespace

void OfdmParams::validate() const {
    require(n_subcarriers >= 2, "ofdm: need at least two subcarriers");
    require(n_cp >= 0 && n_cp < n_subcarriers, "ofdm: cyclic prefix must be shorter than the symbol");
    require(delta_f > 0.0, "ofdm: subcarrier spacing must be positive");
}

cd phase_error_phi(int n, const CompensationError& err, const OfdmParams& params) {
    const long double freq = static_cast<long double>(params.f0) + static_cast<long double>(n) * params.delta_f -
                             static_cast<long double>(err.nu_cps);
    return cis_cycles(freq * static_cast<long double>(err.tau_bar));
}

cd ici_kernel(double nu_bar, int offset, const OfdmParams& params) {
    const int n = params.n_subcarriers;
    require(std::abs(offset) < n, "ici_kernel: |offset| must be below N");
    const double x = nu_bar / params.delta_f - offset;
    const cd den = 1.0 - std::polar(1.0, 2.0 * kPi * x / n);
    if (std::abs(den) < 1e-3) {
        // Near the removable singularity: evaluate the finite geometric sum.
        const double m = std::round(x / n);
        if (std::abs(x - m * n) == 0.0) return {1.0, 0.0};
        cd acc{0.0, 0.0};
        for (int i = 0; i < n; ++i) acc += std::polar(1.0, 2.0 * kPi * i * x / n);
        return acc / static_cast<double>(n);
    }
    return (1.0 - std::polar(1.0, 2.0 * kPi * x)) / (static_cast<double>(n) * den);
}

DelayClass classify_delay_case(double tau_bar, const OfdmParams& params) {
    DelayClass c;
    const double ts = params.t_s();
    c.n_de = static_cast<long long>(std::trunc(tau_bar / ts));
    c.tau_hat = tau_bar - static_cast<double>(c.n_de) * ts;
    if (tau_bar > 0.0)
        c.label = DelayCase::Late;
    else if (-tau_bar < params.t_cp())
        c.label = DelayCase::WithinCp;
    else
        c.label = DelayCase::BeyondCp;
    return c;
}

std::vector<CVec> simulate_single_link(const OfdmParams& params, const CompensationError& err,
                                       std::span<const CVec> symbols, double tau_min_s) {
    params.validate();
    if (classify_delay_case(err.tau_bar, params).label != DelayCase::WithinCp)
        fail("simulate_single_link: delay error outside the cyclic prefix (ISI regime) is not modelled");
    require(std::abs(err.nu_bar) < params.delta_f, "simulate_single_link: residual Doppler must be below the subcarrier spacing");
    const int n = params.n_subcarriers;
    for (const auto& s : symbols) require(s.size() == n, "simulate_single_link: each symbol needs N entries");

    using ld = long double;
    const ld t_useful = params.t_useful(), t_sym = params.t_sym(), t_cp = params.t_cp(), ts = params.t_s();
    const ld f0 = params.f0, df = params.delta_f;
    const ld tau_min = tau_min_s;
    const ld tau_cps = tau_min + static_cast<ld>(err.tau_bar);
    const ld nu_cps = err.nu_cps;
    const ld nu_sat = static_cast<ld>(err.nu_bar) + nu_cps;
    const auto n_sym = static_cast<long long>(symbols.size());

    // Baseband transmit waveform with CP (symbol m occupies [m T_sym - T_cp, m T_sym + T)).
    auto baseband = [&](ld t) -> cd {
        const long long m = static_cast<long long>(std::floor((t + t_cp) / t_sym));
        if (m < 0 || m >= n_sym) return {0.0, 0.0};
        ld local = t - static_cast<ld>(m) * t_sym;
        if (local < 0) local += t_useful;
        cd acc{0.0, 0.0};
        const CVec& x = symbols[static_cast<std::size_t>(m)];
        for (int k = 0; k < n; ++k) acc += x(k) * cis_cycles(static_cast<ld>(k) * df * local);
        return acc;
    };
    auto passband = [&](ld t) { return cis_cycles(f0 * t) * baseband(t); };
    auto precompensated = [&](ld t) { return passband(t + tau_cps) * cis_cycles(-(t + tau_cps) * nu_cps); };
    auto received = [&](ld t) { return precompensated(t - tau_min) * cis_cycles(nu_sat * t); };
    auto downconverted = [&](ld t) { return received(t) * cis_cycles(-f0 * t); };

    std::vector<CVec> out;
    out.reserve(symbols.size());
    CVec samples(n);
    for (long long m = 0; m < n_sym; ++m) {
        for (int i = 0; i < n; ++i) samples(i) = downconverted(static_cast<ld>(m) * t_sym + static_cast<ld>(i) * ts);
        CVec freq(n);
        for (int j = 0; j < n; ++j) {
            cd acc{0.0, 0.0};
            for (int i = 0; i < n; ++i) acc += samples(i) * std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long long>(i) * j) % n) / n);
            freq(j) = acc / static_cast<double>(n);
        }
        out.push_back(std::move(freq));
    }
    return out;
}

CVec analytic_link_model(const OfdmParams& params, const CompensationError& err, const CVec& symbol) {
    const int n = params.n_subcarriers;
    require(symbol.size() == n, "analytic_link_model: symbol needs N entries");
    CVec out = CVec::Zero(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(j) += symbol(k) * phase_error_phi(k, err, params) * ici_kernel(err.nu_bar, j - k, params);
    return out;
}

} // namespace satprec
