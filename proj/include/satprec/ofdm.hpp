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


#ifndef SATPREC_OFDM_HPP
#define SATPREC_OFDM_HPP

#include "satprec/types.hpp"

#include <span>
#include <vector>

namespace satprec {

struct OfdmParams {
    int n_subcarriers = 8;
    int n_cp = 2;
    double delta_f = 30e3;
    double f0 = 2e9;

    double t_s() const { return 1.0 / (n_subcarriers * delta_f); }
    double t_useful() const { return n_subcarriers * t_s(); }
    double t_cp() const { return n_cp * t_s(); }
    double t_sym() const { return t_useful() + t_cp(); }
    void validate() const;
};

// Residual errors after delay/Doppler precompensation of one link.
struct CompensationError {
    double tau_bar = 0.0; // tau_cps - tau_min, s
    double nu_bar = 0.0;  // nu_sat - nu_cps, Hz
    double nu_cps = 0.0;  // applied Doppler precompensation, Hz
};

/// exp(j 2 pi (f0 + n df - nu_cps) tau_bar).
cd phase_error_phi(int n, const CompensationError& err, const OfdmParams& params);

/// Dirichlet-type leakage (1/N)(1 - e^{j2pi x}) / (1 - e^{j2pi x/N}), x = nu_bar/df - offset.
/// Equals 1 at x = 0 (mod N).
cd ici_kernel(double nu_bar, int offset, const OfdmParams& params);

enum class DelayCase { WithinCp, BeyondCp, Late };

struct DelayClass {
    DelayCase label = DelayCase::WithinCp;
    long long n_de = 0;   // whole samples of delay error (truncated toward zero)
    double tau_hat = 0.0; // remainder, |tau_hat| < T_s, same sign as n_de
};

/// Case i: -T_cp < tau_bar <= 0 (no ISI). Case ii: tau_bar <= -T_cp. Case iii: tau_bar > 0.
DelayClass classify_delay_case(double tau_bar, const OfdmParams& params);

/// Waveform-level single-link simulation (IFFT, CP, upconversion, delay/Doppler
/// precompensation, LoS channel, downconversion, sampling, CP removal, DFT).
/// `symbols[m]` holds the N frequency-domain symbols of OFDM symbol m. Output
/// uses absolute time, so symbol m carries the common phase exp(j2pi nu_bar m T_sym).
/// Only the ISI-free regime (case i, |nu_bar| < df) is accepted.
std::vector<CVec> simulate_single_link(const OfdmParams& params, const CompensationError& err,
                                       std::span<const CVec> symbols, double tau_min_s = 2e-3);

/// Frequency-domain model: out[j] = sum_n x[n] phi^n psi(nu_bar, j - n).
CVec analytic_link_model(const OfdmParams& params, const CompensationError& err, const CVec& symbol);

} // namespace satprec

#endif
