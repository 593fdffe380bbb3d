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


#include "satprec/rates.hpp"

#include <cmath>
#include <random>

namespace satprec {

namespace {

RateReport surrogate(const CMat& w, const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors, RateKind kind) {
    scsi.validate();
    require(w.rows() == scsi.stacked_dim() && w.cols() == scsi.num_users, "rate: precoder dimension mismatch");
    require(factors.size() == static_cast<std::size_t>(scsi.num_users), "rate: factor count mismatch");
    const std::vector<CMat> gains = block_gains(steering_bank(factors), w);
    RateReport r;
    r.kind = kind;
    r.per_user_rate.resize(static_cast<std::size_t>(scsi.num_users));
    for (int k = 0; k < scsi.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const UserTerms t = user_terms(factors[ku], gains, k);
        const double floor = t.interference + scsi.noise_power[ku];
        double rate;
        if (kind == RateKind::AP1) {
            rate = std::log2(1.0 + t.signal / floor);
        } else {
            const double sig = std::norm(t.mean_signal);
            const double den = std::max(t.interference + t.signal + scsi.noise_power[ku] - sig, floor);
            rate = std::log2(1.0 + sig / den);
        }
        r.per_user_rate[ku] = rate;
        r.sum_rate += scsi.weights[ku] * rate;
    }
    return r;
}

} // namespace

RateReport rate_ap1(const CMat& w, const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors) {
    return surrogate(w, scsi, factors, RateKind::AP1);
}
RateReport rate_ap1(const CMat& w, const ScenarioScsi& scsi) { return rate_ap1(w, scsi, build_all_factors(scsi)); }

RateReport rate_ap2(const CMat& w, const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors) {
    return surrogate(w, scsi, factors, RateKind::AP2);
}
RateReport rate_ap2(const CMat& w, const ScenarioScsi& scsi) { return rate_ap2(w, scsi, build_all_factors(scsi)); }

RateReport rate_mc(const CMat& w, const ScenarioScsi& scsi, int n_trials, std::uint64_t seed) {
    scsi.validate();
    require(n_trials >= 1, "rate_mc: n_trials must be >= 1");
    require(w.rows() == scsi.stacked_dim() && w.cols() == scsi.num_users, "rate_mc: precoder dimension mismatch");
    const int nk = scsi.num_users, ns = scsi.num_sats, nt = scsi.array.n_t();
    const auto nn = static_cast<std::size_t>(n_trials);

    // own[s][k] = v_{s,k}^T w_{s,k}; leak[s][k] = sum_{i != k} |v_{s,k}^T w_{s,i}|^2
    std::vector<CVec> own(static_cast<std::size_t>(ns), CVec(nk));
    std::vector<RVec> leak(static_cast<std::size_t>(ns), RVec(nk));
    for (int s = 0; s < ns; ++s) {
        CMat v(nt, nk);
        for (int k = 0; k < nk; ++k) v.col(k) = steering_vector(scsi.at(k, s).theta_x, scsi.at(k, s).theta_y, scsi.array);
        const CMat g = v.transpose() * w.middleRows(s * nt, nt);
        for (int k = 0; k < nk; ++k) {
            own[static_cast<std::size_t>(s)](k) = g(k, k);
            leak[static_cast<std::size_t>(s)](k) = g.row(k).squaredNorm() - std::norm(g(k, k));
        }
    }

    RateReport r;
    r.kind = RateKind::MC;
    r.per_user_rate.assign(static_cast<std::size_t>(nk), 0.0);
    std::vector<double> weighted(nn, 0.0);
    std::vector<cd> coeff(nn * static_cast<std::size_t>(ns));
    for (int k = 0; k < nk; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        for (int s = 0; s < ns; ++s) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(scsi.sat_ids[static_cast<std::size_t>(s)]),
                              static_cast<std::uint32_t>(scsi.sat_ids[static_cast<std::size_t>(s)] >> 32),
                              static_cast<std::uint32_t>(scsi.user_ids[ku]),
                              static_cast<std::uint32_t>(scsi.user_ids[ku] >> 32)};
            std::mt19937_64 rng(seq);
            for (std::size_t t = 0; t < nn; ++t) coeff[t * static_cast<std::size_t>(ns) + static_cast<std::size_t>(s)] = sample_link_coefficient(scsi.at(k, s), rng);
        }
        double acc = 0.0;
        for (std::size_t t = 0; t < nn; ++t) {
            cd sig = 0.0;
            double interf = 0.0;
            for (int s = 0; s < ns; ++s) {
                const cd alpha = coeff[t * static_cast<std::size_t>(ns) + static_cast<std::size_t>(s)];
                sig += alpha * own[static_cast<std::size_t>(s)](k);
                interf += std::norm(alpha) * leak[static_cast<std::size_t>(s)](k);
            }
            const double rate = std::log2(1.0 + std::norm(sig) / (interf + scsi.noise_power[ku]));
            acc += rate;
            weighted[t] += scsi.weights[ku] * rate;
        }
        r.per_user_rate[ku] = acc / static_cast<double>(n_trials);
        r.sum_rate += scsi.weights[ku] * r.per_user_rate[ku];
    }
    double var = 0.0;
    for (double x : weighted) var += (x - r.sum_rate) * (x - r.sum_rate);
    r.mc_stderr = n_trials > 1 ? std::sqrt(var / static_cast<double>(n_trials - 1) / static_cast<double>(n_trials)) : 0.0;
    return r;
}

} // namespace satprec
