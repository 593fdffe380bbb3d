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


#ifndef SATPREC_RATES_HPP
#define SATPREC_RATES_HPP

#include "satprec/channel.hpp"
#include "satprec/factorization.hpp"
#include "satprec/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace satprec {

enum class RateKind { AP1, AP2, MC };

// Rates in bit/s/Hz per subcarrier; sum_rate is the beta-weighted sum.
struct RateReport {
    RateKind kind = RateKind::AP1;
    std::vector<double> per_user_rate;
    double sum_rate = 0.0;
    std::optional<double> mc_stderr;
};

/// log2(1 + w^H Omega w / (sum_{i != k} w_i^H Omega~ w_i + sigma2)). Columns of w are users.
RateReport rate_ap1(const CMat& w, const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors);
RateReport rate_ap1(const CMat& w, const ScenarioScsi& scsi);

/// Mean-channel surrogate: log2(1 + |E{h}^T w_k|^2 / (load - |E{h}^T w_k|^2)).
RateReport rate_ap2(const CMat& w, const ScenarioScsi& scsi, const std::vector<CovarianceFactors>& factors);
RateReport rate_ap2(const CMat& w, const ScenarioScsi& scsi);

/// Monte Carlo E{log2(1 + SINR)} with coherent signal and per-satellite incoherent
/// interference. Each link draws its fading from its own stream keyed by
/// (seed, sat_id, user_id), so results do not depend on user or satellite order.
RateReport rate_mc(const CMat& w, const ScenarioScsi& scsi, int n_trials, std::uint64_t seed);

} // namespace satprec

#endif
