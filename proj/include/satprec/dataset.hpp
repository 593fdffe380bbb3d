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


#ifndef SATPREC_DATASET_HPP
#define SATPREC_DATASET_HPP

#include "satprec/te_utils.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace satprec {

// Binary layout (all little endian):
//   magic "SATPRECDS" + '\0', u32 version
//   u32 K, u32 S, u32 N_v, u32 N_h, u8 dtype (1 = float64), u8 endianness (0 = little),
//   u8 xi convention (0 = printed, 1 = least squares), u8 reserved, u64 n_samples, u64 seed
//   n_samples records of float64:
//     D (K*S*5), F (K*2), p (S), p_tx_dBm, A_bar (K*(S+1)*2, re/im interleaved, row-major),
//     u_bar (K), R_AP1
inline constexpr std::uint32_t kDatasetVersion = 1;

struct DatasetHeader {
    int num_users = 0;
    int num_sats = 0;
    ArrayGeometry array;
    XiConvention xi_convention = XiConvention::LeastSquares;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct DatasetRecord {
    MappingInputs inputs;
    MappingLabels labels;
    double p_tx_dbm = 0.0;
    double r_ap1 = 0.0;
};

/// Writes the binary file plus `<path>.json` (sample count, seed, config digest, xi convention).
void write_dataset(const std::string& path, const DatasetHeader& header, const std::vector<DatasetRecord>& records,
                   const std::string& config_digest);

struct Dataset {
    DatasetHeader header;
    std::vector<DatasetRecord> records;
};

Dataset read_dataset(const std::string& path);

/// FNV-1a 64 of a string, as 16 hex digits.
std::string digest_hex(const std::string& text);

} // namespace satprec

#endif
