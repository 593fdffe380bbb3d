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


#include "satprec/dataset.hpp"

#include "json.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace satprec {

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 10> kMagic{'S', 'A', 'T', 'P', 'R', 'E', 'C', 'D', 'S', '\0'};

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    }
    template <class T> void put(T v) { out_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
    void put_raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void check(const std::string& where) {
        if (!out_) throw Error(ErrorKind::Io, "write failed on " + path_ + " (" + where + ")");
    }
    void close() {
        out_.close();
        if (!out_) throw Error(ErrorKind::Io, "closing " + path_ + " failed");
    }

private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw Error(ErrorKind::Io, "cannot open " + path);
    }
    template <class T> T get() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_) throw Error(ErrorKind::Io, "truncated dataset file " + path_);
        return v;
    }
    void get_raw(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (!in_) throw Error(ErrorKind::Io, "truncated dataset file " + path_);
    }

private:
    std::ifstream in_;
    std::string path_;
};

} // namespace

std::string digest_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_dataset(const std::string& path, const DatasetHeader& header, const std::vector<DatasetRecord>& records,
                   const std::string& config_digest) {
    require(header.n_samples == records.size(), "write_dataset: sample count mismatch");
    Writer w(path);
    w.put_raw(kMagic.data(), kMagic.size());
    w.put<std::uint32_t>(kDatasetVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(header.num_users));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(header.num_sats));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(header.array.n_v));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(header.array.n_h));
    w.put<std::uint8_t>(1);
    w.put<std::uint8_t>(0);
    w.put<std::uint8_t>(header.xi_convention == XiConvention::Printed ? 0 : 1);
    w.put<std::uint8_t>(0);
    w.put<std::uint64_t>(header.n_samples);
    w.put<std::uint64_t>(header.seed);
    w.check("header");
    const int nk = header.num_users, ns = header.num_sats;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const DatasetRecord& r = records[i];
        if (r.inputs.num_users != nk || r.inputs.num_sats != ns || r.labels.a_bar.rows() != nk || r.labels.a_bar.cols() != ns + 1)
            throw Error(ErrorKind::Io, "write_dataset: record " + std::to_string(i) + " has inconsistent dimensions");
        for (double v : r.inputs.d) w.put<double>(v);
        for (int k = 0; k < nk; ++k)
            for (int c = 0; c < 2; ++c) w.put<double>(r.inputs.f(k, c));
        for (int s = 0; s < ns; ++s) w.put<double>(r.inputs.p(s));
        w.put<double>(r.p_tx_dbm);
        for (int k = 0; k < nk; ++k)
            for (int s = 0; s <= ns; ++s) {
                w.put<double>(r.labels.a_bar(k, s).real());
                w.put<double>(r.labels.a_bar(k, s).imag());
            }
        for (int k = 0; k < nk; ++k) w.put<double>(r.labels.u_bar(k));
        w.put<double>(r.r_ap1);
        w.check("sample " + std::to_string(i));
    }
    w.close();

    nlohmann::ordered_json manifest;
    manifest["format"] = "satprec-dataset";
    manifest["version"] = kDatasetVersion;
    manifest["n_samples"] = header.n_samples;
    manifest["seed"] = header.seed;
    manifest["num_users"] = nk;
    manifest["num_sats"] = ns;
    manifest["n_v"] = header.array.n_v;
    manifest["n_h"] = header.array.n_h;
    manifest["dtype"] = "float64";
    manifest["endianness"] = "little";
    manifest["xi_convention"] = to_string(header.xi_convention);
    manifest["config_digest"] = config_digest;
    std::ofstream m(path + ".json");
    if (!m) throw Error(ErrorKind::Io, "cannot write manifest " + path + ".json");
    m << manifest.dump(2) << '\n';
    if (!m) throw Error(ErrorKind::Io, "write failed on manifest " + path + ".json");
}

Dataset read_dataset(const std::string& path) {
    Reader r(path);
    std::array<char, 10> magic{};
    r.get_raw(magic.data(), magic.size());
    if (magic != kMagic) throw Error(ErrorKind::Io, path + " is not a satprec dataset");
    const auto version = r.get<std::uint32_t>();
    if (version != kDatasetVersion) throw Error(ErrorKind::Io, path + ": unsupported dataset version " + std::to_string(version));
    Dataset ds;
    DatasetHeader& h = ds.header;
    h.num_users = static_cast<int>(r.get<std::uint32_t>());
    h.num_sats = static_cast<int>(r.get<std::uint32_t>());
    h.array.n_v = static_cast<int>(r.get<std::uint32_t>());
    h.array.n_h = static_cast<int>(r.get<std::uint32_t>());
    const auto dtype = r.get<std::uint8_t>();
    const auto endian = r.get<std::uint8_t>();
    if (dtype != 1 || endian != 0) throw Error(ErrorKind::Io, path + ": unsupported dtype or byte order");
    h.xi_convention = r.get<std::uint8_t>() == 0 ? XiConvention::Printed : XiConvention::LeastSquares;
    (void)r.get<std::uint8_t>();
    h.n_samples = r.get<std::uint64_t>();
    h.seed = r.get<std::uint64_t>();
    const int nk = h.num_users, ns = h.num_sats;
    ds.records.resize(h.n_samples);
    for (DatasetRecord& rec : ds.records) {
        rec.inputs.num_users = nk;
        rec.inputs.num_sats = ns;
        rec.inputs.array = h.array;
        rec.inputs.d.resize(static_cast<std::size_t>(nk * ns * 5));
        for (double& v : rec.inputs.d) v = r.get<double>();
        rec.inputs.f.resize(nk, 2);
        for (int k = 0; k < nk; ++k)
            for (int c = 0; c < 2; ++c) rec.inputs.f(k, c) = r.get<double>();
        rec.inputs.p.resize(ns);
        for (int s = 0; s < ns; ++s) rec.inputs.p(s) = r.get<double>();
        rec.p_tx_dbm = r.get<double>();
        rec.labels.a_bar.resize(nk, ns + 1);
        for (int k = 0; k < nk; ++k)
            for (int s = 0; s <= ns; ++s) {
                const double re = r.get<double>();
                const double im = r.get<double>();
                rec.labels.a_bar(k, s) = cd(re, im);
            }
        rec.labels.u_bar.resize(nk);
        for (int k = 0; k < nk; ++k) rec.labels.u_bar(k) = r.get<double>();
        rec.r_ap1 = r.get<double>();
    }
    return ds;
}

} // namespace satprec
