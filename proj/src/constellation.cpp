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


#include "satprec/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace satprec {

namespace {

double deg2rad(double d) { return d * kPi / 180.0; }

Mat3 rot_z(double a) {
    Mat3 r;
    r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
    return r;
}

Mat3 rot_x(double a) {
    Mat3 r;
    r << 1.0, 0.0, 0.0, 0.0, std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a);
    return r;
}

// Point at angular distance `ang` along initial bearing `bearing` from `origin`.
GeodeticPoint destination(const GeodeticPoint& origin, double ang, double bearing) {
    const double sl = std::sin(origin.lat_rad), cl = std::cos(origin.lat_rad);
    const double lat = std::asin(std::clamp(sl * std::cos(ang) + cl * std::sin(ang) * std::cos(bearing), -1.0, 1.0));
    const double lon = origin.lon_rad + std::atan2(std::sin(bearing) * std::sin(ang) * cl,
                                                   std::cos(ang) - sl * std::sin(lat));
    return {lat, std::remainder(lon, 2.0 * kPi), 0.0};
}

} // namespace

void ConstellationConfig::validate() const {
    require(num_planes >= 1, "constellation: num_planes must be >= 1");
    require(sats_per_plane >= 1, "constellation: sats_per_plane must be >= 1");
    require(inclination_deg >= 0.0 && inclination_deg <= 180.0, "constellation: inclination must lie in [0, 180] deg");
    require(altitude_km > 0.0, "constellation: altitude must be positive");
    require(earth_radius_km > 0.0, "constellation: earth radius must be positive");
    require(phasing_factor >= 0 && phasing_factor <= num_planes - 1,
            "constellation: phasing factor must lie in [0, num_planes-1]");
    if (center_max_latitude_deg)
        require(*center_max_latitude_deg > 0.0 && *center_max_latitude_deg <= 90.0,
                "constellation: centre latitude limit must lie in (0, 90] deg");
}

Vec3 to_cartesian(const GeodeticPoint& p, double earth_radius_km) {
    const double r = earth_radius_km + p.alt_km;
    return {r * std::cos(p.lat_rad) * std::cos(p.lon_rad), r * std::cos(p.lat_rad) * std::sin(p.lon_rad),
            r * std::sin(p.lat_rad)};
}

double great_circle_km(const GeodeticPoint& a, const GeodeticPoint& b, double earth_radius_km) {
    const double dlat = b.lat_rad - a.lat_rad;
    const double dlon = b.lon_rad - a.lon_rad;
    const double h = std::pow(std::sin(dlat / 2), 2) + std::cos(a.lat_rad) * std::cos(b.lat_rad) * std::pow(std::sin(dlon / 2), 2);
    return 2.0 * earth_radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<SatelliteState> build_constellation(const ConstellationConfig& config, double epoch_s) {
    config.validate();
    const double r = config.orbit_radius_km();
    const double speed = std::sqrt(kEarthMu / r);
    const double mean_motion = speed / r;
    const double inc = deg2rad(config.inclination_deg);
    const int total = config.size();

    std::vector<SatelliteState> out;
    out.reserve(static_cast<std::size_t>(total));
    for (int p = 0; p < config.num_planes; ++p) {
        const double raan = 2.0 * kPi * p / config.num_planes;
        const Mat3 orient = rot_z(raan) * rot_x(inc);
        for (int s = 0; s < config.sats_per_plane; ++s) {
            const double u = 2.0 * kPi * s / config.sats_per_plane +
                             2.0 * kPi * config.phasing_factor * p / total + mean_motion * epoch_s;
            SatelliteState st;
            st.position = orient * Vec3(r * std::cos(u), r * std::sin(u), 0.0);
            st.velocity = orient * Vec3(-speed * std::sin(u), speed * std::cos(u), 0.0);
            st.plane_index = p;
            st.slot_index = s;
            const Vec3 nadir = -st.position.normalized();
            const Vec3 along = st.velocity.normalized();
            st.body_frame.col(0) = along;
            st.body_frame.col(1) = nadir.cross(along);
            st.body_frame.col(2) = nadir;
            out.push_back(st);
        }
    }
    return out;
}

ServiceRegion sample_region(std::uint64_t seed, const ConstellationConfig& config, double radius_km, int num_users) {
    require(num_users >= 1, "sample_region: need at least one user");
    require(radius_km > 0.0, "sample_region: radius must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double lat_limit = deg2rad(config.center_max_latitude_deg.value_or(std::min(90.0, config.inclination_deg)));
    const double smax = std::sin(lat_limit);
    ServiceRegion region;
    region.radius_km = radius_km;
    region.center.lat_rad = std::asin(smax * (2.0 * unit(rng) - 1.0));
    region.center.lon_rad = kPi * (2.0 * unit(rng) - 1.0);

    const double cap = radius_km / config.earth_radius_km;
    const double cos_cap = std::cos(cap);
    region.users.reserve(static_cast<std::size_t>(num_users));
    for (int k = 0; k < num_users; ++k) {
        const double cos_ang = 1.0 - unit(rng) * (1.0 - cos_cap);
        const double bearing = 2.0 * kPi * unit(rng);
        region.users.push_back(destination(region.center, std::acos(std::clamp(cos_ang, -1.0, 1.0)), bearing));
    }
    return region;
}

std::vector<std::size_t> select_satellites(std::span<const SatelliteState> states, const Vec3& center_ecef, int count) {
    require(count > 0, "select_satellites: count must be positive");
    require(static_cast<std::size_t>(count) <= states.size(), "select_satellites: count exceeds constellation size");
    std::vector<double> range(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) range[i] = (states[i].position - center_ecef).norm();
    std::vector<std::size_t> idx(states.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) {
        if (range[a] != range[b]) return range[a] < range[b];
        if (states[a].plane_index != states[b].plane_index) return states[a].plane_index < states[b].plane_index;
        return states[a].slot_index < states[b].slot_index;
    };
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), closer);
    idx.resize(static_cast<std::size_t>(count));
    return idx;
}

LinkGeometry link_geometry(const SatelliteState& sat, const Vec3& user_ecef, double carrier_hz) {
    const Vec3 los = user_ecef - sat.position;
    const double range = los.norm();
    if (!(range > 1e-9)) fail("link_geometry: satellite and user positions coincide");
    LinkGeometry g;
    g.slant_range_km = range;
    g.tau_min_s = range * 1e3 / kSpeedOfLight;
    g.range_rate_km_s = -los.dot(sat.velocity) / range;
    g.doppler_hz = -carrier_hz * g.range_rate_km_s * 1e3 / kSpeedOfLight;

    const Vec3 dir = sat.body_frame.transpose() * (los / range);
    g.theta_y = std::acos(std::clamp(dir.y(), -1.0, 1.0));
    g.theta_x = std::atan2(dir.z(), dir.x());
    const double un = user_ecef.norm();
    g.elevation_rad = un > 0.0 ? std::asin(std::clamp((-los).dot(user_ecef) / (range * un), -1.0, 1.0)) : 0.0;
    return g;
}

std::vector<double> interference_delay_spread_samples(const ConstellationConfig& config, double radius_km,
                                                      int num_satellites, std::size_t n_trials,
                                                      std::uint64_t seed) {
    require(n_trials >= 1, "independence: need at least one trial");
    require(num_satellites >= 2, "independence: need at least two cooperating satellites");
    const auto states = build_constellation(config, 0.0);
    std::vector<double> out(n_trials);
    for (std::size_t t = 0; t < n_trials; ++t) {
        const std::uint64_t trial_seed = mix_seed(seed, t);
        const ServiceRegion region = sample_region(trial_seed, config, radius_km, 2);
        const Vec3 center = to_cartesian(region.center, config.earth_radius_km);
        const auto sel = select_satellites(states, center, num_satellites);
        std::mt19937_64 rng(mix_seed(trial_seed, 1));
        std::uniform_int_distribution<int> pick(0, num_satellites - 1);
        const int a = pick(rng);
        int b = pick(rng);
        while (b == a) b = pick(rng);
        const Vec3 uk = to_cartesian(region.users[0], config.earth_radius_km);
        const Vec3 ul = to_cartesian(region.users[1], config.earth_radius_km);
        auto tau = [&](int s, const Vec3& u) { return (states[sel[static_cast<std::size_t>(s)]].position - u).norm() * 1e3 / kSpeedOfLight; };
        out[t] = std::abs((tau(a, ul) - tau(a, uk)) - (tau(b, ul) - tau(b, uk)));
    }
    return out;
}

ProbabilityEstimate exceedance_probability(std::span<const double> samples, double threshold) {
    ProbabilityEstimate est;
    est.trials = samples.size();
    if (samples.empty()) return est;
    const auto hits = std::count_if(samples.begin(), samples.end(), [&](double d) { return d > threshold; });
    const double n = static_cast<double>(samples.size());
    est.probability = static_cast<double>(hits) / n;
    est.std_error = std::sqrt(est.probability * (1.0 - est.probability) / n);
    return est;
}

ProbabilityEstimate independence_probability(const ConstellationConfig& config, double radius_km, double threshold_s,
                                              std::size_t n_trials, std::uint64_t seed, int num_satellites) {
    const auto samples = interference_delay_spread_samples(config, radius_km, num_satellites, n_trials, seed);
    return exceedance_probability(samples, threshold_s);
}

} // namespace satprec
