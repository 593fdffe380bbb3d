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


#ifndef SATPREC_CONSTELLATION_HPP
#define SATPREC_CONSTELLATION_HPP

#include "satprec/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace satprec {

// Walker-Delta constellation parameters. Angles in degrees, lengths in km.
struct ConstellationConfig {
    int num_planes = 28;
    int sats_per_plane = 60;
    double inclination_deg = 53.0;
    double altitude_km = 600.0;
    int phasing_factor = 1;
    double earth_radius_km = 6371.0;
    // Region centres are drawn with |lat| <= this limit; defaults to the inclination.
    std::optional<double> center_max_latitude_deg;

    void validate() const;
    double orbit_radius_km() const { return earth_radius_km + altitude_km; }
    int size() const { return num_planes * sats_per_plane; }
};

struct SatelliteState {
    Vec3 position;   // km, Earth-centred frame
    Vec3 velocity;   // km/s
    int plane_index = 0;
    int slot_index = 0;
    // Columns: along-track, cross-track, nadir (array boresight).
    Mat3 body_frame;
};

struct GeodeticPoint {
    double lat_rad = 0.0;
    double lon_rad = 0.0;
    double alt_km = 0.0;
};

Vec3 to_cartesian(const GeodeticPoint& p, double earth_radius_km);
double great_circle_km(const GeodeticPoint& a, const GeodeticPoint& b, double earth_radius_km);

struct ServiceRegion {
    GeodeticPoint center;
    double radius_km = 800.0;
    std::vector<GeodeticPoint> users;
};

struct LinkGeometry {
    double slant_range_km = 0.0;
    double tau_min_s = 0.0;
    double doppler_hz = 0.0;
    double range_rate_km_s = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    double elevation_rad = 0.0;
};

/// Satellites of the constellation at `epoch_s` seconds on circular orbits.
/// Planes are spread evenly in RAAN over 2*pi, slots evenly in argument of
/// latitude, and plane p is offset by 2*pi*F*p/(P*S_p) (Walker phasing).
std::vector<SatelliteState> build_constellation(const ConstellationConfig& config, double epoch_s);

/// Random service region: centre area-uniform in the latitude band, K users
/// area-uniform on the spherical cap of the given great-circle radius.
ServiceRegion sample_region(std::uint64_t seed, const ConstellationConfig& config, double radius_km, int num_users);

/// Indices of the S states closest to `center_ecef`, ascending in range.
/// Ties break on (plane_index, slot_index).
std::vector<std::size_t> select_satellites(std::span<const SatelliteState> states, const Vec3& center_ecef, int count);

LinkGeometry link_geometry(const SatelliteState& sat, const Vec3& user_ecef, double carrier_hz);

struct ProbabilityEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    double ci95_low() const { return std::max(0.0, probability - 1.96 * std_error); }
    double ci95_high() const { return std::min(1.0, probability + 1.96 * std_error); }
};

/// Samples of |(tau_{s1,l}-tau_{s1,k}) - (tau_{s2,l}-tau_{s2,k})| in seconds
/// over random regions, user pairs and cooperating-satellite pairs.
std::vector<double> interference_delay_spread_samples(const ConstellationConfig& config, double radius_km,
                                                      int num_satellites, std::size_t n_trials,
                                                      std::uint64_t seed);

/// Monte Carlo estimate of Pr(delay difference > threshold).
ProbabilityEstimate independence_probability(const ConstellationConfig& config, double radius_km,
                                              double threshold_s, std::size_t n_trials, std::uint64_t seed,
                                              int num_satellites = 5);

ProbabilityEstimate exceedance_probability(std::span<const double> samples, double threshold);

} // namespace satprec

#endif
