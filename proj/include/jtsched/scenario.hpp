/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The jtsched Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jtsched/types.hpp"

namespace jtsched {

/// Radio-frequency constants of a run. Power is linear watts per RBG, noise is
/// a power spectral density in dBm/Hz.
struct RfConfig {
    int num_cells = 3;
    int num_ccs = 2;
    int num_rbgs_per_cc = 4;
    int nt = 32;
    int nr = 2;
    double tx_power_per_rbg_w = 0.01;  // 10 dBm
    double noise_psd_dbm_hz = -174.0;
    double rbg_bandwidth_hz = 1.44e6;  // 48 subcarriers at 30 kHz
    std::vector<double> cc_center_freqs_hz = {3.2e9, 3.5e9};
    double jt_gain_window_db = 10.0;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    /// Per-RBG noise power in watts.
    double noise_power_w() const;

    /// P / sigma^2, the solo-UE SNR scale.
    double snr_scale() const { return tx_power_per_rbg_w / noise_power_w(); }
};

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Position& a, const Position& b);

/// O-RU sites, the rectangular UE drop region and the pathloss law
/// g(d) = ref_gain * d^-exponent.
struct GeometrySpec {
    std::vector<Position> oru_positions;
    double x_min = -1400.0;
    double x_max = 400.0;
    double y_min = -1400.0;
    double y_max = -100.0;
    double ue_height = 1.5;
    int num_ues = 18;
    double pathloss_exponent = 3.5;
    double pathloss_ref_gain = default_pathloss_ref_gain();

    /// Gain constant giving -95 dB at 200 m under the 3.5 exponent.
    static double default_pathloss_ref_gain();

    /// Three O-RUs at 25 m height over the standard drop rectangle.
    static GeometrySpec three_cell_layout(int num_ues);

    double pathloss_gain(double dist_m) const;
};

enum class UeKind { Njt, Jt };

struct UeProfile {
    int id = 0;
    Position position;
    UeKind kind = UeKind::Njt;
    std::vector<int> serving_set;  // ascending O-RU indices
    bool has_qos = false;
    double qos_demand = 0.0;  // bps/Hz summed over scheduled RBGs

    bool is_jt() const { return kind == UeKind::Jt; }
    bool served_by(int m) const;
};

/// Geometry, users and association. `index()` must be called after the
/// serving sets change; `associate_ues` does so.
class Scenario {
public:
    RfConfig config;
    GeometrySpec layout;
    std::vector<UeProfile> ues;

    int num_ues() const { return static_cast<int>(ues.size()); }
    Dims dims() const {
        return {config.num_cells, num_ues(), config.num_ccs, config.num_rbgs_per_cc};
    }

    /// Rebuilds the per-cell member lists from the serving sets.
    void index();

    /// A_m: every UE with m in its serving set, ascending.
    const std::vector<int>& members(int m) const { return members_.at(m); }
    /// Position of UE k inside members(m), or -1.
    int local_index(int m, int k) const { return local_.at(static_cast<std::size_t>(m) * ues.size() + k); }

    std::vector<int> njt_ues(int m) const;
    std::vector<int> jt_ues(int m) const;
    std::vector<int> jt_ues() const;
    int num_qos_ues() const;

    /// Throws ConfigError if any UE profile invariant is broken.
    void validate() const;

private:
    std::vector<std::vector<int>> members_;
    std::vector<int> local_;
};

/// h[m][k][c][r] of shape nr x nt plus the large-scale gains g[m][k].
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(Dims dims, int nr, int nt);

    const Dims& dims() const { return dims_; }
    int nr() const { return nr_; }
    int nt() const { return nt_; }

    CMatrix& at(int m, int k, int c, int r) { return h_[dims_.flat(m, k, c, r)]; }
    const CMatrix& at(int m, int k, int c, int r) const { return h_[dims_.flat(m, k, c, r)]; }

    double& gain(int m, int k) { return gain_[static_cast<std::size_t>(m) * dims_.ues + k]; }
    double gain(int m, int k) const { return gain_[static_cast<std::size_t>(m) * dims_.ues + k]; }

    bool all_finite() const;
    bool operator==(const ChannelSet& other) const;

private:
    Dims dims_;
    int nr_ = 0;
    int nt_ = 0;
    std::vector<CMatrix> h_;
    std::vector<double> gain_;
};

/// Draws UE positions and Rayleigh-faded channels. Serving sets are left
/// empty; run `associate_ues` next.
std::pair<Scenario, ChannelSet> generate_scenario(const RfConfig& config,
                                                  const GeometrySpec& layout,
                                                  std::uint64_t seed);

/// Strongest-gain primary O-RU plus every O-RU within the JT window.
Scenario associate_ues(Scenario scenario, const ChannelSet& channels);

/// Marks `num_qos` UEs (uniform without replacement) with Q ~ U(lo, hi].
Scenario assign_qos(Scenario scenario, int num_qos, double q_lo, double q_hi,
                    std::uint64_t seed);

/// Convenience bundle: generate, associate and assign QoS with seeds derived
/// from one master seed.
struct ScenarioRequest {
    RfConfig config;
    GeometrySpec layout = GeometrySpec::three_cell_layout(18);
    int num_qos = 8;
    double q_lo = 0.0;
    double q_hi = 60.0;
    std::uint64_t seed = 1;
};

std::pair<Scenario, ChannelSet> build_scenario(const ScenarioRequest& request);

}  // namespace jtsched
