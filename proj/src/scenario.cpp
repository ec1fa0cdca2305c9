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


#include "jtsched/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "jtsched/errors.hpp"

namespace jtsched {

void RfConfig::validate() const {
    if (num_cells < 1) throw ConfigError("num_cells must be >= 1");
    if (num_ccs < 1) throw ConfigError("num_ccs must be >= 1");
    if (num_rbgs_per_cc < 1) throw ConfigError("num_rbgs_per_cc must be >= 1");
    if (nr < 1 || nt < nr) throw ConfigError("antenna counts must satisfy nt >= nr >= 1");
    if (!(tx_power_per_rbg_w > 0.0)) throw ConfigError("tx_power_per_rbg_w must be positive");
    if (!(rbg_bandwidth_hz > 0.0)) throw ConfigError("rbg_bandwidth_hz must be positive");
    if (!(jt_gain_window_db >= 0.0)) throw ConfigError("jt_gain_window_db must be non-negative");
    if (static_cast<int>(cc_center_freqs_hz.size()) != num_ccs)
        throw ConfigError("cc_center_freqs_hz must have num_ccs entries");
    if (!(noise_power_w() > 0.0) || !std::isfinite(noise_power_w()))
        throw ConfigError("derived noise power must be positive and finite");
}

double RfConfig::noise_power_w() const {
    return std::pow(10.0, (noise_psd_dbm_hz + 10.0 * std::log10(rbg_bandwidth_hz) - 30.0) / 10.0);
}

double distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double GeometrySpec::default_pathloss_ref_gain() {
    return std::pow(10.0, -95.0 / 10.0) * std::pow(200.0, 3.5);
}

GeometrySpec GeometrySpec::three_cell_layout(int num_ues) {
    GeometrySpec g;
    g.oru_positions = {{0.0, -300.0, 25.0}, {-1000.0, -300.0, 25.0}, {-500.0, -1200.0, 25.0}};
    g.num_ues = num_ues;
    return g;
}

double GeometrySpec::pathloss_gain(double dist_m) const {
    return pathloss_ref_gain * std::pow(dist_m, -pathloss_exponent);
}

bool UeProfile::served_by(int m) const {
    return std::find(serving_set.begin(), serving_set.end(), m) != serving_set.end();
}

void Scenario::index() {
    const int M = config.num_cells;
    const int K = num_ues();
    members_.assign(M, {});
    local_.assign(static_cast<std::size_t>(M) * K, -1);
    for (int k = 0; k < K; ++k) {
        for (int m : ues[k].serving_set) {
            if (m < 0 || m >= M) throw ConfigError("serving set references unknown O-RU");
            members_[m].push_back(k);
        }
    }
    for (int m = 0; m < M; ++m) {
        std::sort(members_[m].begin(), members_[m].end());
        for (std::size_t j = 0; j < members_[m].size(); ++j)
            local_[static_cast<std::size_t>(m) * K + members_[m][j]] = static_cast<int>(j);
    }
}

std::vector<int> Scenario::njt_ues(int m) const {
    std::vector<int> out;
    for (int k : members(m))
        if (!ues[k].is_jt()) out.push_back(k);
    return out;
}

std::vector<int> Scenario::jt_ues(int m) const {
    std::vector<int> out;
    for (int k : members(m))
        if (ues[k].is_jt()) out.push_back(k);
    return out;
}

std::vector<int> Scenario::jt_ues() const {
    std::vector<int> out;
    for (const auto& ue : ues)
        if (ue.is_jt()) out.push_back(ue.id);
    return out;
}

int Scenario::num_qos_ues() const {
    return static_cast<int>(std::count_if(ues.begin(), ues.end(),
                                          [](const UeProfile& u) { return u.has_qos; }));
}

void Scenario::validate() const {
    config.validate();
    for (int k = 0; k < num_ues(); ++k) {
        const auto& ue = ues[k];
        if (ue.id != k) throw ConfigError("UE ids must equal their index");
        if (ue.serving_set.empty()) throw ConfigError("UE has an empty serving set");
        if (ue.is_jt() != (ue.serving_set.size() >= 2))
            throw ConfigError("UE kind disagrees with serving-set size");
        if (!std::is_sorted(ue.serving_set.begin(), ue.serving_set.end()))
            throw ConfigError("serving sets must be ascending");
        if (ue.has_qos ? !(ue.qos_demand > 0.0) : ue.qos_demand != 0.0)
            throw ConfigError("QoS demand disagrees with has_qos");
    }
}

ChannelSet::ChannelSet(Dims dims, int nr, int nt)
    : dims_(dims), nr_(nr), nt_(nt), h_(dims.tensor_size(), CMatrix::Zero(nr, nt)),
      gain_(static_cast<std::size_t>(dims.cells) * dims.ues, 0.0) {}

bool ChannelSet::all_finite() const {
    return std::all_of(h_.begin(), h_.end(), [](const CMatrix& h) { return h.allFinite(); }) &&
           std::all_of(gain_.begin(), gain_.end(), [](double g) { return std::isfinite(g); });
}

bool ChannelSet::operator==(const ChannelSet& other) const {
    if (!(dims_ == other.dims_) || nr_ != other.nr_ || nt_ != other.nt_) return false;
    if (gain_ != other.gain_) return false;
    for (std::size_t i = 0; i < h_.size(); ++i)
        if (h_[i] != other.h_[i]) return false;
    return true;
}

std::pair<Scenario, ChannelSet> generate_scenario(const RfConfig& config,
                                                  const GeometrySpec& layout,
                                                  std::uint64_t seed) {
    config.validate();
    if (layout.oru_positions.empty()) throw ConfigError("layout has no O-RU positions");
    if (static_cast<int>(layout.oru_positions.size()) != config.num_cells)
        throw ConfigError("layout O-RU count differs from num_cells");
    if (!(layout.x_max > layout.x_min) || !(layout.y_max > layout.y_min))
        throw ConfigError("UE region is empty");
    if (layout.num_ues < 1) throw ConfigError("layout must place at least one UE");
    if (!(layout.pathloss_ref_gain > 0.0)) throw ConfigError("pathloss_ref_gain must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(layout.x_min, layout.x_max);
    std::uniform_real_distribution<double> uy(layout.y_min, layout.y_max);
    // Each real/imag part has variance 1/2 so entries are CN(0, 1).
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

    Scenario scenario;
    scenario.config = config;
    scenario.layout = layout;
    const int K = layout.num_ues;
    scenario.ues.resize(K);
    for (int k = 0; k < K; ++k) {
        scenario.ues[k].id = k;
        // Draw order is fixed: x then y, UE by UE.
        const double x = ux(rng);
        const double y = uy(rng);
        scenario.ues[k].position = {x, y, layout.ue_height};
    }

    const Dims dims{config.num_cells, K, config.num_ccs, config.num_rbgs_per_cc};
    ChannelSet channels(dims, config.nr, config.nt);
    for (int m = 0; m < dims.cells; ++m) {
        for (int k = 0; k < K; ++k) {
            const double d = distance(layout.oru_positions[m], scenario.ues[k].position);
            const double g = layout.pathloss_gain(d);
            channels.gain(m, k) = g;
            const double amp = std::sqrt(g);
            for (int c = 0; c < dims.ccs; ++c) {
                for (int r = 0; r < dims.rbgs; ++r) {
                    CMatrix& h = channels.at(m, k, c, r);
                    for (int i = 0; i < config.nr; ++i) {
                        for (int j = 0; j < config.nt; ++j) {
                            const double re = gauss(rng);
                            const double im = gauss(rng);
                            h(i, j) = amp * cdouble(re, im);
                        }
                    }
                }
            }
        }
    }
    return {std::move(scenario), std::move(channels)};
}

Scenario associate_ues(Scenario scenario, const ChannelSet& channels) {
    const int M = scenario.config.num_cells;
    const double window = scenario.config.jt_gain_window_db;
    for (auto& ue : scenario.ues) {
        int best = 0;
        for (int m = 1; m < M; ++m)
            if (channels.gain(m, ue.id) > channels.gain(best, ue.id)) best = m;
        const double best_db = 10.0 * std::log10(channels.gain(best, ue.id));
        ue.serving_set.clear();
        for (int m = 0; m < M; ++m) {
            const double g_db = 10.0 * std::log10(channels.gain(m, ue.id));
            if (m == best || best_db - g_db <= window) ue.serving_set.push_back(m);
        }
        ue.kind = ue.serving_set.size() >= 2 ? UeKind::Jt : UeKind::Njt;
    }
    scenario.index();
    return scenario;
}

Scenario assign_qos(Scenario scenario, int num_qos, double q_lo, double q_hi,
                    std::uint64_t seed) {
    const int K = scenario.num_ues();
    if (num_qos < 0 || num_qos > K) throw ConfigError("num_qos must lie in [0, K]");
    if (!(q_lo >= 0.0) || !(q_hi > q_lo)) throw ConfigError("QoS range must satisfy 0 <= lo < hi");

    std::mt19937_64 rng(seed);
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    // Partial Fisher-Yates: the first num_qos entries are a uniform sample.
    for (int i = 0; i < num_qos; ++i) {
        std::uniform_int_distribution<int> pick(i, K - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    for (auto& ue : scenario.ues) {
        ue.has_qos = false;
        ue.qos_demand = 0.0;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> chosen(order.begin(), order.begin() + num_qos);
    std::sort(chosen.begin(), chosen.end());
    for (int k : chosen) {
        // 1 - U[0,1) lies in (0,1], so Q lies in (lo, hi].
        const double u = 1.0 - unit(rng);
        scenario.ues[k].has_qos = true;
        scenario.ues[k].qos_demand = q_lo + (q_hi - q_lo) * u;
    }
    return scenario;
}

std::pair<Scenario, ChannelSet> build_scenario(const ScenarioRequest& request) {
    std::seed_seq seq{static_cast<std::uint32_t>(request.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(request.seed >> 32)};
    std::array<std::uint64_t, 2> seeds{};
    std::array<std::uint32_t, 4> raw{};
    seq.generate(raw.begin(), raw.end());
    seeds[0] = (static_cast<std::uint64_t>(raw[0]) << 32) | raw[1];
    seeds[1] = (static_cast<std::uint64_t>(raw[2]) << 32) | raw[3];

    auto [scenario, channels] = generate_scenario(request.config, request.layout, seeds[0]);
    scenario = associate_ues(std::move(scenario), channels);
    scenario = assign_qos(std::move(scenario), request.num_qos, request.q_lo, request.q_hi, seeds[1]);
    return {std::move(scenario), std::move(channels)};
}

}  // namespace jtsched
