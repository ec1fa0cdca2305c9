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

#include <vector>

#include "jtsched/channel_algebra.hpp"
#include "jtsched/scenario.hpp"
#include "jtsched/schedule.hpp"

namespace jtsched {

/// EZF beams of one (m, c, r): one column per scheduled UE, ascending UE id.
struct CellBeams {
    std::vector<int> ues;
    std::vector<CVector> w;             // normalized, ||w||^2 = P / |A|
    std::vector<double> w_hat_norm_sq;  // ||w_hat||^2 before normalization

    int size() const { return static_cast<int>(ues.size()); }
    int position_of(int k) const;
    double total_power() const;
};

class BeamformerSet {
public:
    BeamformerSet() = default;
    explicit BeamformerSet(Dims dims) : dims_(dims), cells_(static_cast<std::size_t>(dims.cells) * dims.ccs * dims.rbgs) {}

    const CellBeams& at(int m, int c, int r) const { return cells_[flat(m, c, r)]; }
    CellBeams& at(int m, int c, int r) { return cells_[flat(m, c, r)]; }

    /// Beam of UE k from O-RU m, or nullptr when (m, k) is not scheduled.
    const CVector* beam(int m, int k, int c, int r) const;
    const Dims& dims() const { return dims_; }

private:
    std::size_t flat(int m, int c, int r) const {
        return (static_cast<std::size_t>(m) * dims_.ccs + c) * dims_.rbgs + r;
    }
    Dims dims_;
    std::vector<CellBeams> cells_;
};

/// Intra-cell EZF: W_hat = V (V^H V)^-1 over the UEs O-RU m schedules on
/// (c, r), then equal power per column. Throws IllConditionedError when the
/// Gram matrix condition number exceeds 1e12 or more than nt UEs are set.
CellBeams build_ezf(const Schedule& schedule, const TripletCache& triplets,
                    const Scenario& scenario, int m, int c, int r);

BeamformerSet build_all_beams(const Schedule& schedule, const TripletCache& triplets,
                              const Scenario& scenario);

/// Exact SINR/rate engine keeping every intra- and inter-cell term.
/// Interference from a JT group is the coherent sum over the O-RUs that
/// actually schedule it.
class ExactEvaluator {
public:
    ExactEvaluator(const Scenario& scenario, const ChannelSet& channels,
                   const TripletCache& triplets);

    /// Builds beams for `schedule`; must precede the rate queries.
    void load(const Schedule& schedule);
    void load(const Schedule& schedule, BeamformerSet beams);

    const BeamformerSet& beams() const { return beams_; }

    /// Linear SINR of UE k on (c, r) (0 when not scheduled).
    double sinr(int k, int c, int r) const;

    double rate_njt(int k, int c, int r) const;
    /// Returns 0 and sets *inconsistent when serving O-RUs disagree on (c, r).
    double rate_jt(int i, int c, int r, bool* inconsistent = nullptr) const;
    double rate(int k, int c, int r) const;

    /// Row u_x^H H_{n,x} for receiver x and transmitter n.
    CRowVector combined_row(int n, int x, int c, int r) const;

private:
    double transmission_amplitude_sq(int x, int y, int c, int r) const;

    const Scenario& scenario_;
    const ChannelSet& channels_;
    const TripletCache& triplets_;
    Schedule schedule_;
    BeamformerSet beams_;
};

/// One-shot wrappers around ExactEvaluator.
double exact_rate_njt(const Schedule& schedule, const BeamformerSet& beams,
                      const ChannelSet& channels, const TripletCache& triplets,
                      const Scenario& scenario, int k, int c, int r);
double exact_rate_jt(const Schedule& schedule, const BeamformerSet& beams,
                     const ChannelSet& channels, const TripletCache& triplets,
                     const Scenario& scenario, int i, int c, int r,
                     bool* inconsistent = nullptr);

/// Closed-form SINR lambda^2 P / (|A_m| ||w_hat||^2 sigma^2) of UE t as served
/// by O-RU m, intra-cell EZF only. For a JT-UE this is the per-cell term.
double simplified_sinr(const Schedule& schedule, const TripletCache& triplets,
                       const Scenario& scenario, int t, int m, int c, int r);

struct EsrResult {
    double esr = 0.0;
    double sat = 1.0;
    int qos_ues = 0;
    int qos_met = 0;
    std::vector<double> ue_rate;  // summed exact rate per UE
};

/// Effective sum rate and QoS satisfaction ratio from exact rates. Throws
/// InconsistentScheduleError for a JT-inconsistent schedule.
EsrResult esr_and_sat(const Schedule& schedule, const ChannelSet& channels,
                      const TripletCache& triplets, const Scenario& scenario);
EsrResult esr_and_sat(const Schedule& schedule, const ChannelSet& channels,
                      const Scenario& scenario);

/// ESR/Sat from per-UE total rates (shared by the exact and approximate views).
EsrResult summarize_rates(const Scenario& scenario, std::vector<double> ue_rate);

}  // namespace jtsched
