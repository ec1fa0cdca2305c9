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

#include "jtsched/channel_algebra.hpp"
#include "jtsched/scenario.hpp"
#include "jtsched/schedule.hpp"

namespace jtsched {

enum class MshsWeighting {
    UnmetFraction,  // 1 + w * (unmet Q / Q)
    None,           // pure SINR ranking
};

struct BaselineConfig {
    double sus_orthogonality_eps = 0.4;
    int sus_max_users = 0;  // 0 means nt
    MshsWeighting mshs_qos_weight_fn = MshsWeighting::UnmetFraction;
    double mshs_qos_weight = 1.0;
    int mshs_user_cap = 8;  // further limited by nt

    /// Throws ConfigError when eps is outside (0, 1) or a cap is negative.
    void validate() const;
};

/// Semi-orthogonal user selection per (m, c, r) on the equivalent channels,
/// then a per-RBG AND over each JT-UE's serving set.
Schedule sus_zf_schedule(const ChannelSet& channels, const TripletCache& triplets,
                         const Scenario& scenario, const BaselineConfig& config = {});

/// QoS-weighted SINR ranking, filled greedily up to the per-RBG user cap
/// (candidates that would make the EZF set rank deficient are skipped). RBGs
/// are visited in (c, r) order and the unmet demand is updated after each one.
Schedule mshs_schedule(const ChannelSet& channels, const TripletCache& triplets,
                       const Scenario& scenario, const BaselineConfig& config = {});

/// Simplified EZF SINR of every UE in `ues` when O-RU m serves exactly that
/// set on (c, r). Returns false if the set is rank deficient.
bool simplified_sinr_set(const TripletCache& triplets, const Scenario& scenario, int m, int c, int r,
                         const std::vector<int>& ues, std::vector<double>& sinr);

}  // namespace jtsched
