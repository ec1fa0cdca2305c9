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
#include <functional>
#include <limits>
#include <vector>

#include "jtsched/rate_approx.hpp"
#include "jtsched/scenario.hpp"
#include "jtsched/schedule.hpp"

namespace jtsched {

inline constexpr double kBlockedGain = -std::numeric_limits<double>::infinity();

/// Min-penalty objective over approximate rates:
///   sum of no-QoS rates + rho * sum over QoS UEs of min(total rate, Q),
/// with JT rates summed over the serving O-RUs. Throws
/// InconsistentScheduleError on a JT-inconsistent schedule.
double objective_G(const ApproxCoeffs& coeffs, const Schedule& schedule,
                   const Scenario& scenario, double rho);

/// Incrementally maintained objective. A UE's "bit" on (c, r) is its own
/// b_{m,k} for an NJT-UE and the consensus bit b_i for a JT-UE.
class PenaltyObjectiveState {
public:
    PenaltyObjectiveState(const ApproxCoeffs& coeffs, const Scenario& scenario, double rho,
                          const Schedule& init);

    double value() const { return value_; }
    double rho() const { return rho_; }
    const Schedule& schedule() const { return schedule_; }

    bool bit(int ue, int c, int r) const;

    /// G(bit = 1) - G(bit = 0) with every other bit fixed; kBlockedGain when
    /// setting the bit would exceed nt on some O-RU or hit an unschedulable
    /// channel.
    double gain(int ue, int c, int r) const;

    /// Sets the bit and returns the objective change. No feasibility check.
    double set(int ue, int c, int r, bool on);

    /// Accumulated approximate rate of a UE over all cells and RBGs.
    double cumulative(int ue) const { return cumulative_[ue]; }
    int phi(int m, int c, int r) const { return static_cast<int>(active_[flat(m, c, r)].size()); }

    /// Number of (m, c, r) with more than nt scheduled UEs, and of set bits on
    /// unschedulable channels. Both zero for a feasible state.
    int over_capacity() const { return over_cap_; }
    int blocked_bits() const { return blocked_bits_; }
    bool feasible() const { return over_cap_ == 0 && blocked_bits_ == 0; }

    /// From-scratch evaluation of the current schedule.
    double recompute() const;

private:
    std::size_t flat(int m, int c, int r) const {
        return (static_cast<std::size_t>(m) * coeffs_.ccs() + c) * coeffs_.rbgs() + r;
    }
    double contribution(int ue, double total) const;
    double flip_delta(int ue, int c, int r, bool on) const;
    void accumulate(int ue, double delta) const;

    const ApproxCoeffs& coeffs_;
    const Scenario& scenario_;
    double rho_;
    Schedule schedule_;
    std::vector<std::vector<int>> active_;  // sorted member positions per (m, c, r)
    std::vector<double> cumulative_;
    std::vector<int> bit_count_;  // consensus bits set per UE
    double value_ = 0.0;
    int over_cap_ = 0;
    int blocked_bits_ = 0;

    mutable std::vector<double> scratch_;
    mutable std::vector<int> touched_;
};

struct BcdOptions {
    double rho = 5.0;
    int max_sweeps = 20;
    bool shuffle_ues = false;
    std::uint64_t shuffle_seed = 0;
    /// Invoked after every sweep with (sweep index from 1, schedule, G).
    std::function<void(int, const Schedule&, double)> on_sweep;
};

struct BcdResult {
    Schedule schedule;
    std::vector<double> trace;  // G before the first sweep, then after each sweep
    int sweeps = 0;
    bool converged = false;
    std::size_t updates = 0;
    /// Smallest objective change observed on any single bit update.
    double min_update_delta = 0.0;
};

/// Block coordinate descent over every UE bit: visit UEs ascending (or in a
/// seeded shuffle), RBGs (c, r) ascending, set the bit iff its gain is > 0.
/// Stops when a sweep changes nothing or after max_sweeps.
BcdResult centralized_bcd(const ApproxCoeffs& coeffs, const Scenario& scenario,
                          const BcdOptions& options, const Schedule& init);
BcdResult centralized_bcd(const ApproxCoeffs& coeffs, const Scenario& scenario,
                          const BcdOptions& options);

}  // namespace jtsched
