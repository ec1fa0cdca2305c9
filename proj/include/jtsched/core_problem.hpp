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

#include "jtsched/rate_approx.hpp"
#include "jtsched/scenario.hpp"

namespace jtsched {

/// The per-core subproblem of O-RU m on CC c:
///   sum over no-QoS members of their rate on this CC
///   + rho * sum over QoS members of min(rate on this CC + offset, Q).
/// Member positions follow Scenario::members(m). Offsets carry the QoS
/// credit a UE receives from other cores.
class CoreProblem {
public:
    CoreProblem(const ApproxCoeffs& coeffs, const Scenario& scenario, int m, int c, double rho);

    int cell() const { return m_; }
    int cc() const { return c_; }
    int size() const { return static_cast<int>(members_.size()); }
    int rbgs() const { return rbgs_; }
    int ue(int j) const { return members_[j]; }
    const std::vector<int>& members() const { return members_; }

    void set_offset(int j, double offset);
    double offset(int j) const { return offset_[j]; }

    bool bit(int j, int r) const { return bits_[index(j, r)] != 0; }
    int phi(int r) const { return static_cast<int>(active_[r].size()); }
    const std::vector<int>& active(int r) const { return active_[r]; }

    /// Current approximate rate of member j on RBG r (0 when off).
    double rate(int j, int r) const;
    /// Rate member j would get on r with its bit forced to 1.
    double rate_if_on(int j, int r) const;
    /// Sum over r of rate(j, r).
    double total(int j) const { return total_[j]; }

    /// Local objective change of switching the bit from 0 to 1; kBlockedGain
    /// (from central.hpp) when over capacity or unschedulable.
    double gain(int j, int r) const;
    /// Same, also writing rate_if_on(j, r) to *rate_on.
    double gain(int j, int r, double* rate_on) const;
    double set(int j, int r, bool on);

    double value() const { return value_; }
    double recompute() const;

private:
    std::size_t index(int j, int r) const { return static_cast<std::size_t>(j) * rbgs_ + r; }
    double contribution(int j, double total) const;
    double flip_delta(int j, int r, bool on, std::vector<double>& deltas, double* own_rate = nullptr) const;

    const ApproxCoeffs& coeffs_;
    const Scenario& scenario_;
    int m_;
    int c_;
    int rbgs_;
    double rho_;
    std::vector<int> members_;
    std::vector<double> offset_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::vector<int>> active_;
    std::vector<double> total_;
    std::vector<int> count_;  // bits set per member
    double value_ = 0.0;
    mutable std::vector<double> scratch_;
};

}  // namespace jtsched
