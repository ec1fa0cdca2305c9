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


#include "jtsched/core_problem.hpp"

#include <algorithm>
#include <cmath>

#include "jtsched/central.hpp"

namespace jtsched {

CoreProblem::CoreProblem(const ApproxCoeffs& coeffs, const Scenario& scenario, int m, int c, double rho)
    : coeffs_(coeffs),
      scenario_(scenario),
      m_(m),
      c_(c),
      rbgs_(coeffs.rbgs()),
      rho_(rho),
      members_(coeffs.members(m)),
      offset_(members_.size(), 0.0),
      bits_(members_.size() * static_cast<std::size_t>(coeffs.rbgs()), 0),
      active_(coeffs.rbgs()),
      total_(members_.size(), 0.0),
      count_(members_.size(), 0),
      scratch_(members_.size(), 0.0) {
    value_ = recompute();
}

void CoreProblem::set_offset(int j, double offset) {
    value_ -= contribution(j, total_[j]);
    offset_[j] = offset;
    value_ += contribution(j, total_[j]);
}

double CoreProblem::contribution(int j, double total) const {
    const UeProfile& ue = scenario_.ues[members_[j]];
    return ue.has_qos ? rho_ * std::min(total + offset_[j], ue.qos_demand) : total;
}

double CoreProblem::rate(int j, int r) const {
    if (!bit(j, r)) return 0.0;
    const CoeffSlice& s = coeffs_.slice(m_, c_, r);
    double v = s.psi_eff[j] - std::log2(static_cast<double>(phi(r)));
    for (int i : active_[r])
        if (i != j) v += s.d_at(i, j);
    return coeffs_.weight(members_[j]) * v;
}

double CoreProblem::rate_if_on(int j, int r) const {
    if (bit(j, r)) return rate(j, r);
    const CoeffSlice& s = coeffs_.slice(m_, c_, r);
    double v = s.psi_eff[j] - std::log2(static_cast<double>(phi(r) + 1));
    for (int i : active_[r]) v += s.d_at(i, j);
    return coeffs_.weight(members_[j]) * v;
}

double CoreProblem::flip_delta(int j, int r, bool on, std::vector<double>& deltas, double* own_rate) const {
    const CoeffSlice& s = coeffs_.slice(m_, c_, r);
    const auto& act = active_[r];
    const double phi = static_cast<double>(act.size());
    if (on) {
        const double share = std::log2(phi) - std::log2(phi + 1.0);
        double own = s.psi_eff[j] - std::log2(phi + 1.0);
        for (int i : act) {
            own += s.d_at(j, i);
            deltas[i] += coeffs_.weight(members_[i]) * (s.d_at(j, i) + share);
        }
        deltas[j] += coeffs_.weight(members_[j]) * own;
        if (own_rate) *own_rate = coeffs_.weight(members_[j]) * own;
    } else {
        const double share = phi > 1.0 ? std::log2(phi) - std::log2(phi - 1.0) : 0.0;
        double own = s.psi_eff[j] - std::log2(phi);
        for (int i : act) {
            if (i == j) continue;
            own += s.d_at(j, i);
            deltas[i] += coeffs_.weight(members_[i]) * (share - s.d_at(j, i));
        }
        deltas[j] -= coeffs_.weight(members_[j]) * own;
        if (own_rate) *own_rate = coeffs_.weight(members_[j]) * own;
        if (count_[j] == 1) deltas[j] = -total_[j];
    }
    double delta = contribution(j, total_[j] + deltas[j]) - contribution(j, total_[j]);
    for (int i : act)
        if (i != j) delta += contribution(i, total_[i] + deltas[i]) - contribution(i, total_[i]);
    return delta;
}

double CoreProblem::gain(int j, int r) const { return gain(j, r, nullptr); }

double CoreProblem::gain(int j, int r, double* rate_on) const {
    const bool was = bit(j, r);
    if (!was) {
        if (phi(r) >= coeffs_.nt() || !coeffs_.slice(m_, c_, r).schedulable[j]) {
            if (rate_on) *rate_on = rate_if_on(j, r);
            return kBlockedGain;
        }
    }
    double d = flip_delta(j, r, !was, scratch_, rate_on);
    scratch_[j] = 0.0;
    for (int i : active_[r]) scratch_[i] = 0.0;
    return was ? -d : d;
}

double CoreProblem::set(int j, int r, bool on) {
    if (bit(j, r) == on) return 0.0;
    const double d = flip_delta(j, r, on, scratch_);
    total_[j] += scratch_[j];
    scratch_[j] = 0.0;
    for (int i : active_[r]) {
        if (i == j) continue;
        total_[i] += scratch_[i];
        scratch_[i] = 0.0;
    }
    auto& act = active_[r];
    if (on) {
        act.insert(std::lower_bound(act.begin(), act.end(), j), j);
    } else {
        act.erase(std::lower_bound(act.begin(), act.end(), j));
    }
    bits_[index(j, r)] = on ? 1 : 0;
    count_[j] += on ? 1 : -1;
    if (count_[j] == 0) total_[j] = 0.0;
    value_ += d;
    return d;
}

double CoreProblem::recompute() const {
    double v = 0.0;
    for (int j = 0; j < size(); ++j) {
        double t = 0.0;
        for (int r = 0; r < rbgs_; ++r) t += rate(j, r);
        v += contribution(j, t);
    }
    return v;
}

}  // namespace jtsched
