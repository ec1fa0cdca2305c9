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


#include "jtsched/central.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "jtsched/errors.hpp"

namespace jtsched {

namespace {

double penalty_contribution(const UeProfile& ue, double rho, double total) {
    return ue.has_qos ? rho * std::min(total, ue.qos_demand) : total;
}

}  // namespace

double objective_G(const ApproxCoeffs& coeffs, const Schedule& schedule, const Scenario& scenario,
                   double rho) {
    if (!schedule.consistent(scenario))
        throw InconsistentScheduleError("objective_G requires a JT-consistent schedule");
    const std::vector<double> rates = approx_ue_rates(coeffs, schedule, scenario);
    double g = 0.0;
    for (const auto& ue : scenario.ues) g += penalty_contribution(ue, rho, rates[ue.id]);
    return g;
}

PenaltyObjectiveState::PenaltyObjectiveState(const ApproxCoeffs& coeffs, const Scenario& scenario,
                                             double rho, const Schedule& init)
    : coeffs_(coeffs),
      scenario_(scenario),
      rho_(rho),
      schedule_(init),
      active_(static_cast<std::size_t>(coeffs.cells()) * coeffs.ccs() * coeffs.rbgs()),
      cumulative_(scenario.num_ues(), 0.0),
      bit_count_(scenario.num_ues(), 0),
      scratch_(scenario.num_ues(), 0.0) {
    if (!init.consistent(scenario))
        throw InconsistentScheduleError("initial schedule must be JT-consistent");
    if (!init.respects_association(scenario))
        throw DomainError("initial schedule sets bits outside the association");
    for (int m = 0; m < coeffs.cells(); ++m) {
        const auto& members = coeffs.members(m);
        for (int c = 0; c < coeffs.ccs(); ++c) {
            for (int r = 0; r < coeffs.rbgs(); ++r) {
                auto& act = active_[flat(m, c, r)];
                const CoeffSlice& s = coeffs.slice(m, c, r);
                for (int j = 0; j < s.n; ++j) {
                    if (!init.get(m, members[j], c, r)) continue;
                    act.push_back(j);
                    if (!s.schedulable[j]) ++blocked_bits_;
                }
                if (static_cast<int>(act.size()) > coeffs.nt()) ++over_cap_;
            }
        }
    }
    const auto rates = approx_ue_rates(coeffs, init, scenario);
    for (const auto& ue : scenario.ues) {
        cumulative_[ue.id] = rates[ue.id];
        value_ += contribution(ue.id, rates[ue.id]);
        for (int c = 0; c < coeffs.ccs(); ++c)
            for (int r = 0; r < coeffs.rbgs(); ++r) bit_count_[ue.id] += bit(ue.id, c, r);
    }
}

bool PenaltyObjectiveState::bit(int ue, int c, int r) const {
    return schedule_.get(scenario_.ues[ue].serving_set.front(), ue, c, r);
}

double PenaltyObjectiveState::contribution(int ue, double total) const {
    return penalty_contribution(scenario_.ues[ue], rho_, total);
}

void PenaltyObjectiveState::accumulate(int ue, double delta) const {
    if (scratch_[ue] == 0.0 && std::find(touched_.begin(), touched_.end(), ue) == touched_.end())
        touched_.push_back(ue);
    scratch_[ue] += delta;
}

double PenaltyObjectiveState::flip_delta(int ue, int c, int r, bool on) const {
    touched_.clear();
    for (int m : scenario_.ues[ue].serving_set) {
        const CoeffSlice& s = coeffs_.slice(m, c, r);
        const auto& members = coeffs_.members(m);
        const auto& act = active_[flat(m, c, r)];
        const int lt = coeffs_.local(m, ue);
        const double phi = static_cast<double>(act.size());
        if (on) {
            // Everyone already scheduled loses power share and gains interference.
            const double share = std::log2(phi) - std::log2(phi + 1.0);
            double own = s.psi_eff[lt] - std::log2(phi + 1.0);
            for (int j : act) {
                const double dj = s.d_at(lt, j);
                own += dj;
                accumulate(members[j], coeffs_.weight(members[j]) * (dj + share));
            }
            accumulate(ue, coeffs_.weight(ue) * own);
        } else {
            const double share = phi > 1.0 ? std::log2(phi) - std::log2(phi - 1.0) : 0.0;
            double own = s.psi_eff[lt] - std::log2(phi);
            for (int j : act) {
                if (j == lt) continue;
                const double dj = s.d_at(lt, j);
                own += dj;
                accumulate(members[j], coeffs_.weight(members[j]) * (share - dj));
            }
            accumulate(ue, -coeffs_.weight(ue) * own);
        }
    }
    if (!on && bit_count_[ue] == 1) scratch_[ue] = -cumulative_[ue];
    double delta = 0.0;
    for (int k : touched_) {
        delta += contribution(k, cumulative_[k] + scratch_[k]) - contribution(k, cumulative_[k]);
    }
    return delta;
}

double PenaltyObjectiveState::gain(int ue, int c, int r) const {
    if (bit(ue, c, r)) {
        const double d = -flip_delta(ue, c, r, false);
        for (int k : touched_) scratch_[k] = 0.0;
        return d;
    }
    for (int m : scenario_.ues[ue].serving_set) {
        if (phi(m, c, r) >= coeffs_.nt()) return kBlockedGain;
        if (!coeffs_.slice(m, c, r).schedulable[coeffs_.local(m, ue)]) return kBlockedGain;
    }
    const double d = flip_delta(ue, c, r, true);
    for (int k : touched_) scratch_[k] = 0.0;
    return d;
}

double PenaltyObjectiveState::set(int ue, int c, int r, bool on) {
    if (bit(ue, c, r) == on) return 0.0;
    const double d = flip_delta(ue, c, r, on);
    for (int k : touched_) {
        cumulative_[k] += scratch_[k];
        scratch_[k] = 0.0;
    }
    value_ += d;
    for (int m : scenario_.ues[ue].serving_set) {
        auto& act = active_[flat(m, c, r)];
        const int lt = coeffs_.local(m, ue);
        const bool was_over = static_cast<int>(act.size()) > coeffs_.nt();
        if (on) {
            act.insert(std::lower_bound(act.begin(), act.end(), lt), lt);
        } else {
            act.erase(std::lower_bound(act.begin(), act.end(), lt));
        }
        const bool is_over = static_cast<int>(act.size()) > coeffs_.nt();
        over_cap_ += static_cast<int>(is_over) - static_cast<int>(was_over);
        if (!coeffs_.slice(m, c, r).schedulable[lt]) blocked_bits_ += on ? 1 : -1;
        schedule_.set(m, ue, c, r, on);
    }
    bit_count_[ue] += on ? 1 : -1;
    if (bit_count_[ue] == 0) cumulative_[ue] = 0.0;
    return d;
}

double PenaltyObjectiveState::recompute() const {
    return objective_G(coeffs_, schedule_, scenario_, rho_);
}

BcdResult centralized_bcd(const ApproxCoeffs& coeffs, const Scenario& scenario,
                          const BcdOptions& options, const Schedule& init) {
    if (options.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
    PenaltyObjectiveState state(coeffs, scenario, options.rho, init);

    std::vector<int> order(scenario.num_ues());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(options.shuffle_seed);

    BcdResult out;
    out.trace.push_back(state.value());
    out.min_update_delta = std::numeric_limits<double>::infinity();
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        if (options.shuffle_ues) std::shuffle(order.begin(), order.end(), rng);
        bool changed = false;
        for (int t : order) {
            for (int c = 0; c < coeffs.ccs(); ++c) {
                for (int r = 0; r < coeffs.rbgs(); ++r) {
                    const bool want = state.gain(t, c, r) > 0.0;
                    if (want == state.bit(t, c, r)) continue;
                    const double d = state.set(t, c, r, want);
                    out.min_update_delta = std::min(out.min_update_delta, d);
                    ++out.updates;
                    changed = true;
                }
            }
        }
        out.sweeps = sweep;
        out.trace.push_back(state.value());
        if (options.on_sweep) options.on_sweep(sweep, state.schedule(), state.value());
        if (!changed) {
            out.converged = true;
            break;
        }
    }
    if (out.updates == 0) out.min_update_delta = 0.0;
    out.schedule = state.schedule();
    return out;
}

BcdResult centralized_bcd(const ApproxCoeffs& coeffs, const Scenario& scenario,
                          const BcdOptions& options) {
    return centralized_bcd(coeffs, scenario, options, Schedule::empty(scenario));
}

}  // namespace jtsched
