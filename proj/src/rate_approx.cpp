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


#include "jtsched/rate_approx.hpp"

#include <cassert>
#include <algorithm>
#include <cmath>
#include <limits>

#include "jtsched/errors.hpp"
#include "jtsched/ezf.hpp"

namespace jtsched {

ApproxCoeffs::ApproxCoeffs(const Scenario& scenario)
    : cells_(scenario.config.num_cells),
      ues_(scenario.num_ues()),
      ccs_(scenario.config.num_ccs),
      rbgs_(scenario.config.num_rbgs_per_cc),
      nt_(scenario.config.nt),
      local_(static_cast<std::size_t>(cells_) * ues_, -1),
      weight_(ues_, 1.0),
      slices_(static_cast<std::size_t>(cells_) * ccs_ * rbgs_) {
    members_.reserve(cells_);
    for (int m = 0; m < cells_; ++m) {
        members_.push_back(scenario.members(m));
        for (int k : members_.back()) local_[static_cast<std::size_t>(m) * ues_ + k] = scenario.local_index(m, k);
    }
    for (const auto& ue : scenario.ues) weight_[ue.id] = 1.0 / static_cast<double>(ue.serving_set.size());
}

int ApproxCoeffs::local_checked(int m, int k) const {
    const int j = local(m, k);
    if (j < 0) throw DomainError("UE is not associated with this O-RU");
    return j;
}

double ApproxCoeffs::psi(int m, int k, int c, int r) const {
    return slice(m, c, r).psi[local_checked(m, k)];
}

double ApproxCoeffs::psi_eff(int m, int k, int c, int r) const {
    return slice(m, c, r).psi_eff[local_checked(m, k)];
}

double ApproxCoeffs::d(int m, int j, int t, int c, int r) const {
    return slice(m, c, r).d_at(local_checked(m, j), local_checked(m, t));
}

double ApproxCoeffs::eta(int m, int j, int t, int c, int r) const {
    return slice(m, c, r).eta_at(local_checked(m, j), local_checked(m, t));
}

ApproxCoeffs build_coeffs(const TripletCache& triplets, const Scenario& scenario) {
    ApproxCoeffs coeffs(scenario);
    const double snr = scenario.config.snr_scale();
    for (int m = 0; m < coeffs.cells(); ++m) {
        const auto& members = coeffs.members(m);
        const int n = static_cast<int>(members.size());
        for (int c = 0; c < coeffs.ccs(); ++c) {
            for (int r = 0; r < coeffs.rbgs(); ++r) {
                CoeffSlice& s = coeffs.slice(m, c, r);
                s.n = n;
                s.psi.resize(n);
                s.psi_eff.resize(n);
                s.schedulable.resize(n);
                s.eta.assign(static_cast<std::size_t>(n) * n, 0.0);
                s.d.assign(static_cast<std::size_t>(n) * n, 0.0);
                std::vector<const CVector*> dirs(n);
                for (int t = 0; t < n; ++t) {
                    const int k = members[t];
                    const SingularTriplet& tri = triplets.at(k, c, r);
                    const CVector& v = tri.v_for(m);
                    dirs[t] = &v;
                    const double gain = tri.lambda * tri.lambda * v.squaredNorm() * snr;
                    s.schedulable[t] = tri.schedulable && gain > 0.0 ? 1 : 0;
                    s.psi[t] = gain > 0.0 ? std::log2(gain) : -std::numeric_limits<double>::infinity();
                    const double nb = static_cast<double>(scenario.ues[k].serving_set.size());
                    s.psi_eff[t] = scenario.ues[k].is_jt() ? std::log2(nb) + s.psi[t] : s.psi[t];
                }
                for (int j = 0; j < n; ++j) {
                    for (int t = j + 1; t < n; ++t) {
                        const double eta = direction_correlation(*dirs[j], *dirs[t]);
                        const double dd = std::log2(1.0 - std::min(eta, kEtaClamp));
                        s.eta[static_cast<std::size_t>(j) * n + t] = eta;
                        s.eta[static_cast<std::size_t>(t) * n + j] = eta;
                        s.d[static_cast<std::size_t>(j) * n + t] = dd;
                        s.d[static_cast<std::size_t>(t) * n + j] = dd;
                    }
                }
            }
        }
    }
    return coeffs;
}

double approx_rate(const ApproxCoeffs& coeffs, const Schedule& schedule, int m, int t, int c, int r) {
    const int lt = coeffs.local(m, t);
    if (lt < 0) throw DomainError("approx_rate: UE is not associated with this O-RU");
    if (!schedule.get(m, t, c, r)) return 0.0;
    const CoeffSlice& s = coeffs.slice(m, c, r);
    const auto& members = coeffs.members(m);
    int phi = 0;
    double interference = 0.0;
    for (int j = 0; j < s.n; ++j) {
        if (!schedule.get(m, members[j], c, r)) continue;
        ++phi;
        if (j != lt) interference += s.d_at(j, lt);
    }
    assert(phi >= 1);
    return coeffs.weight(t) * (s.psi_eff[lt] + interference - std::log2(static_cast<double>(phi)));
}

std::vector<double> approx_ue_rates(const ApproxCoeffs& coeffs, const Schedule& schedule,
                                    const Scenario& scenario) {
    std::vector<double> rates(scenario.num_ues(), 0.0);
    for (int m = 0; m < coeffs.cells(); ++m)
        for (int k : coeffs.members(m))
            for (int c = 0; c < coeffs.ccs(); ++c)
                for (int r = 0; r < coeffs.rbgs(); ++r) rates[k] += approx_rate(coeffs, schedule, m, k, c, r);
    return rates;
}

JensenDecomposition jensen_decomposed_jt_rate(const TripletCache& triplets, const Scenario& scenario,
                                              const Schedule& schedule, int i, int c, int r) {
    const UeProfile& ue = scenario.ues[i];
    if (!schedule.consistent_on(ue, c, r))
        throw InconsistentScheduleError("jensen_decomposed_jt_rate requires a consistent schedule");
    JensenDecomposition out;
    if (!schedule.consensus(ue, c, r)) {
        for (int m : ue.serving_set) out.per_cell[m] = 0.0;
        return out;
    }
    const double nb = static_cast<double>(ue.serving_set.size());
    double sum_gamma = 0.0;
    double sum_sqrt = 0.0;
    for (int m : ue.serving_set) {
        const double gamma = simplified_sinr(schedule, triplets, scenario, i, m, c, r);
        const double term = std::log2(nb * gamma) / nb;
        out.per_cell[m] = term;
        out.total += term;
        sum_gamma += gamma;
        sum_sqrt += std::sqrt(gamma);
    }
    out.log_sum_sinr = std::log2(sum_gamma);
    out.log_coherent_sinr = std::log2(sum_sqrt * sum_sqrt);
    return out;
}

}  // namespace jtsched
