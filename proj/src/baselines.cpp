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


#include "jtsched/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "jtsched/errors.hpp"

namespace jtsched {

void BaselineConfig::validate() const {
    if (!(sus_orthogonality_eps > 0.0 && sus_orthogonality_eps < 1.0))
        throw ConfigError("sus_orthogonality_eps must lie in (0, 1)");
    if (sus_max_users < 0 || mshs_user_cap < 0) throw ConfigError("user caps must be non-negative");
    if (mshs_qos_weight < 0.0) throw ConfigError("mshs_qos_weight must be non-negative");
}

namespace {

double solo_snr(const SingularTriplet& t, int m, double snr_scale) {
    return t.lambda * t.lambda * t.v_for(m).squaredNorm() * snr_scale;
}

/// Keeps only JT bits every serving O-RU agrees on.
void and_consensus(Schedule& s, const Scenario& scenario, int c, int r) {
    for (int i : scenario.jt_ues()) {
        const UeProfile& ue = scenario.ues[i];
        bool all = true;
        for (int m : ue.serving_set) all = all && s.get(m, i, c, r);
        if (!all) s.set_consensus(ue, c, r, false);
    }
}

}  // namespace

bool simplified_sinr_set(const TripletCache& triplets, const Scenario& scenario, int m, int c, int r,
                         const std::vector<int>& ues, std::vector<double>& sinr) {
    const int n = static_cast<int>(ues.size());
    sinr.assign(n, 0.0);
    if (n == 0) return true;
    if (n > scenario.config.nt) return false;
    CMatrix v(scenario.config.nt, n);
    for (int j = 0; j < n; ++j) v.col(j) = triplets.at(ues[j], c, r).v_for(m);
    const CMatrix gram = v.adjoint() * v;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) return false;
    const CMatrix inv = gram.llt().solve(CMatrix::Identity(n, n));
    const double scale = scenario.config.snr_scale() / n;
    for (int j = 0; j < n; ++j) {
        const double lam = triplets.at(ues[j], c, r).lambda;
        sinr[j] = lam * lam * scale / inv(j, j).real();
    }
    return true;
}

Schedule sus_zf_schedule(const ChannelSet& /*channels*/, const TripletCache& triplets,
                         const Scenario& scenario, const BaselineConfig& config) {
    config.validate();
    const Dims dims = scenario.dims();
    const int nt = scenario.config.nt;
    const int cap = config.sus_max_users > 0 ? std::min(config.sus_max_users, nt) : nt;
    const double snr = scenario.config.snr_scale();
    Schedule s(dims);
    for (int c = 0; c < dims.ccs; ++c) {
        for (int r = 0; r < dims.rbgs; ++r) {
            for (int m = 0; m < dims.cells; ++m) {
                struct Cand {
                    int ue;
                    CVector g;  // conjugated equivalent channel, nt x 1
                    double norm_sq;
                };
                std::vector<Cand> pool;
                for (int k : scenario.members(m)) {
                    const SingularTriplet& t = triplets.at(k, c, r);
                    if (!t.schedulable || !(solo_snr(t, m, snr) > 1.0)) continue;
                    CVector g = t.lambda * t.v_for(m);
                    const double ns = g.squaredNorm();
                    if (ns > 0.0) pool.push_back({k, std::move(g), ns});
                }
                std::vector<CVector> basis;  // orthonormal span of the selection
                while (!pool.empty() && static_cast<int>(basis.size()) < cap) {
                    int best = -1;
                    double best_perp = -1.0;
                    CVector best_vec;
                    for (std::size_t q = 0; q < pool.size(); ++q) {
                        CVector perp = pool[q].g;
                        for (const auto& b : basis) perp -= b * b.dot(perp);
                        const double pn = perp.squaredNorm();
                        if (1.0 - pn / pool[q].norm_sq >= config.sus_orthogonality_eps) continue;
                        if (pn > best_perp) {
                            best_perp = pn;
                            best = static_cast<int>(q);
                            best_vec = std::move(perp);
                        }
                    }
                    if (best < 0) break;
                    s.set(m, pool[best].ue, c, r, true);
                    basis.push_back(best_vec / std::sqrt(best_perp));
                    pool.erase(pool.begin() + best);
                }
            }
            and_consensus(s, scenario, c, r);
        }
    }
    return s;
}

Schedule mshs_schedule(const ChannelSet& /*channels*/, const TripletCache& triplets,
                       const Scenario& scenario, const BaselineConfig& config) {
    config.validate();
    const Dims dims = scenario.dims();
    const int cap = std::min(config.mshs_user_cap > 0 ? config.mshs_user_cap : scenario.config.nt,
                             scenario.config.nt);
    const double snr = scenario.config.snr_scale();
    std::vector<double> achieved(dims.ues, 0.0);
    auto weight = [&](int k) {
        const UeProfile& ue = scenario.ues[k];
        if (config.mshs_qos_weight_fn == MshsWeighting::None || !ue.has_qos) return 1.0;
        const double unmet = std::max(0.0, ue.qos_demand - achieved[k]) / ue.qos_demand;
        return 1.0 + config.mshs_qos_weight * unmet;
    };

    Schedule s(dims);
    std::vector<double> sinr;
    for (int c = 0; c < dims.ccs; ++c) {
        for (int r = 0; r < dims.rbgs; ++r) {
            for (int m = 0; m < dims.cells; ++m) {
                std::vector<std::pair<double, int>> ranked;
                for (int k : scenario.members(m)) {
                    const SingularTriplet& t = triplets.at(k, c, r);
                    const double g = solo_snr(t, m, snr);
                    if (!t.schedulable || !(g > 1.0)) continue;
                    ranked.emplace_back(10.0 * std::log10(g) * weight(k), k);
                }
                std::stable_sort(ranked.begin(), ranked.end(),
                                 [](const auto& a, const auto& b) { return a.first > b.first; });
                std::vector<int> chosen;
                for (const auto& [score, k] : ranked) {
                    if (static_cast<int>(chosen.size()) >= cap) break;
                    std::vector<int> trial = chosen;
                    trial.insert(std::lower_bound(trial.begin(), trial.end(), k), k);
                    if (!simplified_sinr_set(triplets, scenario, m, c, r, trial, sinr)) continue;
                    chosen = std::move(trial);
                }
                for (int k : chosen) s.set(m, k, c, r, true);
            }
            and_consensus(s, scenario, c, r);

            // Credit the RBG to the unmet demand with the simplified rates.
            std::vector<double> jt_sum(dims.ues, 0.0);
            for (int m = 0; m < dims.cells; ++m) {
                const std::vector<int> set = s.scheduled_ues(m, c, r);
                if (!simplified_sinr_set(triplets, scenario, m, c, r, set, sinr)) continue;
                for (std::size_t j = 0; j < set.size(); ++j) {
                    const int k = set[j];
                    if (scenario.ues[k].is_jt()) jt_sum[k] += sinr[j];
                    else achieved[k] += std::log2(1.0 + sinr[j]);
                }
            }
            for (int i : scenario.jt_ues())
                if (jt_sum[i] > 0.0) achieved[i] += std::log2(1.0 + jt_sum[i]);
        }
    }
    return s;
}

}  // namespace jtsched
