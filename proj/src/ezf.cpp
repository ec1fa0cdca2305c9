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


#include "jtsched/ezf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "jtsched/errors.hpp"

namespace jtsched {

int CellBeams::position_of(int k) const {
    const auto it = std::lower_bound(ues.begin(), ues.end(), k);
    return (it != ues.end() && *it == k) ? static_cast<int>(it - ues.begin()) : -1;
}

double CellBeams::total_power() const {
    double p = 0.0;
    for (const auto& col : w) p += col.squaredNorm();
    return p;
}

const CVector* BeamformerSet::beam(int m, int k, int c, int r) const {
    const CellBeams& cb = at(m, c, r);
    const int pos = cb.position_of(k);
    return pos < 0 ? nullptr : &cb.w[pos];
}

CellBeams build_ezf(const Schedule& schedule, const TripletCache& triplets,
                    const Scenario& scenario, int m, int c, int r) {
    CellBeams out;
    out.ues = schedule.scheduled_ues(m, c, r);
    const int n = out.size();
    if (n == 0) return out;
    const int nt = scenario.config.nt;
    if (n > nt) {
        std::ostringstream os;
        os << n << " UEs scheduled on O-RU " << m << " RBG (" << c << "," << r << ") exceed nt=" << nt;
        throw IllConditionedError(os.str());
    }

    CMatrix v_hat(nt, n);
    for (int j = 0; j < n; ++j) v_hat.col(j) = triplets.at(out.ues[j], c, r).v_for(m);

    const CMatrix gram = v_hat.adjoint() * v_hat;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
        std::ostringstream os;
        os << "EZF Gram matrix ill-conditioned on O-RU " << m << " RBG (" << c << "," << r << ")";
        throw IllConditionedError(os.str());
    }

    const CMatrix w_hat = v_hat * gram.llt().solve(CMatrix::Identity(n, n));
    const double p = scenario.config.tx_power_per_rbg_w;
    const double scale = std::sqrt(p / n);
    out.w.reserve(n);
    out.w_hat_norm_sq.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double nsq = w_hat.col(j).squaredNorm();
        out.w_hat_norm_sq.push_back(nsq);
        out.w.emplace_back(w_hat.col(j) * (scale / std::sqrt(nsq)));
    }
    return out;
}

BeamformerSet build_all_beams(const Schedule& schedule, const TripletCache& triplets,
                              const Scenario& scenario) {
    const Dims d = scenario.dims();
    BeamformerSet beams(d);
    for (int m = 0; m < d.cells; ++m)
        for (int c = 0; c < d.ccs; ++c)
            for (int r = 0; r < d.rbgs; ++r) beams.at(m, c, r) = build_ezf(schedule, triplets, scenario, m, c, r);
    return beams;
}

ExactEvaluator::ExactEvaluator(const Scenario& scenario, const ChannelSet& channels,
                               const TripletCache& triplets)
    : scenario_(scenario), channels_(channels), triplets_(triplets) {}

void ExactEvaluator::load(const Schedule& schedule) {
    load(schedule, build_all_beams(schedule, triplets_, scenario_));
}

void ExactEvaluator::load(const Schedule& schedule, BeamformerSet beams) {
    schedule_ = schedule;
    beams_ = std::move(beams);
}

CRowVector ExactEvaluator::combined_row(int n, int x, int c, int r) const {
    return triplets_.at(x, c, r).u.adjoint() * channels_.at(n, x, c, r);
}

// |sum over O-RUs l scheduling y of u_x^H H_{l,x} w_{l,y}|^2
double ExactEvaluator::transmission_amplitude_sq(int x, int y, int c, int r) const {
    cdouble amp{0.0, 0.0};
    for (int l : scenario_.ues[y].serving_set) {
        const CVector* w = beams_.beam(l, y, c, r);
        if (w == nullptr) continue;
        amp += (combined_row(l, x, c, r) * (*w)).value();
    }
    return std::norm(amp);
}

double ExactEvaluator::sinr(int k, int c, int r) const {
    const UeProfile& ue = scenario_.ues[k];
    bool any = false;
    for (int m : ue.serving_set) any = any || schedule_.get(m, k, c, r);
    if (!any) return 0.0;

    const double signal = transmission_amplitude_sq(k, k, c, r);
    double interference = 0.0;
    for (int y = 0; y < scenario_.num_ues(); ++y) {
        if (y == k) continue;
        interference += transmission_amplitude_sq(k, y, c, r);
    }
    const double noise = scenario_.config.noise_power_w() * triplets_.at(k, c, r).u.squaredNorm();
    return signal / (interference + noise);
}

double ExactEvaluator::rate_njt(int k, int c, int r) const {
    const int m = scenario_.ues[k].serving_set.front();
    if (!schedule_.get(m, k, c, r)) return 0.0;
    return std::log2(1.0 + sinr(k, c, r));
}

double ExactEvaluator::rate_jt(int i, int c, int r, bool* inconsistent) const {
    const UeProfile& ue = scenario_.ues[i];
    if (inconsistent != nullptr) *inconsistent = false;
    if (!schedule_.consistent_on(ue, c, r)) {
        if (inconsistent != nullptr) *inconsistent = true;
        return 0.0;
    }
    if (!schedule_.consensus(ue, c, r)) return 0.0;
    return std::log2(1.0 + sinr(i, c, r));
}

double ExactEvaluator::rate(int k, int c, int r) const {
    return scenario_.ues[k].is_jt() ? rate_jt(k, c, r) : rate_njt(k, c, r);
}

double exact_rate_njt(const Schedule& schedule, const BeamformerSet& beams,
                      const ChannelSet& channels, const TripletCache& triplets,
                      const Scenario& scenario, int k, int c, int r) {
    ExactEvaluator eval(scenario, channels, triplets);
    eval.load(schedule, beams);
    return eval.rate_njt(k, c, r);
}

double exact_rate_jt(const Schedule& schedule, const BeamformerSet& beams,
                     const ChannelSet& channels, const TripletCache& triplets,
                     const Scenario& scenario, int i, int c, int r, bool* inconsistent) {
    ExactEvaluator eval(scenario, channels, triplets);
    eval.load(schedule, beams);
    return eval.rate_jt(i, c, r, inconsistent);
}

double simplified_sinr(const Schedule& schedule, const TripletCache& triplets,
                       const Scenario& scenario, int t, int m, int c, int r) {
    if (!schedule.get(m, t, c, r)) throw DomainError("simplified_sinr: UE is not scheduled by this O-RU");
    const CellBeams beams = build_ezf(schedule, triplets, scenario, m, c, r);
    const int pos = beams.position_of(t);
    const double lambda = triplets.at(t, c, r).lambda;
    return lambda * lambda * scenario.config.tx_power_per_rbg_w /
           (beams.size() * beams.w_hat_norm_sq[pos] * scenario.config.noise_power_w());
}

EsrResult summarize_rates(const Scenario& scenario, std::vector<double> ue_rate) {
    EsrResult out;
    for (const auto& ue : scenario.ues) {
        const double achieved = ue_rate[ue.id];
        if (ue.has_qos) {
            ++out.qos_ues;
            out.esr += std::min(achieved, ue.qos_demand);
            if (achieved >= ue.qos_demand) ++out.qos_met;
        } else {
            out.esr += achieved;
        }
    }
    out.sat = out.qos_ues == 0 ? 1.0 : static_cast<double>(out.qos_met) / out.qos_ues;
    out.ue_rate = std::move(ue_rate);
    return out;
}

EsrResult esr_and_sat(const Schedule& schedule, const ChannelSet& channels,
                      const TripletCache& triplets, const Scenario& scenario) {
    if (!schedule.consistent(scenario))
        throw InconsistentScheduleError("esr_and_sat requires a JT-consistent schedule");
    ExactEvaluator eval(scenario, channels, triplets);
    eval.load(schedule);
    const Dims d = scenario.dims();
    std::vector<double> rates(d.ues, 0.0);
    for (int k = 0; k < d.ues; ++k)
        for (int c = 0; c < d.ccs; ++c)
            for (int r = 0; r < d.rbgs; ++r) rates[k] += eval.rate(k, c, r);
    return summarize_rates(scenario, std::move(rates));
}

EsrResult esr_and_sat(const Schedule& schedule, const ChannelSet& channels,
                      const Scenario& scenario) {
    const TripletCache triplets = svd_cache(channels, scenario);
    return esr_and_sat(schedule, channels, triplets, scenario);
}

}  // namespace jtsched
