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

#include <map>
#include <vector>

#include "jtsched/channel_algebra.hpp"
#include "jtsched/scenario.hpp"
#include "jtsched/schedule.hpp"

namespace jtsched {

/// Upper clamp applied to eta before taking log2(1 - eta).
inline constexpr double kEtaClamp = 1.0 - 1e-12;

/// Coefficients of one (m, c, r): indices are positions in Scenario::members(m).
struct CoeffSlice {
    int n = 0;
    std::vector<double> psi;      // log2(lambda^2 ||v_sub||^2 P / sigma^2)
    std::vector<double> psi_eff;  // psi, or log2|B| + psi for a JT-UE
    std::vector<std::uint8_t> schedulable;
    std::vector<double> eta;      // n x n, row-major, zero diagonal
    std::vector<double> d;        // n x n, log2(1 - eta), zero diagonal

    double d_at(int j, int t) const { return d[static_cast<std::size_t>(j) * n + t]; }
    double eta_at(int j, int t) const { return eta[static_cast<std::size_t>(j) * n + t]; }
};

/// Precomputed psi / d / eta for every O-RU slice plus per-UE rate weights
/// (1 for NJT, 1/|B| for JT).
class ApproxCoeffs {
public:
    ApproxCoeffs() = default;
    ApproxCoeffs(const Scenario& scenario);

    const CoeffSlice& slice(int m, int c, int r) const { return slices_[flat(m, c, r)]; }
    CoeffSlice& slice(int m, int c, int r) { return slices_[flat(m, c, r)]; }

    int cells() const { return cells_; }
    int ccs() const { return ccs_; }
    int rbgs() const { return rbgs_; }
    int nt() const { return nt_; }

    const std::vector<int>& members(int m) const { return members_[m]; }
    int local(int m, int k) const { return local_[static_cast<std::size_t>(m) * ues_ + k]; }
    double weight(int k) const { return weight_[k]; }

    /// Convenience lookups by global UE id; throw DomainError off-association.
    double psi(int m, int k, int c, int r) const;
    double psi_eff(int m, int k, int c, int r) const;
    double d(int m, int j, int t, int c, int r) const;
    double eta(int m, int j, int t, int c, int r) const;

private:
    std::size_t flat(int m, int c, int r) const {
        return (static_cast<std::size_t>(m) * ccs_ + c) * rbgs_ + r;
    }
    int local_checked(int m, int k) const;

    int cells_ = 0;
    int ues_ = 0;
    int ccs_ = 0;
    int rbgs_ = 0;
    int nt_ = 0;
    std::vector<std::vector<int>> members_;
    std::vector<int> local_;
    std::vector<double> weight_;
    std::vector<CoeffSlice> slices_;
};

ApproxCoeffs build_coeffs(const TripletCache& triplets, const Scenario& scenario);

/// Separable approximate rate of UE t as served by O-RU m on (c, r):
/// b * weight * (psi_eff + sum_j b_j d_{j,t} - log2 phi). Zero when b = 0.
double approx_rate(const ApproxCoeffs& coeffs, const Schedule& schedule, int m, int t, int c, int r);

/// Per-UE total approximate rate (JT summed over its serving O-RUs).
std::vector<double> approx_ue_rates(const ApproxCoeffs& coeffs, const Schedule& schedule,
                                    const Scenario& scenario);

struct JensenDecomposition {
    double total = 0.0;               // sum of the per-cell terms
    std::map<int, double> per_cell;   // b log2(|B| gamma_m) / |B|
    double log_sum_sinr = 0.0;        // b log2(sum_m gamma_m)
    double log_coherent_sinr = 0.0;   // b log2((sum_m sqrt(gamma_m))^2)
};

/// Jensen lower-bound decomposition of a JT-UE's high-SINR rate, with the
/// per-cell SINRs from intra-cell EZF. Requires a consistent schedule for i.
JensenDecomposition jensen_decomposed_jt_rate(const TripletCache& triplets,
                                              const Scenario& scenario,
                                              const Schedule& schedule, int i, int c, int r);

}  // namespace jtsched
