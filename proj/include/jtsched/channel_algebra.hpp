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

#include "jtsched/scenario.hpp"
#include "jtsched/types.hpp"

namespace jtsched {

/// Dominant singular triplet of a (possibly stacked) channel. For a JT-UE the
/// right singular vector is split into one nt-long slice per serving O-RU,
/// in serving-set order.
struct SingularTriplet {
    double lambda = 0.0;
    CVector u;
    std::vector<int> cells;
    std::vector<CVector> v_sub;
    double frobenius = 0.0;
    /// False when lambda < 1e-12 * ||H||_F; schedulers never pick such entries.
    bool schedulable = true;

    /// Slice for O-RU m; throws DomainError if m does not serve this UE.
    const CVector& v_for(int m) const;
    bool has_cell(int m) const;
};

enum class SvdBackend {
    Jacobi,  // Eigen::JacobiSVD on H
    Gram,    // Hermitian eigen-decomposition of H H^H
};

/// Dominant triplet of H with the phase of u normalized so that its
/// largest-magnitude entry is real and positive. `cells` gives the slice
/// layout of the columns (one nt-block per entry).
SingularTriplet dominant_triplet(const CMatrix& h, const std::vector<int>& cells,
                                 SvdBackend backend = SvdBackend::Jacobi);

/// Triplets for every (UE, c, r) of an associated scenario.
class TripletCache {
public:
    TripletCache() = default;
    TripletCache(int ues, int ccs, int rbgs)
        : ues_(ues), ccs_(ccs), rbgs_(rbgs),
          data_(static_cast<std::size_t>(ues) * ccs * rbgs) {}

    const SingularTriplet& at(int k, int c, int r) const { return data_[flat(k, c, r)]; }
    SingularTriplet& at(int k, int c, int r) { return data_[flat(k, c, r)]; }

    int ues() const { return ues_; }
    int ccs() const { return ccs_; }
    int rbgs() const { return rbgs_; }

private:
    std::size_t flat(int k, int c, int r) const {
        return (static_cast<std::size_t>(k) * ccs_ + c) * rbgs_ + r;
    }
    int ues_ = 0;
    int ccs_ = 0;
    int rbgs_ = 0;
    std::vector<SingularTriplet> data_;
};

/// Stacks [H_{m,k}]_{m in B_k} column-wise.
CMatrix stacked_channel(const ChannelSet& channels, const UeProfile& ue, int c, int r);

TripletCache svd_cache(const ChannelSet& channels, const Scenario& scenario,
                       SvdBackend backend = SvdBackend::Jacobi);

/// lambda * v_sub[m]^H, the effective row channel after receive combining.
CRowVector equivalent_channel(const SingularTriplet& triplet, int m);

/// |v_j^H v_t|^2 / (||v_j||^2 ||v_t||^2); zero if either vector is zero.
double direction_correlation(const CVector& vj, const CVector& vt);

}  // namespace jtsched
