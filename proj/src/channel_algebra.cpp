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


#include "jtsched/channel_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "jtsched/errors.hpp"

namespace jtsched {

const CVector& SingularTriplet::v_for(int m) const {
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == m) return v_sub[i];
    std::ostringstream os;
    os << "O-RU " << m << " is not in the serving set";
    throw DomainError(os.str());
}

bool SingularTriplet::has_cell(int m) const {
    return std::find(cells.begin(), cells.end(), m) != cells.end();
}

namespace {

// Rotate (u, v) jointly so the largest-magnitude entry of u is real positive.
// Ties on magnitude resolve to the lowest index.
void normalize_phase(CVector& u, CVector& v) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u(i));
        if (a > best * (1.0 + 1e-12)) {
            best = a;
            pivot = i;
        }
    }
    if (best <= 0.0) return;
    const cdouble phase = std::conj(u(pivot)) / std::abs(u(pivot));
    u *= phase;
    v *= phase;
    u(pivot) = cdouble(u(pivot).real(), 0.0);
}

}  // namespace

SingularTriplet dominant_triplet(const CMatrix& h, const std::vector<int>& cells,
                                 SvdBackend backend) {
    SingularTriplet out;
    out.cells = cells;
    out.frobenius = h.norm();

    CVector u;
    CVector v;
    double lambda = 0.0;
    if (backend == SvdBackend::Jacobi) {
        Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
        lambda = svd.singularValues()(0);
        u = svd.matrixU().col(0);
        v = svd.matrixV().col(0);
    } else {
        const CMatrix gram = h * h.adjoint();
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
        const Eigen::Index top = gram.rows() - 1;  // eigenvalues ascend
        lambda = std::sqrt(std::max(eig.eigenvalues()(top), 0.0));
        u = eig.eigenvectors().col(top);
        v = lambda > 0.0 ? CVector(h.adjoint() * u / lambda) : CVector::Zero(h.cols());
    }
    normalize_phase(u, v);

    out.lambda = lambda;
    out.u = std::move(u);
    out.schedulable = lambda >= 1e-12 * out.frobenius && lambda > 0.0;

    const Eigen::Index nt = h.cols() / static_cast<Eigen::Index>(std::max<std::size_t>(cells.size(), 1));
    out.v_sub.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        out.v_sub.emplace_back(v.segment(static_cast<Eigen::Index>(i) * nt, nt));
    return out;
}

CMatrix stacked_channel(const ChannelSet& channels, const UeProfile& ue, int c, int r) {
    const int nt = channels.nt();
    CMatrix h(channels.nr(), nt * static_cast<int>(ue.serving_set.size()));
    for (std::size_t i = 0; i < ue.serving_set.size(); ++i)
        h.middleCols(static_cast<Eigen::Index>(i) * nt, nt) = channels.at(ue.serving_set[i], ue.id, c, r);
    return h;
}

TripletCache svd_cache(const ChannelSet& channels, const Scenario& scenario, SvdBackend backend) {
    const Dims dims = scenario.dims();
    TripletCache cache(dims.ues, dims.ccs, dims.rbgs);
    for (const auto& ue : scenario.ues) {
        if (ue.serving_set.empty()) throw ConfigError("svd_cache requires associated UEs");
        for (int c = 0; c < dims.ccs; ++c) {
            for (int r = 0; r < dims.rbgs; ++r) {
                const CMatrix h = stacked_channel(channels, ue, c, r);
                if (h.norm() == 0.0) {
                    std::ostringstream os;
                    os << "all-zero channel for UE " << ue.id << " on RBG (" << c << "," << r << ")";
                    throw DegenerateChannelError(ue.id, c, r, os.str());
                }
                cache.at(ue.id, c, r) = dominant_triplet(h, ue.serving_set, backend);
            }
        }
    }
    return cache;
}

CRowVector equivalent_channel(const SingularTriplet& triplet, int m) {
    return triplet.lambda * triplet.v_for(m).adjoint();
}

double direction_correlation(const CVector& vj, const CVector& vt) {
    const double nj = vj.squaredNorm();
    const double nk = vt.squaredNorm();
    if (nj == 0.0 || nk == 0.0) return 0.0;
    const double ip = std::norm(vj.dot(vt));
    return std::clamp(ip / (nj * nk), 0.0, 1.0);
}

}  // namespace jtsched
