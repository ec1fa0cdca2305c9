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

#include <complex>

#include <Eigen/Dense>

namespace jtsched {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

/// Dimensions shared by every (cell, UE, CC, RBG) indexed tensor.
struct Dims {
    int cells = 0;
    int ues = 0;
    int ccs = 0;
    int rbgs = 0;

    int rbgs_total() const { return ccs * rbgs; }
    std::size_t tensor_size() const {
        return static_cast<std::size_t>(cells) * ues * ccs * rbgs;
    }
    std::size_t flat(int m, int k, int c, int r) const {
        return ((static_cast<std::size_t>(m) * ues + k) * ccs + c) * rbgs + r;
    }
    bool operator==(const Dims&) const = default;
};

}  // namespace jtsched
