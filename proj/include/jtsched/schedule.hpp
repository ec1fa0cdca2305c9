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

#include <cstdint>
#include <string>
#include <vector>

#include "jtsched/scenario.hpp"
#include "jtsched/types.hpp"

namespace jtsched {

/// Binary allocation tensor b[m][k][c][r].
class Schedule {
public:
    Schedule() = default;
    explicit Schedule(Dims dims) : dims_(dims), bits_(dims.tensor_size(), 0) {}
    static Schedule empty(const Scenario& scenario) { return Schedule(scenario.dims()); }

    const Dims& dims() const { return dims_; }

    bool get(int m, int k, int c, int r) const { return bits_[dims_.flat(m, k, c, r)] != 0; }
    void set(int m, int k, int c, int r, bool on) { bits_[dims_.flat(m, k, c, r)] = on ? 1 : 0; }

    /// Writes the same bit on every O-RU serving `ue`.
    void set_consensus(const UeProfile& ue, int c, int r, bool on);

    /// True when all serving O-RUs of `ue` agree on every RBG.
    bool consistent_for(const UeProfile& ue) const;
    bool consistent_on(const UeProfile& ue, int c, int r) const;
    bool consistent(const Scenario& scenario) const;

    /// Consensus bit b_i^{c,r}; only meaningful when consistent_on holds.
    bool consensus(const UeProfile& ue, int c, int r) const {
        return get(ue.serving_set.front(), ue.id, c, r);
    }

    /// True when no bit is set for a (cell, UE) pair outside the association.
    bool respects_association(const Scenario& scenario) const;

    /// Number of UEs scheduled by O-RU m on (c, r).
    int scheduled_count(int m, int c, int r) const;
    std::vector<int> scheduled_ues(int m, int c, int r) const;
    int max_scheduled_count() const;
    std::size_t popcount() const;

    const std::vector<std::uint8_t>& raw() const { return bits_; }
    bool operator==(const Schedule&) const = default;

private:
    Dims dims_;
    std::vector<std::uint8_t> bits_;
};

/// JSON with the dimensions and a run-length encoded bit stream in
/// (m, k, c, r) row-major order.
std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& text);

}  // namespace jtsched
