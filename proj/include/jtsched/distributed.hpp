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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jtsched/rate_approx.hpp"
#include "jtsched/scenario.hpp"
#include "jtsched/schedule.hpp"

namespace jtsched {

/// Byte accounting used by the ledger.
inline constexpr std::size_t kScalarBytes = 8;
inline constexpr std::size_t kHeaderBytes = 16;

/// One JT-UE entry uploaded by core [m, c] for RBG r.
struct JtCandidate {
    int ue = 0;
    int r = 0;
    bool stage1_bit = false;
    bool schedulable = true;
    double rate_bar = 0.0;   // rate with the bit tentatively 1
    double inf_1to0 = 0.0;   // change of the other users' rates when i leaves
    double inf_0to1 = 0.0;   // change of the other users' rates when i joins
};

/// Rate of an NJT-UE on an RBG that Stage 1 left scheduled.
struct NjtActiveRate {
    int ue = 0;
    int cc = 0;
    int r = 0;
    double rate = 0.0;
};

struct CoordinationPayload {
    int cell = 0;
    int cc = 0;
    std::vector<JtCandidate> jt;            // jt_ues(cell) ascending, then r
    std::vector<NjtActiveRate> njt_active;  // ue ascending, then r
    /// Size of the JT part sent to PU0.
    std::size_t upload_bytes() const;
    /// Size of the NJT part shared with the sibling cores.
    std::size_t intra_bytes() const;
};

/// Dense rate tensor over (m, k, c, r).
struct RateTensor {
    Dims dims;
    std::vector<double> values;
    RateTensor() = default;
    explicit RateTensor(Dims d) : dims(d), values(d.tensor_size(), 0.0) {}
    double& at(int m, int k, int c, int r) { return values[dims.flat(m, k, c, r)]; }
    double at(int m, int k, int c, int r) const { return values[dims.flat(m, k, c, r)]; }
};

/// qos_bar[m][k][c]: rate credited to UE k from every core except [m, c].
struct QosContribution {
    int cells = 0;
    int ues = 0;
    int ccs = 0;
    std::vector<double> values;
    QosContribution() = default;
    QosContribution(int m, int k, int c)
        : cells(m), ues(k), ccs(c), values(static_cast<std::size_t>(m) * k * c, 0.0) {}
    double& at(int m, int k, int c) { return values[(static_cast<std::size_t>(m) * ues + k) * ccs + c]; }
    double at(int m, int k, int c) const {
        return values[(static_cast<std::size_t>(m) * ues + k) * ccs + c];
    }
};

/// Message counts per PU. Index 0 is the coordinator PU0, 1..M the workers.
struct MessageLedger {
    struct Entry {
        int upload_rounds = 0;
        int download_rounds = 0;
        int intra_rounds = 0;
        std::size_t upload_bytes = 0;
        std::size_t download_bytes = 0;
        std::size_t intra_bytes = 0;
        std::size_t total_bytes() const { return upload_bytes + download_bytes + intra_bytes; }
    };
    std::vector<Entry> pus;
    std::size_t total_bytes() const;
    /// True when every worker PU shows exactly one upload and one download.
    bool single_round() const;
    std::string to_json() const;
};

/// Bits of one core [m, c]: members(m) x R, row-major.
struct CoreAllocation {
    int cell = 0;
    int cc = 0;
    int rbgs = 0;
    std::vector<int> members;
    std::vector<std::uint8_t> bits;
    bool get(int j, int r) const { return bits[static_cast<std::size_t>(j) * rbgs + r] != 0; }
    void set(int j, int r, bool on) { bits[static_cast<std::size_t>(j) * rbgs + r] = on ? 1 : 0; }
    std::size_t popcount() const;
};

struct Stage1Options {
    double rho = 5.0;
    double alpha = 0.5;
    int max_sweeps = 10;
};

struct Stage1Output {
    CoreAllocation bits;
    CoordinationPayload payload;
    std::vector<double> trace;  // local objective before sweeping, then per sweep
    int sweeps = 0;
};

/// Local scheduling of core [m, c] with the relative-rate filter, followed by
/// the coordination payload. Reads only the (m, c) coefficients.
Stage1Output stage1_local(const ApproxCoeffs& coeffs, const Scenario& scenario, int m, int c,
                          const Stage1Options& options);

/// INF deltas of UE position `lt` against the set S of other scheduled
/// positions on slice (m, c, r). Zero for an empty S.
double inf_delta_1to0(const CoeffSlice& slice, int lt, const std::vector<int>& others);
double inf_delta_0to1(const CoeffSlice& slice, int lt, const std::vector<int>& others);

struct Stage21Output {
    Schedule consensus;  // JT bits only, consistent across serving sets
    RateTensor rate_hat;
    QosContribution qos_bar;
    std::vector<int> best_effort;  // QoS JT-UEs whose demand no RBG subset meets
    int capped_bits = 0;           // consensus bits dropped by the nt cap
};

/// Consensus decisions at PU0. `payloads` must hold one entry per core;
/// throws ProtocolError otherwise.
Stage21Output stage21_jt_coordinate(const std::vector<CoordinationPayload>& payloads,
                                    const Scenario& scenario);

/// Minimum-count prefix of `rates` sorted descending (stable) whose sum
/// reaches q. Returns the chosen indices; *feasible is false (and every
/// index is returned) when the full sum falls short.
std::vector<int> min_count_prefix(const std::vector<double>& rates, double q, bool* feasible);

struct Stage22Output {
    int cell = 0;
    std::vector<NjtActiveRate> released;
    QosContribution qos_bar;  // only row `cell` is written
    std::vector<int> best_effort;
};

/// QoS decoupling of PU m over its C core payloads (cc ascending). With
/// `prune` false nothing is released and no credit is computed.
Stage22Output stage22_njt_decouple(const std::vector<CoordinationPayload>& cell_payloads,
                                   const Scenario& scenario, int m, bool prune = true);

struct Stage3Output {
    CoreAllocation bits;
    std::vector<double> trace;      // objective before sweeping, then per sweep
    double min_update_delta = 0.0;  // smallest change over all bit updates
    int trimmed = 0;                // NJT bits removed to respect nt
    int sweeps = 0;
};

/// NJT refinement of core [m, c] with the JT bits in `init` frozen.
/// `offsets` holds qos_bar per member position.
Stage3Output stage3_refine(const ApproxCoeffs& coeffs, const Scenario& scenario, int m, int c,
                           const CoreAllocation& init, const std::vector<double>& offsets,
                           double rho, int max_sweeps);

struct DistributedOptions {
    double rho = 5.0;
    double alpha = 0.5;
    int stage1_max_sweeps = 10;
    int stage3_max_sweeps = 20;
    int worker_threads = 1;
    /// False gives the variant without NJT QoS decoupling across cores.
    bool njt_decoupling = true;
};

struct StageTraceRow {
    std::string stage;
    int cell = -1;
    int cc = -1;
    int step = 0;
    double objective = 0.0;
    std::size_t bits_set = 0;
};

struct DistributedResult {
    Schedule schedule;
    Schedule stage1;  // raw Stage-1 bits, possibly JT-inconsistent
    Schedule stage2;  // after consensus and QoS decoupling
    MessageLedger ledger;
    std::vector<StageTraceRow> trace;
    std::vector<int> best_effort;
    double stage3_min_delta = 0.0;
    double objective = 0.0;  // global penalty objective of the final schedule
};

DistributedResult run_distributed(const ApproxCoeffs& coeffs, const Scenario& scenario,
                                  const DistributedOptions& options);

std::string stage_trace_csv(const std::vector<StageTraceRow>& rows);

}  // namespace jtsched
