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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "jtsched/central.hpp"
#include "jtsched/core_problem.hpp"
#include "jtsched/distributed.hpp"
#include "jtsched/errors.hpp"
#include "jtsched/parallel.hpp"
#include "test_support.hpp"

using namespace jtsched;

namespace {

// Smallest subset size reaching q, by exhaustive search; -1 if none.
int exhaustive_min_count(const std::vector<double>& rates, double q) {
    const int n = static_cast<int>(rates.size());
    int best = -1;
    for (int mask = 0; mask < (1 << n); ++mask) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) s += rates[i];
        const int cnt = __builtin_popcount(static_cast<unsigned>(mask));
        if (s >= q && (best < 0 || cnt < best)) best = cnt;
    }
    return best;
}

Instance mixed(std::uint64_t seed, int ccs = 2) {
    testing::ManualSpec spec;
    spec.cells = 2;
    spec.ccs = ccs;
    spec.rbgs = 3;
    spec.nt = 8;
    spec.nr = 2;
    spec.serving = {{0}, {0}, {0, 1}, {1}, {1}, {0, 1}, {0}};
    spec.qos = {0.0, 9.0, 7.0, 0.0, 20.0, 0.0, 4.0};
    spec.seed = seed;
    return testing::manual_instance(spec);
}

}  // namespace

TEST_CASE("min-count prefix matches the exhaustive minimum") {
    bool feasible = false;
    CHECK(min_count_prefix({8, 6, 5, 3, 2}, 12, &feasible) == std::vector<int>{0, 1});
    CHECK(feasible);
    CHECK(min_count_prefix({2, 9, 1}, 9, &feasible) == std::vector<int>{1});
    CHECK(min_count_prefix({1, 2}, 10, &feasible) == std::vector<int>{0, 1});
    CHECK_FALSE(feasible);
    CHECK(min_count_prefix({1, 2}, 0.0, &feasible).empty());
    CHECK(feasible);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> rates(1 + trial % 8);
        for (double& x : rates) x = u(rng);
        const double q = u(rng) * 3.0;
        const auto pick = min_count_prefix(rates, q, &feasible);
        const int best = exhaustive_min_count(rates, q);
        CHECK(feasible == (best >= 0));
        if (feasible) CHECK(static_cast<int>(pick.size()) == best);
    }
}

TEST_CASE("INF deltas match a from-scratch rate difference") {
    for (int seed = 1; seed <= 10; ++seed) {
        testing::ManualSpec spec;
        spec.nt = 8;
        spec.nr = 2;
        spec.serving = {{0}, {0}, {0}, {0}};
        spec.seed = static_cast<std::uint64_t>(seed);
        Instance inst = testing::manual_instance(spec);
        Schedule with(inst.scenario.dims());
        for (int k = 0; k < 4; ++k) with.set(0, k, 0, 0, true);
        Schedule without = with;
        without.set(0, 0, 0, 0, false);
        double diff = 0.0;
        for (int k = 1; k < 4; ++k)
            diff += approx_rate(inst.coeffs, without, 0, k, 0, 0) - approx_rate(inst.coeffs, with, 0, k, 0, 0);
        const CoeffSlice& sl = inst.coeffs.slice(0, 0, 0);
        const double v = inf_delta_1to0(sl, 0, {1, 2, 3});
        CHECK(v == doctest::Approx(diff).epsilon(1e-9));
        CHECK(v >= 0.0);
        CHECK(inf_delta_0to1(sl, 0, {1, 2, 3}) <= 0.0);
        CHECK(inf_delta_0to1(sl, 0, {1, 2, 3}) == doctest::Approx(-v));
        CHECK(inf_delta_1to0(sl, 0, {}) == 0.0);
    }
}

TEST_CASE("stage 1 payload covers every JT entry and active NJT bit") {
    Instance inst = mixed(3);
    for (int m = 0; m < 2; ++m)
        for (int c = 0; c < 2; ++c) {
            const Stage1Output o = stage1_local(inst.coeffs, inst.scenario, m, c, {});
            CHECK(o.payload.cell == m);
            CHECK(o.payload.cc == c);
            CHECK(o.payload.jt.size() == inst.scenario.jt_ues(m).size() * 3);
            std::size_t njt_bits = 0;
            for (std::size_t j = 0; j < o.bits.members.size(); ++j)
                if (!inst.scenario.ues[o.bits.members[j]].is_jt())
                    for (int r = 0; r < 3; ++r) njt_bits += o.bits.get(static_cast<int>(j), r);
            CHECK(o.payload.njt_active.size() == njt_bits);
            for (const auto& e : o.payload.jt) {
                CHECK(e.inf_1to0 >= 0.0);
                CHECK(e.inf_0to1 <= 0.0);
            }
            CHECK(o.sweeps <= 10);
            CHECK(o.payload.upload_bytes() == kHeaderBytes + o.payload.jt.size() * 25);
        }
    Stage1Options bad;
    bad.alpha = 1.0;
    CHECK_THROWS_AS(stage1_local(inst.coeffs, inst.scenario, 0, 0, bad), ConfigError);
}

TEST_CASE("a strict alpha keeps only the dominant RBG per UE") {
    for (int seed = 1; seed <= 5; ++seed) {
        Instance inst = mixed(seed);
        Stage1Options o;
        o.alpha = 0.99;
        const Stage1Output out = stage1_local(inst.coeffs, inst.scenario, 0, 0, o);
        for (std::size_t j = 0; j < out.bits.members.size(); ++j) {
            int on = 0;
            for (int r = 0; r < 3; ++r) on += out.bits.get(static_cast<int>(j), r);
            CHECK(on <= 1);
        }
    }
}

TEST_CASE("stage 1 only reads its own core") {
    testing::ManualSpec spec;
    spec.cells = 2;
    spec.ccs = 2;
    spec.rbgs = 3;
    spec.nt = 8;
    spec.nr = 2;
    spec.serving = {{0}, {0}, {0, 1}, {1}};
    spec.qos = {0.0, 5.0, 0.0, 3.0};
    auto [s, ch] = testing::manual_scenario(spec);
    Instance a = make_instance(s, ch);
    std::mt19937_64 rng(1);
    ChannelSet other = ch;
    for (int k = 0; k < 4; ++k)
        for (int r = 0; r < 3; ++r) {
            other.at(1, k, 0, r) = testing::gaussian(rng, 2, 8, 1e-3);
            other.at(0, k, 1, r) = testing::gaussian(rng, 2, 8, 1e-3);
        }
    // Core [0, 0] also depends on the stacked JT direction, so only perturb
    // what no JT-UE of cell 0 stacks on CC 0.
    for (int r = 0; r < 3; ++r) other.at(1, 2, 0, r) = ch.at(1, 2, 0, r);
    Instance b = make_instance(s, other);
    const auto x = stage1_local(a.coeffs, a.scenario, 0, 0, {});
    const auto y = stage1_local(b.coeffs, b.scenario, 0, 0, {});
    CHECK(x.bits.bits == y.bits.bits);
}

TEST_CASE("stage 2.1 validates its payloads") {
    Instance inst = mixed(1);
    std::vector<CoordinationPayload> payloads;
    for (int m = 0; m < 2; ++m)
        for (int c = 0; c < 2; ++c) payloads.push_back(stage1_local(inst.coeffs, inst.scenario, m, c, {}).payload);
    auto missing = payloads;
    missing.pop_back();
    CHECK_THROWS_AS(stage21_jt_coordinate(missing, inst.scenario), ProtocolError);
    auto dup = payloads;
    dup.push_back(payloads.front());
    CHECK_THROWS_AS(stage21_jt_coordinate(dup, inst.scenario), ProtocolError);
    auto holes = payloads;
    holes[0].jt.clear();
    CHECK_THROWS_AS(stage21_jt_coordinate(holes, inst.scenario), ProtocolError);

    const Stage21Output out = stage21_jt_coordinate(payloads, inst.scenario);
    CHECK(out.consensus.consistent(inst.scenario));
    for (int i : inst.scenario.jt_ues())
        for (int m : inst.scenario.ues[i].serving_set)
            for (int c = 0; c < 2; ++c)
                CHECK(out.qos_bar.at(m, i, c) >= 0.0);
}

TEST_CASE("stage 2.1 keeps an agreed JT bit with a positive margin") {
    testing::ManualSpec spec;
    spec.cells = 2;
    spec.nt = 4;
    spec.rbgs = 2;
    spec.serving = {{0, 1}};
    Instance inst = testing::manual_instance(spec);
    std::vector<CoordinationPayload> payloads(2);
    for (int m = 0; m < 2; ++m) {
        payloads[m].cell = m;
        payloads[m].jt = {{0, 0, true, true, 3.0, 0.0, 0.0}, {0, 1, false, true, 2.0, 0.0, 0.0}};
    }
    const Stage21Output out = stage21_jt_coordinate(payloads, inst.scenario);
    CHECK(out.consensus.consensus(inst.scenario.ues[0], 0, 0));
    // All-0 RBG with positive candidate rate and no interference is taken too.
    CHECK(out.consensus.consensus(inst.scenario.ues[0], 0, 1));
    CHECK(out.rate_hat.at(0, 0, 0, 0) == 3.0);
}

TEST_CASE("stage 2.1 conflict follows the F comparison") {
    testing::ManualSpec spec;
    spec.cells = 2;
    spec.nt = 4;
    spec.serving = {{0, 1}};
    Instance inst = testing::manual_instance(spec);
    std::vector<CoordinationPayload> payloads(2);
    payloads[1].cell = 1;
    // Cell 0 scheduled i; cell 1 did not and adding it would hurt others.
    payloads[0].jt = {{0, 0, true, true, 1.0, 0.5, -0.5}};
    payloads[1].jt = {{0, 0, false, true, 1.0, 3.0, -3.0}};
    // F01 = 1 - 3 = -2, F10 = -1 + 0.5 = -0.5: not scheduled.
    CHECK_FALSE(stage21_jt_coordinate(payloads, inst.scenario).consensus.consensus(inst.scenario.ues[0], 0, 0));
    payloads[1].jt[0].inf_0to1 = -0.1;
    // F01 = 0.9 > F10 = -0.5: scheduled.
    CHECK(stage21_jt_coordinate(payloads, inst.scenario).consensus.consensus(inst.scenario.ues[0], 0, 0));
}

TEST_CASE("stage 2.1 picks the fewest RBGs meeting a JT demand") {
    testing::ManualSpec spec;
    spec.cells = 2;
    spec.nt = 4;
    spec.rbgs = 5;
    spec.serving = {{0, 1}};
    spec.qos = {12.0};
    Instance inst = testing::manual_instance(spec);
    const double per_rbg[5] = {4.0, 3.0, 2.5, 1.5, 1.0};  // two cells: {8, 6, 5, 3, 2}
    std::vector<CoordinationPayload> payloads(2);
    for (int m = 0; m < 2; ++m) {
        payloads[m].cell = m;
        for (int r = 0; r < 5; ++r) payloads[m].jt.push_back({0, r, true, true, per_rbg[r], 0.0, 0.0});
    }
    const Stage21Output out = stage21_jt_coordinate(payloads, inst.scenario);
    int count = 0;
    for (int r = 0; r < 5; ++r) count += out.consensus.consensus(inst.scenario.ues[0], 0, r);
    CHECK(count == 2);
    CHECK(out.consensus.consensus(inst.scenario.ues[0], 0, 0));
    CHECK(out.consensus.consensus(inst.scenario.ues[0], 0, 1));
    CHECK(out.best_effort.empty());
    // Single-CC: QoS credit of core [0, 0] is cell 1's share only.
    CHECK(out.qos_bar.at(0, 0, 0) == doctest::Approx(7.0));

    inst.scenario.ues[0].qos_demand = 1e3;
    const Stage21Output all = stage21_jt_coordinate(payloads, inst.scenario);
    CHECK(all.best_effort == std::vector<int>{0});
    for (int r = 0; r < 5; ++r) CHECK(all.consensus.consensus(inst.scenario.ues[0], 0, r));
}

TEST_CASE("stage 2.2 releases the surplus RBGs of a QoS NJT UE") {
    testing::ManualSpec spec;
    spec.ccs = 2;
    spec.rbgs = 2;
    spec.serving = {{0}, {0}};
    spec.qos = {10.0, 0.0};
    Instance inst = testing::manual_instance(spec);
    std::vector<CoordinationPayload> p(2);
    p[1].cc = 1;
    p[0].njt_active = {{0, 0, 0, 7.0}, {0, 0, 1, 2.0}, {1, 0, 0, 1.0}};
    p[1].njt_active = {{0, 1, 0, 6.0}};
    const Stage22Output out = stage22_njt_decouple(p, inst.scenario, 0);
    REQUIRE(out.released.size() == 1);
    CHECK(out.released[0].ue == 0);
    CHECK(out.released[0].cc == 0);
    CHECK(out.released[0].r == 1);
    CHECK(out.qos_bar.at(0, 0, 0) == doctest::Approx(6.0));
    CHECK(out.qos_bar.at(0, 0, 1) == doctest::Approx(7.0));
    CHECK(out.best_effort.empty());

    inst.scenario.ues[0].qos_demand = 100.0;
    const Stage22Output nothing = stage22_njt_decouple(p, inst.scenario, 0);
    CHECK(nothing.released.empty());
    CHECK(nothing.best_effort == std::vector<int>{0});

    const Stage22Output off = stage22_njt_decouple(p, inst.scenario, 0, false);
    CHECK(off.released.empty());
    CHECK(off.qos_bar.at(0, 0, 0) == 0.0);

    std::vector<CoordinationPayload> wrong = {p[1], p[0]};
    CHECK_THROWS_AS(stage22_njt_decouple(wrong, inst.scenario, 0), ProtocolError);
}

TEST_CASE("stage 2.2 credit is zero on a single CC") {
    Instance inst = mixed(4, 1);
    const Stage1Output o = stage1_local(inst.coeffs, inst.scenario, 0, 0, {});
    const Stage22Output out = stage22_njt_decouple({o.payload}, inst.scenario, 0);
    for (double v : out.qos_bar.values) CHECK(v == 0.0);
}

TEST_CASE("stage 3 without JT UEs equals the restricted centralized BCD") {
    for (int seed = 1; seed <= 10; ++seed) {
        testing::ManualSpec spec;
        spec.rbgs = 4;
        spec.nt = 4;
        spec.nr = 2;
        spec.serving = {{0}, {0}, {0}, {0}, {0}};
        spec.qos = {6.0, 0.0, 12.0, 0.0, 0.0};
        spec.seed = static_cast<std::uint64_t>(seed);
        Instance inst = testing::manual_instance(spec);
        CoreAllocation init;
        init.rbgs = 4;
        init.members = inst.coeffs.members(0);
        init.bits.assign(20, 0);
        const Stage3Output s3 = stage3_refine(inst.coeffs, inst.scenario, 0, 0, init, std::vector<double>(5, 0.0), 5.0, 20);
        BcdOptions opt;
        const BcdResult bcd = centralized_bcd(inst.coeffs, inst.scenario, opt);
        for (int j = 0; j < 5; ++j)
            for (int r = 0; r < 4; ++r) CHECK(s3.bits.get(j, r) == bcd.schedule.get(0, j, 0, r));
        CHECK(s3.trace.back() == doctest::Approx(bcd.trace.back()).epsilon(1e-10));
        CHECK(s3.min_update_delta >= 0.0);
    }
}

TEST_CASE("stage 3 drops a QoS-only UE whose demand is already credited") {
    testing::ManualSpec spec;
    spec.rbgs = 3;
    spec.serving = {{0}};
    spec.qos = {5.0};
    Instance inst = testing::manual_instance(spec);
    CoreAllocation init;
    init.rbgs = 3;
    init.members = {0};
    init.bits = {1, 1, 1};
    const Stage3Output s3 = stage3_refine(inst.coeffs, inst.scenario, 0, 0, init, {5.0}, 5.0, 20);
    CHECK(s3.bits.popcount() == 0);
}

TEST_CASE("stage 3 never flips JT bits") {
    for (int seed = 1; seed <= 8; ++seed) {
        Instance inst = mixed(seed);
        std::mt19937_64 rng(seed);
        for (int m = 0; m < 2; ++m) {
            CoreAllocation init;
            init.cell = m;
            init.rbgs = 3;
            init.members = inst.coeffs.members(m);
            init.bits.assign(init.members.size() * 3, 0);
            for (auto& b : init.bits) b = rng() % 2;
            std::vector<double> off(init.members.size(), 1.0);
            const Stage3Output s3 = stage3_refine(inst.coeffs, inst.scenario, m, 0, init, off, 5.0, 20);
            for (std::size_t j = 0; j < init.members.size(); ++j)
                if (inst.scenario.ues[init.members[j]].is_jt())
                    for (int r = 0; r < 3; ++r) CHECK(s3.bits.get(static_cast<int>(j), r) == init.get(static_cast<int>(j), r));
            CHECK(s3.min_update_delta >= 0.0);
            for (std::size_t i = 1; i < s3.trace.size(); ++i) CHECK(s3.trace[i] >= s3.trace[i - 1] - 1e-12);
        }
    }
}

TEST_CASE("stage 3 trims NJT load above nt") {
    testing::ManualSpec spec;
    spec.nt = 2;
    spec.nr = 1;
    spec.serving = {{0}, {0}, {0}};
    Instance inst = testing::manual_instance(spec);
    CoreAllocation init;
    init.rbgs = 1;
    init.members = {0, 1, 2};
    init.bits = {1, 1, 1};
    const Stage3Output s3 = stage3_refine(inst.coeffs, inst.scenario, 0, 0, init, {0, 0, 0}, 5.0, 20);
    CHECK(s3.trimmed == 1);
    CHECK(s3.bits.popcount() <= 2);
}

TEST_CASE("full run is consistent, single-round and thread-count invariant") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Instance inst = make_instance(testing::desk_request(seed));
        DistributedOptions o;
        const DistributedResult a = run_distributed(inst.coeffs, inst.scenario, o);
        CHECK(a.schedule.consistent(inst.scenario));
        CHECK(a.schedule.respects_association(inst.scenario));
        CHECK(a.schedule.max_scheduled_count() <= inst.scenario.config.nt);
        CHECK(a.ledger.single_round());
        CHECK(a.ledger.pus.size() == 4);
        CHECK(a.stage3_min_delta >= 0.0);
        CHECK(a.objective == doctest::Approx(objective_G(inst.coeffs, a.schedule, inst.scenario, 5.0)));
        for (int threads : {4, 16}) {
            o.worker_threads = threads;
            CHECK(run_distributed(inst.coeffs, inst.scenario, o).schedule == a.schedule);
        }
        // Stage 2.2 never adds RBGs for a QoS NJT UE.
        for (int m = 0; m < 3; ++m)
            for (int k : inst.scenario.njt_ues(m)) {
                if (!inst.scenario.ues[k].has_qos) continue;
                int before = 0, after = 0;
                for (int c = 0; c < 2; ++c)
                    for (int r = 0; r < 4; ++r) {
                        before += a.stage1.get(m, k, c, r);
                        after += a.stage2.get(m, k, c, r);
                    }
                CHECK(after <= before);
            }
        const std::string csv = stage_trace_csv(a.trace);
        CHECK(csv.rfind("stage,cell,cc,step,objective,bits_set\n", 0) == 0);
        CHECK(a.ledger.to_json().find("\"single_round\": true") != std::string::npos);
    }
    DistributedOptions bad;
    bad.worker_threads = 0;
    Instance inst = mixed(1);
    CHECK_THROWS_AS(run_distributed(inst.coeffs, inst.scenario, bad), ConfigError);
}

TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                        if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
}
