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

#include <filesystem>

#include "jtsched/errors.hpp"
#include "jtsched/ezf.hpp"
#include "jtsched/harness.hpp"
#include "test_support.hpp"

using namespace jtsched;

TEST_CASE("scheduler names round trip") {
    for (const char* n : {"pcs", "pds", "pds-nc", "sus-zf", "mshs"}) CHECK(scheduler_name(parse_scheduler(n)) == n);
    CHECK_THROWS_AS(parse_scheduler("PCS"), ConfigError);
    CHECK_THROWS_AS(parse_scheduler(""), ConfigError);
}

TEST_CASE("brute force guard") {
    testing::ManualSpec spec;
    spec.rbgs = 7;
    spec.serving = {{0}, {0}, {0}};
    Instance inst = testing::manual_instance(spec);
    CHECK_THROWS_AS(brute_force_optimum(inst, 5.0), GuardError);
    CHECK_THROWS_AS(qos_feasible_exhaustive(inst.coeffs, inst.scenario), GuardError);
    CHECK_NOTHROW(brute_force_optimum(inst, 5.0, 21));
}

TEST_CASE("brute force on a single bit") {
    testing::ManualSpec spec;
    spec.serving = {{0}};
    Instance inst = testing::manual_instance(spec);
    const BruteForceResult bf = brute_force_optimum(inst, 5.0);
    CHECK(bf.variables == 1);
    CHECK(bf.enumerated == 2);
    CHECK(bf.schedule.get(0, 0, 0, 0) == (inst.coeffs.psi(0, 0, 0, 0) > 0.0));
    CHECK(bf.g_star == doctest::Approx(std::max(0.0, inst.coeffs.psi(0, 0, 0, 0))));
    CHECK(bf.esr == doctest::Approx(esr_and_sat(bf.schedule, inst.channels, inst.triplets, inst.scenario).esr));
}

TEST_CASE("brute force never co-schedules a colinear pair") {
    testing::ManualSpec spec;
    spec.serving = {{0}, {0}};
    spec.nt = 4;
    auto [s, ch] = testing::manual_scenario(spec);
    ch.at(0, 1, 0, 0) = ch.at(0, 0, 0, 0) * 0.9;
    Instance inst = make_instance(s, ch);
    const BruteForceResult bf = brute_force_optimum(inst, 5.0);
    CHECK(bf.schedule.scheduled_count(0, 0, 0) == 1);
    CHECK(bf.schedule.get(0, 0, 0, 0));
}

TEST_CASE("brute force is an upper bound on every scheduler") {
    for (int seed = 1; seed <= 6; ++seed) {
        testing::ManualSpec spec;
        spec.cells = 2;
        spec.rbgs = 2;
        spec.nt = 2;
        spec.nr = 2;
        spec.serving = {{0}, {0}, {0, 1}, {1}, {1}};
        spec.qos = {3.0, 0.0, 4.0, 0.0, 2.0};
        spec.seed = static_cast<std::uint64_t>(seed);
        Instance inst = testing::manual_instance(spec);
        const BruteForceResult bf = brute_force_optimum(inst, 5.0);
        CHECK(bf.variables == 10);
        CHECK(bf.feasible <= bf.enumerated);
        for (SchedulerId id : {SchedulerId::Pcs, SchedulerId::Pds, SchedulerId::PdsNc, SchedulerId::SusZf,
                               SchedulerId::Mshs}) {
            const SchedulerRun run = run_scheduler(id, inst, {});
            CHECK(objective_G(inst.coeffs, run.schedule, inst.scenario, 5.0) <= bf.g_star + 1e-9);
        }
    }
}

TEST_CASE("QoS feasibility by enumeration") {
    testing::ManualSpec spec;
    spec.rbgs = 2;
    spec.serving = {{0}, {0}};
    spec.qos = {1.0, 0.0};
    Instance inst = testing::manual_instance(spec);
    const QosFeasibility ok = qos_feasible_exhaustive(inst.coeffs, inst.scenario);
    CHECK(ok.feasible);
    CHECK(approximate_sat(inst.coeffs, ok.witness, inst.scenario) == 1.0);
    inst.scenario.ues[0].qos_demand = 1e4;
    const QosFeasibility no = qos_feasible_exhaustive(inst.coeffs, inst.scenario);
    CHECK_FALSE(no.feasible);
    CHECK(no.enumerated == 16);
}

TEST_CASE("fidelity of the empty schedule is zero") {
    Instance inst = make_instance(testing::desk_request(2, 8));
    const FidelityPoint p = fidelity(inst, Schedule::empty(inst.scenario));
    CHECK(p.f_a == 0.0);
    CHECK(p.f_t == 0.0);
    CHECK(p.relative_error() == 0.0);
    BcdOptions o;
    const auto trace = fidelity_trace(inst, o);
    REQUIRE(trace.size() >= 2);
    CHECK(trace.front().sweep == 0);
    CHECK(trace.back().f_a > 0.0);
    CHECK(FidelityPoint{0, 2.0, 1.5}.relative_error() == doctest::Approx(0.25));
}

TEST_CASE("experiment spec parsing") {
    const ExperimentSpec s = spec_from_json({{"schedulers", {"pcs", "mshs"}},
                                             {"seeds", {{"first", 4}, {"count", 3}}},
                                             {"sweep", {{"variable", "kq"}, {"values", {0, 4}}}},
                                             {"run", {{"rho", 2.0}, {"threads", 2}}}});
    CHECK(s.seeds == std::vector<std::uint64_t>{4, 5, 6});
    CHECK(s.values.size() == 2);
    CHECK(s.run.rho == 2.0);
    CHECK(s.run.threads == 2);
    CHECK_THROWS_AS(spec_from_json({{"seeds", {1}}, {"extra", 1}}), ConfigError);
    CHECK_THROWS_AS(spec_from_json(nlohmann::json::object()), ConfigError);
    CHECK_THROWS_AS(spec_from_json({{"seeds", {1}}, {"schedulers", {"pcz"}}}), ConfigError);
    CHECK_THROWS_AS(spec_from_json({{"seeds", {1}}, {"sweep", {{"variable", "temperature"}}}}), ConfigError);
    CHECK_THROWS_AS(spec_from_json({{"seeds", {1}}, {"sweep", {{"values", nlohmann::json::array()}}}}),
                    ConfigError);
    CHECK_THROWS_AS(spec_from_json({{"seeds", "one"}}), ConfigError);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), IoError);

    ScenarioRequest req;
    RunOptions run;
    apply_sweep("nt", 16, req, run);
    apply_sweep("alpha", 0.25, req, run);
    CHECK(req.config.nt == 16);
    CHECK(run.alpha == 0.25);
    CHECK_THROWS_AS(apply_sweep("x", 1, req, run), ConfigError);
}

TEST_CASE("experiments are ordered and reproducible") {
    ExperimentSpec spec;
    spec.base = testing::desk_request(1, 8, 9, 0);
    spec.schedulers = {"mshs", "pcs", "pds"};
    spec.seeds = {3, 1};
    spec.sweep_variable = "kq";
    spec.values = {0, 3};
    spec.fidelity_traces = true;
    const ExperimentResult a = run_experiment(spec);
    REQUIRE(a.records.size() == 12);
    CHECK(a.records[0].scheduler == "mshs");
    CHECK(a.records[1].scheduler == "pcs");
    CHECK(a.records[0].seed == 3);
    CHECK(a.records[3].seed == 1);
    CHECK(a.records[6].sweep_value == 3.0);
    for (int i = 0; i < 6; ++i) CHECK(a.records[i].sat == 1.0);
    CHECK(a.records[2].ledger_single_round);
    CHECK(a.summary.size() == 6);
    CHECK_FALSE(a.traces.empty());

    spec.parallel_runs = 3;
    const ExperimentResult b = run_experiment(spec);
    REQUIRE(b.records.size() == a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(b.records[i].scheduler == a.records[i].scheduler);
        CHECK(b.records[i].esr == a.records[i].esr);
        CHECK(b.records[i].sat == a.records[i].sat);
    }

    const auto dir = std::filesystem::temp_directory_path() / "jtsched_experiment";
    std::filesystem::remove_all(dir);
    write_experiment(a, dir.string());
    for (const char* f : {"records.csv", "summary.csv", "summary.json", "fidelity.csv"})
        CHECK(std::filesystem::exists(dir / f));
    CHECK(records_csv(a.records).rfind("scheduler,", 0) == 0);
}
