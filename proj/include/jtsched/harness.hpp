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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jtsched/baselines.hpp"
#include "jtsched/central.hpp"
#include "jtsched/channel_algebra.hpp"
#include "jtsched/distributed.hpp"
#include "jtsched/rate_approx.hpp"
#include "jtsched/scenario.hpp"
#include "jtsched/schedule.hpp"

namespace jtsched {

/// Everything a scheduler run needs, derived once per scenario.
struct Instance {
    Scenario scenario;
    ChannelSet channels;
    TripletCache triplets;
    ApproxCoeffs coeffs;
};

Instance make_instance(Scenario scenario, ChannelSet channels);
Instance make_instance(const ScenarioRequest& request);

enum class SchedulerId { Pcs, Pds, PdsNc, SusZf, Mshs };

/// Accepts pcs, pds, pds-nc, sus-zf, mshs; throws ConfigError otherwise.
SchedulerId parse_scheduler(const std::string& name);
std::string scheduler_name(SchedulerId id);

struct RunOptions {
    double rho = 5.0;
    double alpha = 0.5;
    int threads = 1;
    int max_sweeps = 20;
    int stage1_max_sweeps = 10;
    BaselineConfig baseline;
};

struct SchedulerRun {
    SchedulerId id = SchedulerId::Pcs;
    Schedule schedule;
    double wall_ms = 0.0;
    std::optional<BcdResult> bcd;
    std::optional<DistributedResult> distributed;
};

SchedulerRun run_scheduler(SchedulerId id, const Instance& instance, const RunOptions& options);

struct BruteForceResult {
    Schedule schedule;
    double g_star = 0.0;
    double esr = 0.0;  // exact-rate ESR of the argmax (when channels are known)
    int variables = 0;
    std::uint64_t enumerated = 0;
    std::uint64_t feasible = 0;
};

inline constexpr int kBruteForceGuard = 20;

/// Exhaustive maximization of the penalty objective over every consistent
/// schedule (NJT bits plus one consensus bit per JT-UE and RBG) respecting
/// nt and schedulability. Throws GuardError above `guard` variables.
BruteForceResult brute_force_optimum(const ApproxCoeffs& coeffs, const Scenario& scenario, double rho,
                                     int guard = kBruteForceGuard);
BruteForceResult brute_force_optimum(const Instance& instance, double rho, int guard = kBruteForceGuard);

struct QosFeasibility {
    bool feasible = false;
    Schedule witness;
    std::uint64_t enumerated = 0;
};

/// Whether some feasible schedule meets every QoS demand under approximate
/// rates. Same enumeration and guard as brute_force_optimum.
QosFeasibility qos_feasible_exhaustive(const ApproxCoeffs& coeffs, const Scenario& scenario,
                                       int guard = kBruteForceGuard);

/// Sat computed from approximate per-UE rates.
double approximate_sat(const ApproxCoeffs& coeffs, const Schedule& schedule, const Scenario& scenario);

/// Approximate and exact ESR per RBG and UE: f_a = G(rho = 1) / (C R K),
/// f_t = ESR / (C R K).
struct FidelityPoint {
    int sweep = 0;
    double f_a = 0.0;
    double f_t = 0.0;
    double relative_error() const;
};
FidelityPoint fidelity(const Instance& instance, const Schedule& schedule, int sweep = 0);
/// PCS run with one point per sweep (sweep 0 is the empty start).
std::vector<FidelityPoint> fidelity_trace(const Instance& instance, const BcdOptions& options);

struct ExperimentSpec {
    ScenarioRequest base;
    std::vector<std::string> schedulers = {"pcs", "pds", "pds-nc", "sus-zf", "mshs"};
    std::vector<std::uint64_t> seeds;
    std::string sweep_variable = "none";  // none, kq, k, nt, rho, alpha, q_hi
    std::vector<double> values = {0.0};
    std::string output;
    RunOptions run;
    int parallel_runs = 1;
    bool fidelity_traces = false;

    /// Throws ConfigError for empty seeds/grid or unknown names.
    void validate() const;
};

/// {"scenario": <scenario config>, "schedulers": [...], "seeds": [...] or
///  {"first": a, "count": n}, "sweep": {"variable": v, "values": [...]},
///  "run": {"rho", "alpha", "threads", "max_sweeps"}, "output": dir}
ExperimentSpec spec_from_json(const nlohmann::json& j);
ExperimentSpec load_spec(const std::string& path);

/// Applies one grid value to a copy of the request and run options.
void apply_sweep(const std::string& variable, double value, ScenarioRequest& request, RunOptions& run);

struct ResultRecord {
    std::string scheduler;
    std::uint64_t seed = 0;
    std::string sweep_variable;
    double sweep_value = 0.0;
    double esr = 0.0;
    double sat = 1.0;
    double approx_objective = 0.0;
    double wall_ms = 0.0;
    double f_a = 0.0;
    double f_t = 0.0;
    int sweeps = 0;
    std::size_t bits_set = 0;
    std::size_t ledger_bytes = 0;
    bool ledger_single_round = false;
};

struct SummaryRow {
    std::string scheduler;
    double sweep_value = 0.0;
    int runs = 0;
    double esr_mean = 0.0;
    double esr_std = 0.0;
    double sat_mean = 0.0;
    double sat_std = 0.0;
    double objective_mean = 0.0;
    double wall_ms_median = 0.0;
    double rel_error_mean = 0.0;
};

struct TracePoint {
    std::uint64_t seed = 0;
    double sweep_value = 0.0;
    FidelityPoint point;
};

struct ExperimentResult {
    std::string sweep_variable;
    std::vector<ResultRecord> records;
    std::vector<SummaryRow> summary;
    std::vector<TracePoint> traces;
};

/// Records come out ordered by (grid value, seed, scheduler list order)
/// whatever the parallelism.
ExperimentResult run_experiment(const ExperimentSpec& spec);
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

std::string records_csv(const std::vector<ResultRecord>& records);
std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& sweep_variable);
std::string traces_csv(const std::vector<TracePoint>& traces);
nlohmann::json record_to_json(const ResultRecord& record);
nlohmann::json summary_to_json(const std::vector<SummaryRow>& rows, const std::string& sweep_variable);

/// Writes records.csv, summary.csv, summary.json (and fidelity.csv when traces
/// exist) under `dir`, creating it if needed.
void write_experiment(const ExperimentResult& result, const std::string& dir);

}  // namespace jtsched
