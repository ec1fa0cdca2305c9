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


#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "jtsched/errors.hpp"
#include "jtsched/ezf.hpp"
#include "jtsched/harness.hpp"
#include "jtsched/scenario_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jtsched;

namespace {

// Scenario source shared by schedule and oracle.
struct Source {
    std::string scenario;  // saved scenario JSON
    std::string config;    // request JSON to generate from
    std::optional<std::uint64_t> seed;
};

void add_source(CLI::App* app, Source& src) {
    auto* s = app->add_option("--scenario", src.scenario, "scenario JSON written by gen");
    auto* c = app->add_option("--config", src.config, "scenario request JSON to generate from");
    s->excludes(c);
    app->add_option("--seed", src.seed, "master seed for a generated scenario");
}

Instance load_instance(const Source& src) {
    if (!src.scenario.empty()) {
        if (src.seed) throw ConfigError("--seed only applies to generated scenarios");
        auto [scenario, channels] = load_scenario(src.scenario);
        return make_instance(std::move(scenario), std::move(channels));
    }
    ScenarioRequest req = src.config.empty() ? ScenarioRequest{} : load_request(src.config);
    if (src.seed) req.seed = *src.seed;
    return make_instance(req);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
    return p;
}

std::string rates_csv(const Scenario& scenario, const EsrResult& e, const std::vector<double>& approx) {
    std::ostringstream os;
    os << "ue,serving,qos_demand,exact_rate,approx_rate\n";
    for (const auto& ue : scenario.ues) {
        os << ue.id << ',';
        for (std::size_t i = 0; i < ue.serving_set.size(); ++i) os << (i ? ";" : "") << ue.serving_set[i];
        os << ',' << (ue.has_qos ? ue.qos_demand : 0.0) << ',' << e.ue_rate[ue.id] << ',' << approx[ue.id] << '\n';
    }
    return os.str();
}

int cmd_gen(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
    ScenarioRequest req = config.empty() ? ScenarioRequest{} : load_request(config);
    if (seed) req.seed = *seed;
    auto [scenario, channels] = build_scenario(req);
    const fs::path dir = prepare_dir(out);
    save_scenario(scenario, channels, (dir / "scenario.json").string(), (dir / "channels.bin").string());
    write_text(dir / "request.json", request_to_json(req).dump(2) + "\n");
    const Dims d = scenario.dims();
    json summary = {{"scenario", (dir / "scenario.json").string()},
                    {"cells", d.cells},
                    {"ues", d.ues},
                    {"ccs", d.ccs},
                    {"rbgs", d.rbgs},
                    {"jt_ues", static_cast<int>(scenario.jt_ues().size())},
                    {"seed", req.seed}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

struct ScheduleArgs {
    Source src;
    std::string scheduler = "pds";
    RunOptions run;
    std::string out;
};

int cmd_schedule(const ScheduleArgs& a) {
    const SchedulerId id = parse_scheduler(a.scheduler);
    const Instance in = load_instance(a.src);
    std::optional<fs::path> dir;
    if (!a.out.empty()) dir = prepare_dir(a.out);

    SchedulerRun run;
    std::ostringstream sweeps;
    if (id == SchedulerId::Pcs) {
        sweeps << "sweep,objective,esr,sat\n";
        BcdOptions o;
        o.rho = a.run.rho;
        o.max_sweeps = a.run.max_sweeps;
        if (dir) {
            const EsrResult e0 = esr_and_sat(Schedule::empty(in.scenario), in.channels, in.triplets, in.scenario);
            sweeps << 0 << ',' << objective_G(in.coeffs, Schedule::empty(in.scenario), in.scenario, o.rho) << ','
                   << e0.esr << ',' << e0.sat << '\n';
            o.on_sweep = [&](int sweep, const Schedule& s, double g) {
                const EsrResult e = esr_and_sat(s, in.channels, in.triplets, in.scenario);
                sweeps << sweep << ',' << g << ',' << e.esr << ',' << e.sat << '\n';
            };
        }
        const auto t0 = std::chrono::steady_clock::now();
        run.id = id;
        run.bcd = centralized_bcd(in.coeffs, in.scenario, o);
        run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        run.schedule = run.bcd->schedule;
    } else {
        run = run_scheduler(id, in, a.run);
    }

    const EsrResult e = esr_and_sat(run.schedule, in.channels, in.triplets, in.scenario);
    const std::vector<double> approx = approx_ue_rates(in.coeffs, run.schedule, in.scenario);
    json result = {{"scheduler", scheduler_name(id)},
                   {"rho", a.run.rho},
                   {"esr", e.esr},
                   {"sat", e.sat},
                   {"qos_ues", e.qos_ues},
                   {"qos_met", e.qos_met},
                   {"approx_objective", objective_G(in.coeffs, run.schedule, in.scenario, a.run.rho)},
                   {"approx_sat", approximate_sat(in.coeffs, run.schedule, in.scenario)},
                   {"bits_set", run.schedule.popcount()},
                   {"wall_ms", run.wall_ms}};
    if (id == SchedulerId::Pds || id == SchedulerId::PdsNc) {
        result["alpha"] = a.run.alpha;
        result["threads"] = a.run.threads;
        result["ledger"] = json::parse(run.distributed->ledger.to_json());
        result["best_effort"] = run.distributed->best_effort;
    }
    if (run.bcd) {
        result["sweeps"] = run.bcd->sweeps;
        result["converged"] = run.bcd->converged;
    }
    if (dir) {
        write_text(*dir / "schedule.json", schedule_to_json(run.schedule) + "\n");
        write_text(*dir / "result.json", result.dump(2) + "\n");
        write_text(*dir / "ue_rates.csv", rates_csv(in.scenario, e, approx));
        if (run.bcd) write_text(*dir / "sweeps.csv", sweeps.str());
        if (run.distributed) {
            write_text(*dir / "ledger.json", run.distributed->ledger.to_json() + "\n");
            write_text(*dir / "stages.csv", stage_trace_csv(run.distributed->trace));
        }
    }
    std::cout << result.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out) {
    ExperimentSpec spec = load_spec(spec_path);
    if (!out.empty()) spec.output = out;
    if (spec.output.empty()) throw ConfigError("sweep needs an output directory (--out or \"output\")");
    const ExperimentResult result = run_experiment(spec);
    write_experiment(result, spec.output);
    std::cout << summary_to_json(result.summary, result.sweep_variable).dump(2) << "\n";
    return 0;
}

int cmd_oracle(const Source& src, double rho, int guard, const std::string& out) {
    const Instance in = load_instance(src);
    const auto t0 = std::chrono::steady_clock::now();
    const BruteForceResult bf = brute_force_optimum(in, rho, guard);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const EsrResult e = esr_and_sat(bf.schedule, in.channels, in.triplets, in.scenario);
    json result = {{"rho", rho},
                   {"g_star", bf.g_star},
                   {"esr", bf.esr},
                   {"sat", e.sat},
                   {"approx_sat", approximate_sat(in.coeffs, bf.schedule, in.scenario)},
                   {"variables", bf.variables},
                   {"enumerated", bf.enumerated},
                   {"wall_ms", ms}};
    if (!out.empty()) {
        const fs::path dir = prepare_dir(out);
        write_text(dir / "schedule.json", schedule_to_json(bf.schedule) + "\n");
        write_text(dir / "oracle.json", result.dump(2) + "\n");
    }
    std::cout << result.dump(2) << "\n";
    return 0;
}

int fail(const std::string& kind, const std::string& message, int code) {
    json err = {{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-transmission MU-MIMO scheduling on multi-cell O-RAN"};
    app.require_subcommand(1);

    std::string gen_config, gen_out;
    std::optional<std::uint64_t> gen_seed;
    auto* gen = app.add_subcommand("gen", "generate a scenario and its channel file");
    gen->add_option("--config", gen_config, "scenario request JSON (defaults when omitted)");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--out", gen_out, "output directory")->required();

    ScheduleArgs sa;
    auto* sched = app.add_subcommand("schedule", "run one scheduler and evaluate exact rates");
    add_source(sched, sa.src);
    sched->add_option("--scheduler", sa.scheduler, "pcs, pds, pds-nc, sus-zf or mshs")
        ->check(CLI::IsMember({"pcs", "pds", "pds-nc", "sus-zf", "mshs"}));
    sched->add_option("--rho", sa.run.rho, "QoS penalty weight");
    sched->add_option("--alpha", sa.run.alpha, "Stage-1 rate filter in [0, 1)");
    sched->add_option("--threads", sa.run.threads, "worker threads for pds")->check(CLI::PositiveNumber);
    sched->add_option("--max-sweeps", sa.run.max_sweeps, "BCD sweep limit");
    sched->add_option("--out", sa.out, "directory for schedule, result and trace files");

    std::string spec_path, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "run an experiment grid from a spec JSON");
    sweep->add_option("spec", spec_path, "experiment spec JSON")->required();
    sweep->add_option("--out", sweep_out, "output directory (overrides the spec)");

    Source osrc;
    double orho = 5.0;
    int oguard = kBruteForceGuard;
    std::string oout;
    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum of the approximate objective");
    add_source(oracle, osrc);
    oracle->add_option("--rho", orho, "QoS penalty weight");
    oracle->add_option("--guard", oguard, "maximum number of binary variables");
    oracle->add_option("--out", oout, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage_error", e.what(), 2);
    }

    try {
        if (*gen) return cmd_gen(gen_config, gen_seed, gen_out);
        if (*sched) return cmd_schedule(sa);
        if (*sweep) return cmd_sweep(spec_path, sweep_out);
        if (*oracle) return cmd_oracle(osrc, orho, oguard, oout);
    } catch (const jtsched::Error& e) {
        return fail(e.kind(), e.what(), 1);
    } catch (const nlohmann::json::exception& e) {
        return fail("config_error", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal_error", e.what(), 1);
    }
    return 0;
}
