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


#include "jtsched/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "jtsched/errors.hpp"
#include "jtsched/ezf.hpp"
#include "jtsched/parallel.hpp"
#include "jtsched/scenario_io.hpp"

namespace jtsched {

using nlohmann::json;

Instance make_instance(Scenario scenario, ChannelSet channels) {
    Instance in;
    in.scenario = std::move(scenario);
    in.channels = std::move(channels);
    in.triplets = svd_cache(in.channels, in.scenario);
    in.coeffs = build_coeffs(in.triplets, in.scenario);
    return in;
}

Instance make_instance(const ScenarioRequest& request) {
    auto [s, ch] = build_scenario(request);
    return make_instance(std::move(s), std::move(ch));
}

SchedulerId parse_scheduler(const std::string& name) {
    if (name == "pcs") return SchedulerId::Pcs;
    if (name == "pds") return SchedulerId::Pds;
    if (name == "pds-nc") return SchedulerId::PdsNc;
    if (name == "sus-zf") return SchedulerId::SusZf;
    if (name == "mshs") return SchedulerId::Mshs;
    throw ConfigError("unknown scheduler '" + name + "'");
}

std::string scheduler_name(SchedulerId id) {
    switch (id) {
        case SchedulerId::Pcs: return "pcs";
        case SchedulerId::Pds: return "pds";
        case SchedulerId::PdsNc: return "pds-nc";
        case SchedulerId::SusZf: return "sus-zf";
        case SchedulerId::Mshs: return "mshs";
    }
    return "unknown";
}

SchedulerRun run_scheduler(SchedulerId id, const Instance& instance, const RunOptions& options) {
    using clock = std::chrono::steady_clock;
    SchedulerRun run;
    run.id = id;
    const auto t0 = clock::now();
    switch (id) {
        case SchedulerId::Pcs: {
            BcdOptions o;
            o.rho = options.rho;
            o.max_sweeps = options.max_sweeps;
            run.bcd = centralized_bcd(instance.coeffs, instance.scenario, o);
            run.schedule = run.bcd->schedule;
            break;
        }
        case SchedulerId::Pds:
        case SchedulerId::PdsNc: {
            DistributedOptions o;
            o.rho = options.rho;
            o.alpha = options.alpha;
            o.stage1_max_sweeps = options.stage1_max_sweeps;
            o.stage3_max_sweeps = options.max_sweeps;
            o.worker_threads = options.threads;
            o.njt_decoupling = id == SchedulerId::Pds;
            run.distributed = run_distributed(instance.coeffs, instance.scenario, o);
            run.schedule = run.distributed->schedule;
            break;
        }
        case SchedulerId::SusZf:
            run.schedule = sus_zf_schedule(instance.channels, instance.triplets, instance.scenario, options.baseline);
            break;
        case SchedulerId::Mshs:
            run.schedule = mshs_schedule(instance.channels, instance.triplets, instance.scenario, options.baseline);
            break;
    }
    run.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return run;
}

namespace {

struct BitVar {
    int ue;
    int c;
    int r;
};

std::vector<BitVar> enumeration_vars(const ApproxCoeffs& coeffs, const Scenario& scenario, int guard) {
    std::vector<BitVar> vars;
    for (const auto& ue : scenario.ues)
        for (int c = 0; c < coeffs.ccs(); ++c)
            for (int r = 0; r < coeffs.rbgs(); ++r) {
                bool ok = true;
                for (int m : ue.serving_set) ok = ok && coeffs.slice(m, c, r).schedulable[coeffs.local(m, ue.id)];
                if (ok) vars.push_back({ue.id, c, r});
            }
    if (static_cast<int>(vars.size()) > guard)
        throw GuardError("exhaustive search over " + std::to_string(vars.size()) + " bits exceeds the guard of " +
                         std::to_string(guard));
    return vars;
}

/// Visits every assignment of `vars` in Gray-code order; `visit` sees only
/// states that satisfy nt and schedulability. Returning false stops early.
std::uint64_t gray_walk(PenaltyObjectiveState& state, const std::vector<BitVar>& vars,
                        const std::function<bool(const PenaltyObjectiveState&)>& visit) {
    const std::uint64_t total = std::uint64_t{1} << vars.size();
    std::uint64_t count = 1;
    if (state.feasible() && !visit(state)) return count;
    for (std::uint64_t i = 1; i < total; ++i) {
        const BitVar& v = vars[static_cast<std::size_t>(__builtin_ctzll(i))];
        state.set(v.ue, v.c, v.r, !state.bit(v.ue, v.c, v.r));
        ++count;
        if (state.feasible() && !visit(state)) break;
    }
    return count;
}

}  // namespace

BruteForceResult brute_force_optimum(const ApproxCoeffs& coeffs, const Scenario& scenario, double rho, int guard) {
    const auto vars = enumeration_vars(coeffs, scenario, guard);
    PenaltyObjectiveState state(coeffs, scenario, rho, Schedule::empty(scenario));
    BruteForceResult out;
    out.variables = static_cast<int>(vars.size());
    out.schedule = Schedule::empty(scenario);
    out.g_star = -std::numeric_limits<double>::infinity();
    out.enumerated = gray_walk(state, vars, [&](const PenaltyObjectiveState& s) {
        ++out.feasible;
        if (s.value() > out.g_star) {
            out.g_star = s.value();
            out.schedule = s.schedule();
        }
        return true;
    });
    out.g_star = objective_G(coeffs, out.schedule, scenario, rho);
    return out;
}

BruteForceResult brute_force_optimum(const Instance& instance, double rho, int guard) {
    BruteForceResult out = brute_force_optimum(instance.coeffs, instance.scenario, rho, guard);
    out.esr = esr_and_sat(out.schedule, instance.channels, instance.triplets, instance.scenario).esr;
    return out;
}

QosFeasibility qos_feasible_exhaustive(const ApproxCoeffs& coeffs, const Scenario& scenario, int guard) {
    const auto vars = enumeration_vars(coeffs, scenario, guard);
    PenaltyObjectiveState state(coeffs, scenario, 0.0, Schedule::empty(scenario));
    QosFeasibility out;
    out.witness = Schedule::empty(scenario);
    out.enumerated = gray_walk(state, vars, [&](const PenaltyObjectiveState& s) {
        for (const auto& ue : scenario.ues)
            if (ue.has_qos && s.cumulative(ue.id) < ue.qos_demand) return true;
        out.feasible = true;
        out.witness = s.schedule();
        return false;
    });
    return out;
}

double approximate_sat(const ApproxCoeffs& coeffs, const Schedule& schedule, const Scenario& scenario) {
    return summarize_rates(scenario, approx_ue_rates(coeffs, schedule, scenario)).sat;
}

double FidelityPoint::relative_error() const {
    if (f_a == 0.0) return f_t == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(f_t - f_a) / std::abs(f_a);
}

FidelityPoint fidelity(const Instance& instance, const Schedule& schedule, int sweep) {
    const Scenario& s = instance.scenario;
    const double norm = static_cast<double>(s.config.num_ccs) * s.config.num_rbgs_per_cc * s.num_ues();
    FidelityPoint p;
    p.sweep = sweep;
    p.f_a = objective_G(instance.coeffs, schedule, s, 1.0) / norm;
    p.f_t = esr_and_sat(schedule, instance.channels, instance.triplets, s).esr / norm;
    return p;
}

std::vector<FidelityPoint> fidelity_trace(const Instance& instance, const BcdOptions& options) {
    std::vector<FidelityPoint> out;
    out.push_back(fidelity(instance, Schedule::empty(instance.scenario), 0));
    BcdOptions o = options;
    o.on_sweep = [&](int sweep, const Schedule& sched, double) { out.push_back(fidelity(instance, sched, sweep)); };
    centralized_bcd(instance.coeffs, instance.scenario, o);
    return out;
}

void ExperimentSpec::validate() const {
    if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
    if (values.empty()) throw ConfigError("experiment sweep grid is empty");
    if (schedulers.empty()) throw ConfigError("experiment needs at least one scheduler");
    for (const auto& s : schedulers) parse_scheduler(s);
    static const char* vars[] = {"none", "kq", "k", "nt", "rho", "alpha", "q_hi"};
    if (std::find(std::begin(vars), std::end(vars), sweep_variable) == std::end(vars))
        throw ConfigError("unknown sweep variable '" + sweep_variable + "'");
    if (run.threads < 1 || parallel_runs < 1) throw ConfigError("thread counts must be >= 1");
}

ExperimentSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("experiment spec must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        static const char* allowed[] = {"scenario", "schedulers", "seeds", "sweep", "run", "output",
                                        "parallel_runs", "fidelity_traces"};
        if (std::find(std::begin(allowed), std::end(allowed), key) == std::end(allowed))
            throw ConfigError("unknown key '" + key + "' in experiment spec");
    }
    ExperimentSpec spec;
    try {
        if (j.contains("scenario")) spec.base = request_from_json(j.at("scenario"));
        if (j.contains("schedulers")) spec.schedulers = j.at("schedulers").get<std::vector<std::string>>();
        if (j.contains("seeds")) {
            const json& s = j.at("seeds");
            if (s.is_array()) {
                spec.seeds = s.get<std::vector<std::uint64_t>>();
            } else {
                const auto first = s.value("first", std::uint64_t{1});
                const auto count = s.value("count", 0);
                for (int i = 0; i < count; ++i) spec.seeds.push_back(first + static_cast<std::uint64_t>(i));
            }
        }
        if (j.contains("sweep")) {
            const json& sw = j.at("sweep");
            spec.sweep_variable = sw.value("variable", std::string("none"));
            if (sw.contains("values")) spec.values = sw.at("values").get<std::vector<double>>();
        }
        if (j.contains("run")) {
            const json& r = j.at("run");
            spec.run.rho = r.value("rho", spec.run.rho);
            spec.run.alpha = r.value("alpha", spec.run.alpha);
            spec.run.threads = r.value("threads", spec.run.threads);
            spec.run.max_sweeps = r.value("max_sweeps", spec.run.max_sweeps);
            spec.run.stage1_max_sweeps = r.value("stage1_max_sweeps", spec.run.stage1_max_sweeps);
        }
        spec.output = j.value("output", std::string());
        spec.parallel_runs = j.value("parallel_runs", 1);
        spec.fidelity_traces = j.value("fidelity_traces", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open experiment spec '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("experiment spec is not valid JSON: " + std::string(e.what()));
    }
    return spec_from_json(j);
}

void apply_sweep(const std::string& variable, double value, ScenarioRequest& request, RunOptions& run) {
    if (variable == "none") return;
    if (variable == "kq") request.num_qos = static_cast<int>(std::lround(value));
    else if (variable == "k") request.layout.num_ues = static_cast<int>(std::lround(value));
    else if (variable == "nt") request.config.nt = static_cast<int>(std::lround(value));
    else if (variable == "rho") run.rho = value;
    else if (variable == "alpha") run.alpha = value;
    else if (variable == "q_hi") request.q_hi = value;
    else throw ConfigError("unknown sweep variable '" + variable + "'");
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<SchedulerId> ids;
    for (const auto& s : spec.schedulers) ids.push_back(parse_scheduler(s));

    const std::size_t jobs = spec.values.size() * spec.seeds.size();
    std::vector<std::vector<ResultRecord>> slots(jobs);
    std::vector<std::vector<TracePoint>> trace_slots(jobs);
    parallel_for(jobs, spec.parallel_runs, [&](std::size_t job) {
        const double value = spec.values[job / spec.seeds.size()];
        const std::uint64_t seed = spec.seeds[job % spec.seeds.size()];
        ScenarioRequest req = spec.base;
        RunOptions run = spec.run;
        apply_sweep(spec.sweep_variable, value, req, run);
        req.seed = seed;
        const Instance inst = make_instance(req);
        for (SchedulerId id : ids) {
            const SchedulerRun sr = run_scheduler(id, inst, run);
            const EsrResult ev = esr_and_sat(sr.schedule, inst.channels, inst.triplets, inst.scenario);
            const FidelityPoint fp = fidelity(inst, sr.schedule);
            ResultRecord rec;
            rec.scheduler = scheduler_name(id);
            rec.seed = seed;
            rec.sweep_variable = spec.sweep_variable;
            rec.sweep_value = value;
            rec.esr = ev.esr;
            rec.sat = ev.sat;
            rec.approx_objective = objective_G(inst.coeffs, sr.schedule, inst.scenario, run.rho);
            rec.wall_ms = sr.wall_ms;
            rec.f_a = fp.f_a;
            rec.f_t = fp.f_t;
            rec.bits_set = sr.schedule.popcount();
            if (sr.bcd) rec.sweeps = sr.bcd->sweeps;
            if (sr.distributed) {
                rec.ledger_bytes = sr.distributed->ledger.total_bytes();
                rec.ledger_single_round = sr.distributed->ledger.single_round();
            }
            slots[job].push_back(rec);
        }
        if (spec.fidelity_traces) {
            BcdOptions o;
            o.rho = run.rho;
            o.max_sweeps = run.max_sweeps;
            for (const auto& p : fidelity_trace(inst, o)) trace_slots[job].push_back({seed, value, p});
        }
    });

    ExperimentResult out;
    out.sweep_variable = spec.sweep_variable;
    for (std::size_t j = 0; j < jobs; ++j) {
        out.records.insert(out.records.end(), slots[j].begin(), slots[j].end());
        out.traces.insert(out.traces.end(), trace_slots[j].begin(), trace_slots[j].end());
    }
    out.summary = summarize(out.records);
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
    std::vector<std::pair<std::string, double>> keys;
    std::map<std::pair<std::string, double>, std::vector<const ResultRecord*>> groups;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.scheduler, r.sweep_value);
        if (!groups.count(key)) keys.push_back(key);
        groups[key].push_back(&r);
    }
    std::vector<SummaryRow> rows;
    for (const auto& key : keys) {
        const auto& g = groups[key];
        std::vector<double> esr, sat, obj, ms, err;
        for (const auto* r : g) {
            esr.push_back(r->esr);
            sat.push_back(r->sat);
            obj.push_back(r->approx_objective);
            ms.push_back(r->wall_ms);
            err.push_back(r->f_a != 0.0 ? std::abs(r->f_t - r->f_a) / std::abs(r->f_a) : 0.0);
        }
        SummaryRow row;
        row.scheduler = key.first;
        row.sweep_value = key.second;
        row.runs = static_cast<int>(g.size());
        row.esr_mean = mean_of(esr);
        row.esr_std = std_of(esr);
        row.sat_mean = mean_of(sat);
        row.sat_std = std_of(sat);
        row.objective_mean = mean_of(obj);
        row.wall_ms_median = median_of(ms);
        row.rel_error_mean = mean_of(err);
        rows.push_back(row);
    }
    return rows;
}

std::string records_csv(const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    os.precision(12);
    os << "scheduler,seed,sweep_variable,sweep_value,esr,sat,approx_objective,wall_ms,f_a,f_t,sweeps,bits_set,"
          "ledger_bytes,ledger_single_round\n";
    for (const auto& r : records)
        os << r.scheduler << ',' << r.seed << ',' << r.sweep_variable << ',' << r.sweep_value << ',' << r.esr << ','
           << r.sat << ',' << r.approx_objective << ',' << r.wall_ms << ',' << r.f_a << ',' << r.f_t << ','
           << r.sweeps << ',' << r.bits_set << ',' << r.ledger_bytes << ',' << (r.ledger_single_round ? 1 : 0)
           << '\n';
    return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& sweep_variable) {
    std::ostringstream os;
    os.precision(12);
    os << "scheduler," << sweep_variable
       << ",runs,esr_mean,esr_std,sat_mean,sat_std,objective_mean,wall_ms_median,rel_error_mean\n";
    for (const auto& r : rows)
        os << r.scheduler << ',' << r.sweep_value << ',' << r.runs << ',' << r.esr_mean << ',' << r.esr_std << ','
           << r.sat_mean << ',' << r.sat_std << ',' << r.objective_mean << ',' << r.wall_ms_median << ','
           << r.rel_error_mean << '\n';
    return os.str();
}

std::string traces_csv(const std::vector<TracePoint>& traces) {
    std::ostringstream os;
    os.precision(12);
    os << "seed,sweep_value,sweep,f_a,f_t,relative_error\n";
    for (const auto& t : traces)
        os << t.seed << ',' << t.sweep_value << ',' << t.point.sweep << ',' << t.point.f_a << ',' << t.point.f_t
           << ',' << t.point.relative_error() << '\n';
    return os.str();
}

json record_to_json(const ResultRecord& r) {
    return {{"scheduler", r.scheduler},
            {"seed", r.seed},
            {"sweep_variable", r.sweep_variable},
            {"sweep_value", r.sweep_value},
            {"esr", r.esr},
            {"sat", r.sat},
            {"approx_objective", r.approx_objective},
            {"wall_ms", r.wall_ms},
            {"f_a", r.f_a},
            {"f_t", r.f_t},
            {"sweeps", r.sweeps},
            {"bits_set", r.bits_set},
            {"ledger_bytes", r.ledger_bytes},
            {"ledger_single_round", r.ledger_single_round}};
}

json summary_to_json(const std::vector<SummaryRow>& rows, const std::string& sweep_variable) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"scheduler", r.scheduler},
                       {"sweep_value", r.sweep_value},
                       {"runs", r.runs},
                       {"esr_mean", r.esr_mean},
                       {"esr_std", r.esr_std},
                       {"sat_mean", r.sat_mean},
                       {"sat_std", r.sat_std},
                       {"objective_mean", r.objective_mean},
                       {"wall_ms_median", r.wall_ms_median},
                       {"rel_error_mean", r.rel_error_mean}});
    return {{"sweep_variable", sweep_variable}, {"rows", arr}};
}

void write_experiment(const ExperimentResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream os(fs::path(dir) / name);
        if (!os) throw IoError("cannot write '" + name + "' in '" + dir + "'");
        os << text;
    };
    write("records.csv", records_csv(result.records));
    write("summary.csv", summary_csv(result.summary, result.sweep_variable));
    write("summary.json", summary_to_json(result.summary, result.sweep_variable).dump(2) + "\n");
    if (!result.traces.empty()) write("fidelity.csv", traces_csv(result.traces));
}

}  // namespace jtsched
