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


// One PASS/FAIL line per acceptance criterion. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "../unit/test_support.hpp"
#include "jtsched/ezf.hpp"
#include "jtsched/harness.hpp"

using namespace jtsched;

namespace {

// Pinned tolerances.
constexpr double kOrthTol = 1e-9;          // |v_k^H w_j| / sqrt(P)
constexpr double kPowerTol = 1e-8;         // |sum ||w||^2 - P|
constexpr double kEzfSeconds = 10.0;
constexpr double kFidelityTol = 0.10;      // mean |f_t - f_a| / f_a at nt = 32
constexpr double kFidelitySeconds = 300.0;
constexpr int kMaxSweeps = 10;
constexpr double kNearOptRatio = 0.95;
constexpr double kNearOptShare = 0.90;
constexpr double kTinySeconds = 120.0;
constexpr double kEsrRatio = 0.90;
constexpr double kSatFloor = 0.90;
constexpr double kDeskSeconds = 600.0;
constexpr double kJensenSlack = 1e-9;
constexpr double kJensenSeconds = 10.0;

constexpr int kDeskSeeds = 20;
constexpr double kRho = 5.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Single-cell scenario with 3 UEs on 2 CCs x 2 RBGs.
ScenarioRequest tiny_request(std::uint64_t seed, int num_qos, double q_hi) {
    ScenarioRequest req;
    req.config = testing::small_rf(1, 2, 2, 4, 2);
    req.config.cc_center_freqs_hz = {3.2e9, 3.5e9};
    req.layout.oru_positions = {{0.0, 0.0, 25.0}};
    req.layout.x_min = -400.0;
    req.layout.x_max = 400.0;
    req.layout.y_min = -400.0;
    req.layout.y_max = 400.0;
    req.layout.num_ues = 3;
    req.num_qos = num_qos;
    req.q_lo = 0.0;
    req.q_hi = q_hi;
    req.seed = seed;
    return req;
}

// Desk instances and scheduler runs shared by several criteria.
struct DeskRun {
    std::uint64_t seed = 0;
    Instance instance;
    SchedulerRun pcs, pds, pds_nc, sus, mshs;
    EsrResult e_pcs, e_pds, e_pds_nc, e_sus, e_mshs;
};

std::vector<DeskRun>& desk_runs() {
    static std::vector<DeskRun> runs = [] {
        std::vector<DeskRun> out;
        RunOptions opt;
        opt.rho = kRho;
        for (int s = 1; s <= kDeskSeeds; ++s) {
            DeskRun d;
            d.seed = static_cast<std::uint64_t>(s);
            d.instance = make_instance(testing::desk_request(d.seed));
            const Instance& in = d.instance;
            auto eval = [&](const SchedulerRun& r) { return esr_and_sat(r.schedule, in.channels, in.triplets, in.scenario); };
            d.pcs = run_scheduler(SchedulerId::Pcs, in, opt);
            d.pds = run_scheduler(SchedulerId::Pds, in, opt);
            d.pds_nc = run_scheduler(SchedulerId::PdsNc, in, opt);
            d.sus = run_scheduler(SchedulerId::SusZf, in, opt);
            d.mshs = run_scheduler(SchedulerId::Mshs, in, opt);
            d.e_pcs = eval(d.pcs);
            d.e_pds = eval(d.pds);
            d.e_pds_nc = eval(d.pds_nc);
            d.e_sus = eval(d.sus);
            d.e_mshs = eval(d.mshs);
            out.push_back(std::move(d));
        }
        return out;
    }();
    return runs;
}

Outcome ezf_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    double worst_orth = 0.0, worst_power = 0.0;
    int instances = 0;
    for (int trial = 0; trial < 200; ++trial) {
        testing::ManualSpec spec;
        spec.nt = trial % 2 ? 32 : 16;
        spec.nr = 2;
        const int n = 1 + static_cast<int>(rng() % 6);
        spec.serving.assign(n, {0});
        spec.seed = 9000 + static_cast<std::uint64_t>(trial);
        Instance in = testing::manual_instance(spec);
        Schedule s = Schedule::empty(in.scenario);
        for (int k = 0; k < n; ++k) s.set(0, k, 0, 0, true);
        const CellBeams b = build_ezf(s, in.triplets, in.scenario, 0, 0, 0);
        const double p = in.scenario.config.tx_power_per_rbg_w;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                const CVector& v = in.triplets.at(k, 0, 0).v_for(0);
                worst_orth = std::max(worst_orth, std::abs(v.dot(b.w[j])) / std::sqrt(p));
            }
        worst_power = std::max(worst_power, std::abs(b.total_power() - p));
        ++instances;
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = worst_orth < kOrthTol && worst_power <= kPowerTol && t < kEzfSeconds;
    o.detail = std::to_string(instances) + " instances, max leak " + fmt("%.2e", worst_orth) + ", max power error " +
               fmt("%.2e", worst_power) + ", " + fmt("%.2f s", t);
    return o;
}

Outcome approximation_fidelity() {
    const auto t0 = Clock::now();
    std::vector<double> by_nt;
    std::string detail;
    for (int nt : {8, 16, 32, 64}) {
        std::vector<double> errs;
        for (int s = 1; s <= kDeskSeeds; ++s) {
            const Instance in = make_instance(testing::desk_request(static_cast<std::uint64_t>(s), nt));
            BcdOptions o;
            o.rho = kRho;
            const BcdResult r = centralized_bcd(in.coeffs, in.scenario, o);
            errs.push_back(fidelity(in, r.schedule, r.sweeps).relative_error());
        }
        by_nt.push_back(mean(errs));
        detail += "nt=" + std::to_string(nt) + ":" + fmt("%.4f", by_nt.back()) + " ";
    }
    bool monotone = true;
    for (std::size_t i = 1; i < by_nt.size(); ++i) monotone = monotone && by_nt[i] <= by_nt[i - 1];
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = by_nt[2] <= kFidelityTol && monotone && t < kFidelitySeconds;
    o.detail = detail + (monotone ? "monotone" : "not monotone") + ", " + fmt("%.1f s", t);
    return o;
}

Outcome bcd_convergence() {
    int runs = 0, bad_monotone = 0, bad_conv = 0, max_sweeps = 0;
    for (int s = 1; s <= kDeskSeeds; ++s) {
        for (int nt : {8, 32}) {
            const Instance in = make_instance(testing::desk_request(static_cast<std::uint64_t>(s), nt));
            BcdOptions o;
            o.rho = kRho;
            const BcdResult r = centralized_bcd(in.coeffs, in.scenario, o);
            ++runs;
            bool mono = r.min_update_delta >= 0.0;
            for (std::size_t i = 1; i < r.trace.size(); ++i) mono = mono && r.trace[i] >= r.trace[i - 1];
            if (!mono) ++bad_monotone;
            if (!r.converged || r.sweeps > kMaxSweeps) ++bad_conv;
            max_sweeps = std::max(max_sweeps, r.sweeps);
        }
    }
    for (const DeskRun& d : desk_runs()) {
        ++runs;
        if (d.pcs.bcd->min_update_delta < 0.0) ++bad_monotone;
        if (!d.pcs.bcd->converged || d.pcs.bcd->sweeps > kMaxSweeps) ++bad_conv;
        max_sweeps = std::max(max_sweeps, d.pcs.bcd->sweeps);
    }
    Outcome o;
    o.pass = bad_monotone == 0 && bad_conv == 0;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(bad_monotone) + " non-monotone, " +
               std::to_string(bad_conv) + " unconverged, max sweeps " + std::to_string(max_sweeps);
    return o;
}

Outcome near_optimality() {
    const auto t0 = Clock::now();
    int good = 0, total = 0;
    double worst = 1.0;
    for (int s = 1; s <= 50; ++s) {
        const Instance in = make_instance(tiny_request(static_cast<std::uint64_t>(100 + s), 1, 30.0));
        const BruteForceResult bf = brute_force_optimum(in.coeffs, in.scenario, kRho);
        BcdOptions o;
        o.rho = kRho;
        const double g = centralized_bcd(in.coeffs, in.scenario, o).trace.back();
        ++total;
        const bool ok = g >= kNearOptRatio * bf.g_star - 1e-12;
        good += ok;
        if (bf.g_star > 0.0) worst = std::min(worst, g / bf.g_star);
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = good >= kNearOptShare * total && t < kTinySeconds;
    o.detail = std::to_string(good) + "/" + std::to_string(total) + " within 95% of optimum, worst ratio " +
               fmt("%.4f", worst) + ", " + fmt("%.2f s", t);
    return o;
}

Outcome jt_consistency() {
    int runs = 0, bad = 0, jt_bits = 0;
    for (int s = 1; s <= 100; ++s) {
        const Instance in = make_instance(testing::desk_request(static_cast<std::uint64_t>(500 + s), 16));
        for (bool nc : {false, true}) {
            DistributedOptions o;
            o.njt_decoupling = !nc;
            const DistributedResult r = run_distributed(in.coeffs, in.scenario, o);
            ++runs;
            for (int i : in.scenario.jt_ues()) {
                const UeProfile& ue = in.scenario.ues[i];
                for (int c = 0; c < in.scenario.config.num_ccs; ++c)
                    for (int rb = 0; rb < in.scenario.config.num_rbgs_per_cc; ++rb) {
                        for (int m : ue.serving_set)
                            if (r.schedule.get(m, i, c, rb) != r.schedule.get(ue.serving_set.front(), i, c, rb)) ++bad;
                        jt_bits += r.schedule.get(ue.serving_set.front(), i, c, rb);
                    }
            }
        }
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(jt_bits) + " JT bits set, " + std::to_string(bad) +
               " disagreements";
    return o;
}

Outcome single_round() {
    int runs = 0, bad = 0;
    std::size_t bytes = 0;
    for (const DeskRun& d : desk_runs())
        for (const SchedulerRun* r : {&d.pds, &d.pds_nc}) {
            ++runs;
            const MessageLedger& l = r->distributed->ledger;
            bool ok = l.pus.size() == static_cast<std::size_t>(d.instance.scenario.config.num_cells) + 1;
            for (std::size_t p = 1; p < l.pus.size(); ++p)
                ok = ok && l.pus[p].upload_rounds == 1 && l.pus[p].download_rounds == 1;
            bad += !ok;
            bytes = std::max(bytes, l.total_bytes());
        }
    Outcome o;
    o.pass = bad == 0;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(bad) + " violations, max ledger bytes " +
               std::to_string(bytes);
    return o;
}

Outcome pds_vs_pcs() {
    const auto t0 = Clock::now();
    std::vector<double> esr_pcs, esr_pds, sat_pds, approx_sat_pds;
    for (const DeskRun& d : desk_runs()) {
        esr_pcs.push_back(d.e_pcs.esr);
        esr_pds.push_back(d.e_pds.esr);
        sat_pds.push_back(d.e_pds.sat);
        approx_sat_pds.push_back(approximate_sat(d.instance.coeffs, d.pds.schedule, d.instance.scenario));
    }
    const double ratio = mean(esr_pds) / mean(esr_pcs);
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = ratio >= kEsrRatio && mean(sat_pds) >= kSatFloor && t < kDeskSeconds;
    o.detail = "ESR ratio " + fmt("%.4f", ratio) + ", Sat(PDS) " + fmt("%.4f", mean(sat_pds)) +
               " (approximate-rate Sat " + fmt("%.4f", mean(approx_sat_pds)) + ")";
    return o;
}

Outcome ablation_ordering() {
    std::vector<double> esr_pds, esr_nc, sat_pds, sat_nc, sat_pcs, sat_mshs, esr_pcs, esr_sus;
    for (const DeskRun& d : desk_runs()) {
        esr_pds.push_back(d.e_pds.esr);
        esr_nc.push_back(d.e_pds_nc.esr);
        sat_pds.push_back(d.e_pds.sat);
        sat_nc.push_back(d.e_pds_nc.sat);
        sat_pcs.push_back(d.e_pcs.sat);
        sat_mshs.push_back(d.e_mshs.sat);
        esr_pcs.push_back(d.e_pcs.esr);
        esr_sus.push_back(d.e_sus.esr);
    }
    Outcome o;
    o.pass = mean(esr_pds) >= mean(esr_nc) && mean(sat_pds) >= mean(sat_nc) && mean(sat_pcs) >= mean(sat_mshs) &&
             mean(esr_pcs) >= mean(esr_sus);
    o.detail = "ESR pds/nc " + fmt("%.2f", mean(esr_pds)) + "/" + fmt("%.2f", mean(esr_nc)) + ", Sat pds/nc " +
               fmt("%.3f", mean(sat_pds)) + "/" + fmt("%.3f", mean(sat_nc)) + ", Sat pcs/mshs " +
               fmt("%.3f", mean(sat_pcs)) + "/" + fmt("%.3f", mean(sat_mshs)) + ", ESR pcs/sus " +
               fmt("%.2f", mean(esr_pcs)) + "/" + fmt("%.2f", mean(esr_sus));
    return o;
}

Outcome penalty_effect() {
    const auto t0 = Clock::now();
    std::vector<double> sat10, sat0;
    int tried = 0, optimum_full = 0;
    for (std::uint64_t s = 1; sat10.size() < 30 && s <= 2000; ++s) {
        const Instance in = make_instance(tiny_request(3000 + s, 2, 30.0));
        ++tried;
        if (!qos_feasible_exhaustive(in.coeffs, in.scenario).feasible) continue;
        BcdOptions o;
        o.rho = 10.0;
        sat10.push_back(approximate_sat(in.coeffs, centralized_bcd(in.coeffs, in.scenario, o).schedule, in.scenario));
        const BruteForceResult best = brute_force_optimum(in.coeffs, in.scenario, 10.0);
        optimum_full += approximate_sat(in.coeffs, best.schedule, in.scenario) == 1.0;
        o.rho = 0.0;
        sat0.push_back(approximate_sat(in.coeffs, centralized_bcd(in.coeffs, in.scenario, o).schedule, in.scenario));
    }
    const double min10 = sat10.empty() ? 0.0 : *std::min_element(sat10.begin(), sat10.end());
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = sat10.size() == 30 && min10 == 1.0 && mean(sat0) < mean(sat10) && t < kTinySeconds;
    o.detail = std::to_string(sat10.size()) + " feasible of " + std::to_string(tried) + ", Sat rho=10 min " +
               fmt("%.3f", min10) + ", mean Sat rho=0 " + fmt("%.3f", mean(sat0)) +
               ", exhaustive rho=10 optimum at Sat 1 on " + std::to_string(optimum_full) + ", " + fmt("%.2f s", t);
    return o;
}

Outcome jensen_chain() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(99);
    int bad = 0, bad_eq = 0;
    for (int trial = 0; trial < 500; ++trial) {
        testing::ManualSpec spec;
        spec.cells = 3;
        spec.nt = trial % 2 ? 16 : 8;
        spec.nr = 2;
        spec.snr_db = -5.0 + static_cast<double>(rng() % 30);
        const int nb = 1 + trial % 3;
        std::vector<int> set;
        for (int m = 0; m < nb; ++m) set.push_back(m);
        spec.serving = {set, {0}, {1}, {2}, {0}};
        spec.seed = 70000 + static_cast<std::uint64_t>(trial);
        Instance in = testing::manual_instance(spec);
        Schedule s = Schedule::empty(in.scenario);
        for (const auto& ue : in.scenario.ues)
            if (ue.id == 0 || rng() % 2) s.set_consensus(ue, 0, 0, true);
        const JensenDecomposition j = jensen_decomposed_jt_rate(in.triplets, in.scenario, s, 0, 0, 0);
        if (!(j.total <= j.log_sum_sinr + kJensenSlack && j.log_sum_sinr <= j.log_coherent_sinr + kJensenSlack)) ++bad;
        if (nb == 1 && !(std::abs(j.total - j.log_sum_sinr) <= kJensenSlack &&
                         std::abs(j.log_sum_sinr - j.log_coherent_sinr) <= kJensenSlack))
            ++bad_eq;
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = bad == 0 && bad_eq == 0 && t < kJensenSeconds;
    o.detail = "500 configurations, " + std::to_string(bad) + " chain violations, " + std::to_string(bad_eq) +
               " equality violations, " + fmt("%.2f s", t);
    return o;
}

Outcome determinism() {
    int bad = 0;
    for (const DeskRun& d : desk_runs()) {
        if (d.seed > 10) break;
        for (int threads : {1, 4, 16}) {
            DistributedOptions o;
            o.rho = kRho;
            o.worker_threads = threads;
            const DistributedResult r = run_distributed(d.instance.coeffs, d.instance.scenario, o);
            bad += !(r.schedule == d.pds.schedule);
        }
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = "10 seeds x {1,4,16} threads, " + std::to_string(bad) + " mismatches";
    return o;
}

Outcome relative_speed() {
    std::vector<double> ratio, t_pcs, t_pds;
    for (const DeskRun& d : desk_runs()) {
        if (d.seed > 10) break;
        RunOptions opt;
        opt.rho = kRho;
        opt.threads = 4;
        std::vector<double> a, b;
        for (int rep = 0; rep < 5; ++rep) {
            a.push_back(run_scheduler(SchedulerId::Pcs, d.instance, opt).wall_ms);
            b.push_back(run_scheduler(SchedulerId::Pds, d.instance, opt).wall_ms);
        }
        t_pcs.push_back(median(a));
        t_pds.push_back(median(b));
    }
    const double mp = median(t_pcs), md = median(t_pds);
    Outcome o;
    o.pass = md < mp;
    o.detail = "median wall-clock PDS(4 threads) " + fmt("%.3f ms", md) + " vs PCS " + fmt("%.3f ms", mp) +
               ", hardware threads " + std::to_string(std::thread::hardware_concurrency());
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"ezf-correctness", ezf_correctness},
        {"approximation-fidelity", approximation_fidelity},
        {"bcd-monotone-convergence", bcd_convergence},
        {"near-optimality", near_optimality},
        {"jt-consistency", jt_consistency},
        {"single-round-coordination", single_round},
        {"pds-vs-pcs", pds_vs_pcs},
        {"ablation-ordering", ablation_ordering},
        {"penalty-effect", penalty_effect},
        {"jensen-chain", jensen_chain},
        {"determinism", determinism},
        {"relative-speed", relative_speed},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
