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


#include "jtsched/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "jtsched/central.hpp"
#include "jtsched/core_problem.hpp"
#include "jtsched/errors.hpp"
#include "jtsched/parallel.hpp"

namespace jtsched {

std::size_t CoordinationPayload::upload_bytes() const {
    return kHeaderBytes + jt.size() * (3 * kScalarBytes + 1);
}

std::size_t CoordinationPayload::intra_bytes() const {
    return kHeaderBytes + njt_active.size() * kScalarBytes;
}

std::size_t MessageLedger::total_bytes() const {
    std::size_t total = 0;
    for (const auto& e : pus) total += e.total_bytes();
    return total;
}

bool MessageLedger::single_round() const {
    if (pus.size() < 2) return false;
    for (std::size_t p = 1; p < pus.size(); ++p)
        if (pus[p].upload_rounds != 1 || pus[p].download_rounds != 1) return false;
    return true;
}

std::string MessageLedger::to_json() const {
    nlohmann::json j;
    j["format"] = "jtsched.ledger";
    j["version"] = 1;
    j["total_bytes"] = total_bytes();
    j["single_round"] = single_round();
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t p = 0; p < pus.size(); ++p) {
        const auto& e = pus[p];
        arr.push_back({{"pu", p},
                       {"role", p == 0 ? "coordinator" : "worker"},
                       {"upload_rounds", e.upload_rounds},
                       {"download_rounds", e.download_rounds},
                       {"intra_rounds", e.intra_rounds},
                       {"upload_bytes", e.upload_bytes},
                       {"download_bytes", e.download_bytes},
                       {"intra_bytes", e.intra_bytes}});
    }
    j["pus"] = arr;
    return j.dump(2);
}

std::size_t CoreAllocation::popcount() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

CoreAllocation blank_allocation(const ApproxCoeffs& coeffs, int m, int c) {
    CoreAllocation a;
    a.cell = m;
    a.cc = c;
    a.rbgs = coeffs.rbgs();
    a.members = coeffs.members(m);
    a.bits.assign(a.members.size() * static_cast<std::size_t>(a.rbgs), 0);
    return a;
}

CoreAllocation snapshot(const CoreProblem& p) {
    CoreAllocation a;
    a.cell = p.cell();
    a.cc = p.cc();
    a.rbgs = p.rbgs();
    a.members = p.members();
    a.bits.assign(a.members.size() * static_cast<std::size_t>(a.rbgs), 0);
    for (int j = 0; j < p.size(); ++j)
        for (int r = 0; r < p.rbgs(); ++r) a.set(j, r, p.bit(j, r));
    return a;
}

std::vector<int> others_on(const CoreProblem& p, int j, int r) {
    std::vector<int> s;
    for (int i : p.active(r))
        if (i != j) s.push_back(i);
    return s;
}

}  // namespace

double inf_delta_1to0(const CoeffSlice& slice, int lt, const std::vector<int>& others) {
    if (others.empty()) return 0.0;
    const double n = static_cast<double>(others.size());
    double v = n * (std::log2(n + 1.0) - std::log2(n));
    for (int k : others) v -= slice.d_at(lt, k);
    return v;
}

double inf_delta_0to1(const CoeffSlice& slice, int lt, const std::vector<int>& others) {
    return -inf_delta_1to0(slice, lt, others);
}

Stage1Output stage1_local(const ApproxCoeffs& coeffs, const Scenario& scenario, int m, int c,
                          const Stage1Options& options) {
    if (!(options.alpha >= 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    if (options.max_sweeps < 1) throw ConfigError("stage-1 max_sweeps must be >= 1");
    CoreProblem p(coeffs, scenario, m, c, options.rho);
    const int R = p.rbgs();
    Stage1Output out;
    out.trace.push_back(p.value());
    std::vector<double> gain(R), rate(R);
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        bool changed = false;
        for (int j = 0; j < p.size(); ++j) {
            double fmax = -std::numeric_limits<double>::infinity();
            for (int r = 0; r < R; ++r) {
                gain[r] = p.gain(j, r, &rate[r]);
                fmax = std::max(fmax, rate[r]);
            }
            for (int r = 0; r < R; ++r) {
                const bool want = gain[r] > 0.0 && fmax > 0.0 && rate[r] > options.alpha * fmax;
                if (want == p.bit(j, r)) continue;
                p.set(j, r, want);
                changed = true;
            }
        }
        out.sweeps = sweep;
        out.trace.push_back(p.value());
        if (!changed) break;
    }
    out.bits = snapshot(p);

    CoordinationPayload& pl = out.payload;
    pl.cell = m;
    pl.cc = c;
    for (int j = 0; j < p.size(); ++j) {
        const UeProfile& ue = scenario.ues[p.ue(j)];
        if (ue.is_jt()) {
            for (int r = 0; r < R; ++r) {
                const CoeffSlice& s = coeffs.slice(m, c, r);
                const auto others = others_on(p, j, r);
                JtCandidate e;
                e.ue = ue.id;
                e.r = r;
                e.stage1_bit = p.bit(j, r);
                e.schedulable = s.schedulable[j] != 0;
                e.rate_bar = p.rate_if_on(j, r);
                e.inf_1to0 = inf_delta_1to0(s, j, others);
                e.inf_0to1 = inf_delta_0to1(s, j, others);
                pl.jt.push_back(e);
            }
        } else {
            for (int r = 0; r < R; ++r)
                if (p.bit(j, r)) pl.njt_active.push_back({ue.id, c, r, p.rate(j, r)});
        }
    }
    return out;
}

std::vector<int> min_count_prefix(const std::vector<double>& rates, double q, bool* feasible) {
    std::vector<int> order(rates.size());
    std::iota(order.begin(), order.end(), 0);
    if (q <= 0.0) {
        if (feasible) *feasible = true;
        return {};
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rates[a] > rates[b]; });
    double sum = 0.0;
    std::vector<int> chosen;
    for (int idx : order) {
        chosen.push_back(idx);
        sum += rates[idx];
        if (sum >= q) {
            if (feasible) *feasible = true;
            std::sort(chosen.begin(), chosen.end());
            return chosen;
        }
    }
    if (feasible) *feasible = false;
    std::vector<int> all(rates.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
}

Stage21Output stage21_jt_coordinate(const std::vector<CoordinationPayload>& payloads,
                                    const Scenario& scenario) {
    const Dims dims = scenario.dims();
    const int C = dims.ccs;
    const int R = dims.rbgs;
    const int nt = scenario.config.nt;

    std::vector<int> seen(static_cast<std::size_t>(dims.cells) * C, 0);
    std::vector<const JtCandidate*> lookup(dims.tensor_size(), nullptr);
    for (const auto& pl : payloads) {
        if (pl.cell < 0 || pl.cell >= dims.cells || pl.cc < 0 || pl.cc >= C)
            throw ProtocolError("payload from an unknown core");
        if (seen[static_cast<std::size_t>(pl.cell) * C + pl.cc]++)
            throw ProtocolError("duplicate payload from core [" + std::to_string(pl.cell) + "," +
                                std::to_string(pl.cc) + "]");
        for (const auto& e : pl.jt) {
            if (e.ue < 0 || e.ue >= dims.ues || e.r < 0 || e.r >= R || !scenario.ues[e.ue].is_jt() ||
                !scenario.ues[e.ue].served_by(pl.cell))
                throw ProtocolError("payload entry outside the JT association");
            lookup[dims.flat(pl.cell, e.ue, pl.cc, e.r)] = &e;
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] == 0)
            throw ProtocolError("missing payload from core [" + std::to_string(i / C) + "," +
                                std::to_string(i % C) + "]");

    Stage21Output out;
    out.consensus = Schedule(dims);
    out.rate_hat = RateTensor(dims);
    out.qos_bar = QosContribution(dims.cells, dims.ues, C);

    const std::vector<int> jt = scenario.jt_ues();
    for (int i : jt) {
        const UeProfile& ue = scenario.ues[i];
        std::vector<double> contribution;
        std::vector<std::pair<int, int>> eligible;
        for (int c = 0; c < C; ++c) {
            for (int r = 0; r < R; ++r) {
                double f01 = 0.0;
                double f10 = 0.0;
                double sum_rate = 0.0;
                bool all_on = true;
                bool schedulable = true;
                for (int m : ue.serving_set) {
                    const JtCandidate* e = lookup[dims.flat(m, i, c, r)];
                    if (!e) throw ProtocolError("missing JT entry for UE " + std::to_string(i));
                    schedulable = schedulable && e->schedulable;
                    sum_rate += e->rate_bar;
                    if (e->stage1_bit) {
                        f10 += -e->rate_bar + e->inf_1to0;
                    } else {
                        all_on = false;
                        f01 += e->rate_bar + e->inf_0to1;
                    }
                }
                if (!schedulable) continue;
                const bool pass = f01 > f10;
                if (!ue.has_qos) {
                    if (pass) out.consensus.set_consensus(ue, c, r, true);
                } else if ((pass || all_on) && sum_rate > 0.0) {
                    eligible.emplace_back(c, r);
                    contribution.push_back(sum_rate);
                }
            }
        }
        if (ue.has_qos) {
            bool feasible = true;
            for (int idx : min_count_prefix(contribution, ue.qos_demand, &feasible))
                out.consensus.set_consensus(ue, eligible[idx].first, eligible[idx].second, true);
            if (!feasible) out.best_effort.push_back(i);
        }
    }

    // nt cap over the JT load of each O-RU, UEs in ascending order.
    std::vector<int> load(static_cast<std::size_t>(dims.cells) * C * R, 0);
    auto slot = [&](int m, int c, int r) { return (static_cast<std::size_t>(m) * C + c) * R + r; };
    for (int i : jt) {
        const UeProfile& ue = scenario.ues[i];
        for (int c = 0; c < C; ++c) {
            for (int r = 0; r < R; ++r) {
                if (!out.consensus.consensus(ue, c, r)) continue;
                bool room = true;
                for (int m : ue.serving_set) room = room && load[slot(m, c, r)] < nt;
                if (!room) {
                    out.consensus.set_consensus(ue, c, r, false);
                    ++out.capped_bits;
                    continue;
                }
                for (int m : ue.serving_set) ++load[slot(m, c, r)];
            }
        }
    }

    for (int i : jt) {
        const UeProfile& ue = scenario.ues[i];
        for (int m : ue.serving_set)
            for (int c = 0; c < C; ++c)
                for (int r = 0; r < R; ++r)
                    if (out.consensus.consensus(ue, c, r))
                        out.rate_hat.at(m, i, c, r) = lookup[dims.flat(m, i, c, r)]->rate_bar;
        if (!ue.has_qos) continue;
        double grand = 0.0;
        std::vector<double> per_cell_cc(static_cast<std::size_t>(dims.cells) * C, 0.0);
        for (int m : ue.serving_set)
            for (int c = 0; c < C; ++c)
                for (int r = 0; r < R; ++r) {
                    const double f = out.rate_hat.at(m, i, c, r);
                    per_cell_cc[static_cast<std::size_t>(m) * C + c] += f;
                    grand += f;
                }
        for (int m : ue.serving_set)
            for (int c = 0; c < C; ++c)
                out.qos_bar.at(m, i, c) = grand - per_cell_cc[static_cast<std::size_t>(m) * C + c];
    }
    std::sort(out.best_effort.begin(), out.best_effort.end());
    return out;
}

Stage22Output stage22_njt_decouple(const std::vector<CoordinationPayload>& cell_payloads,
                                   const Scenario& scenario, int m, bool prune) {
    const int C = scenario.config.num_ccs;
    if (static_cast<int>(cell_payloads.size()) != C)
        throw ProtocolError("stage 2.2 needs one payload per core of the PU");
    for (int c = 0; c < C; ++c)
        if (cell_payloads[c].cell != m || cell_payloads[c].cc != c)
            throw ProtocolError("stage 2.2 payloads must be the PU's cores in CC order");

    Stage22Output out;
    out.cell = m;
    out.qos_bar = QosContribution(scenario.config.num_cells, scenario.num_ues(), C);
    if (!prune) return out;

    for (int k : scenario.njt_ues(m)) {
        const UeProfile& ue = scenario.ues[k];
        if (!ue.has_qos) continue;
        std::vector<NjtActiveRate> items;
        std::vector<double> rates;
        for (int c = 0; c < C; ++c)
            for (const auto& e : cell_payloads[c].njt_active)
                if (e.ue == k) {
                    items.push_back(e);
                    rates.push_back(e.rate);
                }
        bool feasible = true;
        const auto keep = min_count_prefix(rates, ue.qos_demand, &feasible);
        if (!feasible) out.best_effort.push_back(k);
        std::vector<char> kept(items.size(), 0);
        for (int idx : keep) kept[idx] = 1;
        std::vector<double> per_cc(C, 0.0);
        double total = 0.0;
        for (std::size_t n = 0; n < items.size(); ++n) {
            if (kept[n]) {
                per_cc[items[n].cc] += items[n].rate;
                total += items[n].rate;
            } else {
                out.released.push_back(items[n]);
            }
        }
        for (int c = 0; c < C; ++c) out.qos_bar.at(m, k, c) = total - per_cc[c];
    }
    return out;
}

Stage3Output stage3_refine(const ApproxCoeffs& coeffs, const Scenario& scenario, int m, int c,
                           const CoreAllocation& init, const std::vector<double>& offsets, double rho,
                           int max_sweeps) {
    if (max_sweeps < 1) throw ConfigError("stage-3 max_sweeps must be >= 1");
    CoreProblem p(coeffs, scenario, m, c, rho);
    if (init.members != p.members() || init.rbgs != p.rbgs() ||
        offsets.size() != p.members().size())
        throw DomainError("stage 3 input does not match the core's members");
    const int R = p.rbgs();
    for (int j = 0; j < p.size(); ++j) {
        p.set_offset(j, offsets[j]);
        for (int r = 0; r < R; ++r)
            if (init.get(j, r)) p.set(j, r, true);
    }

    std::vector<int> njt;
    for (int j = 0; j < p.size(); ++j)
        if (!scenario.ues[p.ue(j)].is_jt()) njt.push_back(j);

    Stage3Output out;
    for (int r = 0; r < R; ++r) {
        while (p.phi(r) > coeffs.nt()) {
            int victim = -1;
            for (int j : p.active(r))
                if (!scenario.ues[p.ue(j)].is_jt()) victim = j;
            if (victim < 0) break;
            p.set(victim, r, false);
            ++out.trimmed;
        }
    }

    out.trace.push_back(p.value());
    out.min_update_delta = std::numeric_limits<double>::infinity();
    bool any_update = false;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        bool changed = false;
        for (int j : njt) {
            for (int r = 0; r < R; ++r) {
                const bool want = p.gain(j, r) > 0.0;
                if (want == p.bit(j, r)) continue;
                const double d = p.set(j, r, want);
                out.min_update_delta = std::min(out.min_update_delta, d);
                any_update = true;
                changed = true;
            }
        }
        out.sweeps = sweep;
        out.trace.push_back(p.value());
        if (!changed) break;
    }
    if (!any_update) out.min_update_delta = 0.0;
    out.bits = snapshot(p);
    return out;
}

DistributedResult run_distributed(const ApproxCoeffs& coeffs, const Scenario& scenario,
                                  const DistributedOptions& options) {
    if (options.worker_threads < 1) throw ConfigError("worker_threads must be >= 1");
    const Dims dims = scenario.dims();
    const int M = dims.cells;
    const int C = dims.ccs;
    const int R = dims.rbgs;
    const std::size_t cores = static_cast<std::size_t>(M) * C;
    const int threads = options.worker_threads;

    // Stage 1 on every core.
    const Stage1Options s1opt{options.rho, options.alpha, options.stage1_max_sweeps};
    std::vector<Stage1Output> s1(cores);
    parallel_for(cores, threads, [&](std::size_t t) {
        s1[t] = stage1_local(coeffs, scenario, static_cast<int>(t / C), static_cast<int>(t % C), s1opt);
    });

    DistributedResult res;
    res.stage1 = Schedule(dims);
    std::vector<CoordinationPayload> payloads;
    payloads.reserve(cores);
    for (const auto& o : s1) {
        payloads.push_back(o.payload);
        for (std::size_t j = 0; j < o.bits.members.size(); ++j)
            for (int r = 0; r < R; ++r)
                if (o.bits.get(static_cast<int>(j), r)) res.stage1.set(o.bits.cell, o.bits.members[j], o.bits.cc, r, true);
    }

    // Stage 2.1 at PU0 alongside Stage 2.2 on the worker PUs.
    Stage21Output s21;
    std::vector<Stage22Output> s22(M);
    parallel_for(static_cast<std::size_t>(M) + 1, threads, [&](std::size_t t) {
        if (t == 0) {
            s21 = stage21_jt_coordinate(payloads, scenario);
            return;
        }
        const int m = static_cast<int>(t) - 1;
        std::vector<CoordinationPayload> mine(payloads.begin() + static_cast<std::ptrdiff_t>(m) * C,
                                              payloads.begin() + static_cast<std::ptrdiff_t>(m + 1) * C);
        s22[m] = stage22_njt_decouple(mine, scenario, m, options.njt_decoupling);
    });

    res.stage2 = s21.consensus;
    for (int m = 0; m < M; ++m) {
        for (int k : scenario.njt_ues(m))
            for (int c = 0; c < C; ++c)
                for (int r = 0; r < R; ++r)
                    if (res.stage1.get(m, k, c, r)) res.stage2.set(m, k, c, r, true);
    }
    for (int m = 0; m < M; ++m)
        for (const auto& rel : s22[m].released) res.stage2.set(m, rel.ue, rel.cc, rel.r, false);

    // Stage 3 on every core.
    std::vector<Stage3Output> s3(cores);
    parallel_for(cores, threads, [&](std::size_t t) {
        const int m = static_cast<int>(t / C);
        const int c = static_cast<int>(t % C);
        CoreAllocation init = blank_allocation(coeffs, m, c);
        std::vector<double> offsets(init.members.size(), 0.0);
        for (std::size_t j = 0; j < init.members.size(); ++j) {
            const UeProfile& ue = scenario.ues[init.members[j]];
            for (int r = 0; r < R; ++r) init.set(static_cast<int>(j), r, res.stage2.get(m, ue.id, c, r));
            if (ue.has_qos)
                offsets[j] = ue.is_jt() ? s21.qos_bar.at(m, ue.id, c) : s22[m].qos_bar.at(m, ue.id, c);
        }
        s3[t] = stage3_refine(coeffs, scenario, m, c, init, offsets, options.rho, options.stage3_max_sweeps);
    });

    res.schedule = Schedule(dims);
    res.stage3_min_delta = 0.0;
    for (const auto& o : s3) {
        for (std::size_t j = 0; j < o.bits.members.size(); ++j)
            for (int r = 0; r < R; ++r)
                if (o.bits.get(static_cast<int>(j), r)) res.schedule.set(o.bits.cell, o.bits.members[j], o.bits.cc, r, true);
        res.stage3_min_delta = std::min(res.stage3_min_delta, o.min_update_delta);
    }
    if (!res.schedule.consistent(scenario))
        throw InconsistentScheduleError("distributed schedule lost JT consistency");

    // Ledger.
    res.ledger.pus.assign(static_cast<std::size_t>(M) + 1, {});
    for (int m = 0; m < M; ++m) {
        auto& e = res.ledger.pus[static_cast<std::size_t>(m) + 1];
        e.upload_rounds = 1;
        e.upload_bytes = kHeaderBytes;
        e.intra_bytes = 0;
        for (int c = 0; c < C; ++c) e.upload_bytes += payloads[static_cast<std::size_t>(m) * C + c].upload_bytes();
        e.download_rounds = 1;
        e.download_bytes = kHeaderBytes;
        for (int i : scenario.jt_ues(m)) {
            e.download_bytes += static_cast<std::size_t>(C) * R;
            if (scenario.ues[i].has_qos) e.download_bytes += static_cast<std::size_t>(C) * kScalarBytes;
        }
        if (options.njt_decoupling) {
            e.intra_rounds = 2;
            for (int c = 0; c < C; ++c) e.intra_bytes += payloads[static_cast<std::size_t>(m) * C + c].intra_bytes();
            e.intra_bytes += kHeaderBytes;
            for (int k : scenario.njt_ues(m))
                if (scenario.ues[k].has_qos) e.intra_bytes += static_cast<std::size_t>(C) * (kScalarBytes + R);
        }
    }

    // Traces.
    for (const auto& o : s1)
        for (std::size_t step = 0; step < o.trace.size(); ++step)
            res.trace.push_back({"1", o.bits.cell, o.bits.cc, static_cast<int>(step), o.trace[step],
                                 step + 1 == o.trace.size() ? o.bits.popcount() : 0});
    res.trace.push_back({"2", -1, -1, 0, objective_G(coeffs, res.stage2, scenario, options.rho),
                         res.stage2.popcount()});
    for (const auto& o : s3)
        for (std::size_t step = 0; step < o.trace.size(); ++step)
            res.trace.push_back({"3", o.bits.cell, o.bits.cc, static_cast<int>(step), o.trace[step],
                                 step + 1 == o.trace.size() ? o.bits.popcount() : 0});
    res.objective = objective_G(coeffs, res.schedule, scenario, options.rho);
    res.trace.push_back({"final", -1, -1, 0, res.objective, res.schedule.popcount()});

    res.best_effort = s21.best_effort;
    for (const auto& o : s22) res.best_effort.insert(res.best_effort.end(), o.best_effort.begin(), o.best_effort.end());
    std::sort(res.best_effort.begin(), res.best_effort.end());
    return res;
}

std::string stage_trace_csv(const std::vector<StageTraceRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "stage,cell,cc,step,objective,bits_set\n";
    for (const auto& row : rows)
        os << row.stage << ',' << row.cell << ',' << row.cc << ',' << row.step << ','
           << row.objective << ',' << row.bits_set << '\n';
    return os.str();
}

}  // namespace jtsched
