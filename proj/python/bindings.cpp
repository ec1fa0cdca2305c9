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


#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "jtsched/errors.hpp"
#include "jtsched/ezf.hpp"
#include "jtsched/harness.hpp"
#include "jtsched/scenario_io.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace jtsched;

namespace {

py::object to_py(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::object& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict eval_dict(const Instance& in, const Schedule& s, double rho) {
    const EsrResult e = esr_and_sat(s, in.channels, in.triplets, in.scenario);
    py::dict d;
    d["esr"] = e.esr;
    d["sat"] = e.sat;
    d["qos_ues"] = e.qos_ues;
    d["qos_met"] = e.qos_met;
    d["ue_rate"] = e.ue_rate;
    d["approx_rate"] = approx_ue_rates(in.coeffs, s, in.scenario);
    d["approx_objective"] = objective_G(in.coeffs, s, in.scenario, rho);
    d["approx_sat"] = approximate_sat(in.coeffs, s, in.scenario);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Joint-transmission MU-MIMO scheduling core";

    static py::exception<Error> base(m, "JtschedError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(base.ptr())(py::str(e.what()));
            err.attr("kind") = e.kind();
            PyErr_SetObject(base.ptr(), err.ptr());
        }
    });

    py::class_<Instance>(m, "Instance")
        .def_static(
            "generate",
            [](py::object request) {
                return make_instance(request.is_none() ? ScenarioRequest{} : request_from_json(from_py(request)));
            },
            py::arg("request") = py::none(), "Build a scenario from a request dict (rf, layout, qos, seed).")
        .def_static(
            "load",
            [](const std::string& path) {
                auto [scenario, channels] = load_scenario(path);
                return make_instance(std::move(scenario), std::move(channels));
            },
            py::arg("path"))
        .def("save", [](const Instance& in, const std::string& json_path, const std::string& channel_path) {
            save_scenario(in.scenario, in.channels, json_path, channel_path);
        })
        .def_property_readonly("cells", [](const Instance& in) { return in.scenario.dims().cells; })
        .def_property_readonly("ues", [](const Instance& in) { return in.scenario.dims().ues; })
        .def_property_readonly("ccs", [](const Instance& in) { return in.scenario.dims().ccs; })
        .def_property_readonly("rbgs", [](const Instance& in) { return in.scenario.dims().rbgs; })
        .def_property_readonly("nt", [](const Instance& in) { return in.scenario.config.nt; })
        .def_property_readonly("jt_ues", [](const Instance& in) { return in.scenario.jt_ues(); })
        .def_property_readonly("serving_sets",
                               [](const Instance& in) {
                                   std::vector<std::vector<int>> out;
                                   for (const auto& ue : in.scenario.ues) out.push_back(ue.serving_set);
                                   return out;
                               })
        .def_property_readonly("qos_demands", [](const Instance& in) {
            std::vector<double> out;
            for (const auto& ue : in.scenario.ues) out.push_back(ue.has_qos ? ue.qos_demand : 0.0);
            return out;
        });

    m.def(
        "schedule",
        [](const Instance& in, const std::string& scheduler, double rho, double alpha, int threads, int max_sweeps) {
            RunOptions o;
            o.rho = rho;
            o.alpha = alpha;
            o.threads = threads;
            o.max_sweeps = max_sweeps;
            SchedulerRun run;
            {
                py::gil_scoped_release release;
                run = run_scheduler(parse_scheduler(scheduler), in, o);
            }
            py::dict d = eval_dict(in, run.schedule, rho);
            d["scheduler"] = scheduler_name(run.id);
            d["wall_ms"] = run.wall_ms;
            d["schedule"] = to_py(json::parse(schedule_to_json(run.schedule)));
            if (run.bcd) {
                d["trace"] = run.bcd->trace;
                d["sweeps"] = run.bcd->sweeps;
            }
            if (run.distributed) {
                d["ledger"] = to_py(json::parse(run.distributed->ledger.to_json()));
                d["best_effort"] = run.distributed->best_effort;
            }
            return d;
        },
        py::arg("instance"), py::arg("scheduler") = "pds", py::arg("rho") = 5.0, py::arg("alpha") = 0.5,
        py::arg("threads") = 1, py::arg("max_sweeps") = 20, "Run one scheduler and evaluate it with exact rates.");

    m.def(
        "evaluate",
        [](const Instance& in, py::object schedule, double rho) {
            return eval_dict(in, schedule_from_json(from_py(schedule).dump()), rho);
        },
        py::arg("instance"), py::arg("schedule"), py::arg("rho") = 5.0);

    m.def(
        "oracle",
        [](const Instance& in, double rho, int guard) {
            const BruteForceResult bf = brute_force_optimum(in, rho, guard);
            py::dict d = eval_dict(in, bf.schedule, rho);
            d["g_star"] = bf.g_star;
            d["variables"] = bf.variables;
            d["enumerated"] = bf.enumerated;
            d["schedule"] = to_py(json::parse(schedule_to_json(bf.schedule)));
            return d;
        },
        py::arg("instance"), py::arg("rho") = 5.0, py::arg("guard") = kBruteForceGuard);

    m.def(
        "run_experiment",
        [](py::object spec) {
            const ExperimentSpec s = spec_from_json(from_py(spec));
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(s);
            }
            if (!s.output.empty()) write_experiment(r, s.output);
            json records = json::array();
            for (const auto& rec : r.records) records.push_back(record_to_json(rec));
            py::dict d;
            d["records"] = to_py(records);
            d["summary"] = to_py(summary_to_json(r.summary, r.sweep_variable));
            return d;
        },
        py::arg("spec"), "Run an experiment grid described by a spec dict.");
}
