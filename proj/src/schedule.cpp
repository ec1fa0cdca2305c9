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


#include "jtsched/schedule.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "jtsched/errors.hpp"

namespace jtsched {

void Schedule::set_consensus(const UeProfile& ue, int c, int r, bool on) {
    for (int m : ue.serving_set) set(m, ue.id, c, r, on);
}

bool Schedule::consistent_on(const UeProfile& ue, int c, int r) const {
    const bool first = get(ue.serving_set.front(), ue.id, c, r);
    for (int m : ue.serving_set)
        if (get(m, ue.id, c, r) != first) return false;
    return true;
}

bool Schedule::consistent_for(const UeProfile& ue) const {
    for (int c = 0; c < dims_.ccs; ++c)
        for (int r = 0; r < dims_.rbgs; ++r)
            if (!consistent_on(ue, c, r)) return false;
    return true;
}

bool Schedule::consistent(const Scenario& scenario) const {
    return std::all_of(scenario.ues.begin(), scenario.ues.end(),
                       [this](const UeProfile& ue) { return !ue.is_jt() || consistent_for(ue); });
}

bool Schedule::respects_association(const Scenario& scenario) const {
    for (int m = 0; m < dims_.cells; ++m)
        for (int k = 0; k < dims_.ues; ++k) {
            if (scenario.local_index(m, k) >= 0) continue;
            for (int c = 0; c < dims_.ccs; ++c)
                for (int r = 0; r < dims_.rbgs; ++r)
                    if (get(m, k, c, r)) return false;
        }
    return true;
}

int Schedule::scheduled_count(int m, int c, int r) const {
    int n = 0;
    for (int k = 0; k < dims_.ues; ++k) n += get(m, k, c, r) ? 1 : 0;
    return n;
}

std::vector<int> Schedule::scheduled_ues(int m, int c, int r) const {
    std::vector<int> out;
    for (int k = 0; k < dims_.ues; ++k)
        if (get(m, k, c, r)) out.push_back(k);
    return out;
}

int Schedule::max_scheduled_count() const {
    int best = 0;
    for (int m = 0; m < dims_.cells; ++m)
        for (int c = 0; c < dims_.ccs; ++c)
            for (int r = 0; r < dims_.rbgs; ++r) best = std::max(best, scheduled_count(m, c, r));
    return best;
}

std::size_t Schedule::popcount() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string schedule_to_json(const Schedule& schedule) {
    const auto& bits = schedule.raw();
    std::vector<std::size_t> runs;
    std::uint8_t current = bits.empty() ? 0 : bits.front();
    const std::uint8_t first = current;
    std::size_t len = 0;
    for (std::uint8_t b : bits) {
        if (b == current) {
            ++len;
        } else {
            runs.push_back(len);
            current = b;
            len = 1;
        }
    }
    if (len > 0) runs.push_back(len);

    const Dims& d = schedule.dims();
    nlohmann::json j;
    j["format"] = "jtsched.schedule";
    j["version"] = 1;
    j["dims"] = {{"cells", d.cells}, {"ues", d.ues}, {"ccs", d.ccs}, {"rbgs", d.rbgs}};
    j["order"] = "m,k,c,r";
    j["encoding"] = "rle";
    j["first"] = first;
    j["runs"] = runs;
    return j.dump();
}

Schedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("schedule JSON parse failed: ") + e.what());
    }
    try {
        if (j.at("encoding").get<std::string>() != "rle") throw IoError("unsupported schedule encoding");
        const auto& jd = j.at("dims");
        const Dims dims{jd.at("cells").get<int>(), jd.at("ues").get<int>(), jd.at("ccs").get<int>(),
                        jd.at("rbgs").get<int>()};
        if (dims.cells < 0 || dims.ues < 0 || dims.ccs < 0 || dims.rbgs < 0)
            throw IoError("negative schedule dimension");
        int value = j.at("first").get<int>();
        if (value != 0 && value != 1) throw IoError("first run value must be 0 or 1");
        const auto runs = j.at("runs").get<std::vector<std::size_t>>();
        const std::size_t total = std::accumulate(runs.begin(), runs.end(), std::size_t{0});
        if (total != dims.tensor_size()) throw IoError("run lengths do not cover the tensor");

        Schedule schedule(dims);
        std::size_t pos = 0;
        for (std::size_t len : runs) {
            for (std::size_t i = 0; i < len; ++i, ++pos) {
                const int r = static_cast<int>(pos % dims.rbgs);
                const int c = static_cast<int>((pos / dims.rbgs) % dims.ccs);
                const int k = static_cast<int>((pos / (static_cast<std::size_t>(dims.rbgs) * dims.ccs)) % dims.ues);
                const int m = static_cast<int>(pos / (static_cast<std::size_t>(dims.rbgs) * dims.ccs * dims.ues));
                schedule.set(m, k, c, r, value == 1);
            }
            value = 1 - value;
        }
        return schedule;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed schedule JSON: ") + e.what());
    }
}

}  // namespace jtsched
