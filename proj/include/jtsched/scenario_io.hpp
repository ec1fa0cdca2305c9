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

#include <string>
#include <utility>

#include <json.hpp>

#include "jtsched/scenario.hpp"

namespace jtsched {

/// Scenario config file: {"rf": {...}, "layout": {...}, "qos": {...}, "seed": n}.
/// Every section and key is optional; missing values keep their defaults.
/// Unknown keys raise ConfigError.
ScenarioRequest request_from_json(const nlohmann::json& j);
nlohmann::json request_to_json(const ScenarioRequest& request);
ScenarioRequest load_request(const std::string& path);

nlohmann::json rf_to_json(const RfConfig& rf);
nlohmann::json layout_to_json(const GeometrySpec& layout);

/// Binary channel file: "JTCH", u32 version, i32 cells, ues, ccs, rbgs, nr,
/// nt, then M*K float64 large-scale gains, then every H in (m, k, c, r)
/// order, each row-major with interleaved re/im float64. Little-endian.
void write_channels(const ChannelSet& channels, const std::string& path);
ChannelSet read_channels(const std::string& path);

/// Scenario JSON (config, UE profiles) referencing a channel file by a path
/// relative to the JSON file.
nlohmann::json scenario_to_json(const Scenario& scenario, const std::string& channel_file);
void save_scenario(const Scenario& scenario, const ChannelSet& channels,
                   const std::string& json_path, const std::string& channel_path);
std::pair<Scenario, ChannelSet> load_scenario(const std::string& json_path);

}  // namespace jtsched
