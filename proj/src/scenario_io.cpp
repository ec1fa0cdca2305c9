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


#include "jtsched/scenario_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "jtsched/errors.hpp"

namespace jtsched {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

Position position_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("positions are [x, y, z] arrays");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json position_to(const Position& p) { return json::array({p.x, p.y, p.z}); }

template <typename T>
void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw IoError("channel file truncated");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

constexpr char kMagic[4] = {'J', 'T', 'C', 'H'};

}  // namespace

json rf_to_json(const RfConfig& rf) {
    return {{"num_cells", rf.num_cells},
            {"num_ccs", rf.num_ccs},
            {"num_rbgs_per_cc", rf.num_rbgs_per_cc},
            {"nt", rf.nt},
            {"nr", rf.nr},
            {"tx_power_per_rbg_w", rf.tx_power_per_rbg_w},
            {"noise_psd_dbm_hz", rf.noise_psd_dbm_hz},
            {"rbg_bandwidth_hz", rf.rbg_bandwidth_hz},
            {"cc_center_freqs_hz", rf.cc_center_freqs_hz},
            {"jt_gain_window_db", rf.jt_gain_window_db}};
}

json layout_to_json(const GeometrySpec& layout) {
    json orus = json::array();
    for (const auto& p : layout.oru_positions) orus.push_back(position_to(p));
    return {{"oru_positions", orus},
            {"x_min", layout.x_min},
            {"x_max", layout.x_max},
            {"y_min", layout.y_min},
            {"y_max", layout.y_max},
            {"ue_height", layout.ue_height},
            {"num_ues", layout.num_ues},
            {"pathloss_exponent", layout.pathloss_exponent},
            {"pathloss_ref_gain", layout.pathloss_ref_gain}};
}

ScenarioRequest request_from_json(const json& j) {
    reject_unknown(j, {"rf", "layout", "qos", "seed"}, "scenario config");
    ScenarioRequest req;
    if (j.contains("rf")) {
        const json& rf = j.at("rf");
        reject_unknown(rf,
                       {"num_cells", "num_ccs", "num_rbgs_per_cc", "nt", "nr", "tx_power_per_rbg_w",
                        "noise_psd_dbm_hz", "rbg_bandwidth_hz", "cc_center_freqs_hz",
                        "jt_gain_window_db"},
                       "rf");
        read_opt(rf, "num_cells", req.config.num_cells);
        read_opt(rf, "num_ccs", req.config.num_ccs);
        read_opt(rf, "num_rbgs_per_cc", req.config.num_rbgs_per_cc);
        read_opt(rf, "nt", req.config.nt);
        read_opt(rf, "nr", req.config.nr);
        read_opt(rf, "tx_power_per_rbg_w", req.config.tx_power_per_rbg_w);
        read_opt(rf, "noise_psd_dbm_hz", req.config.noise_psd_dbm_hz);
        read_opt(rf, "rbg_bandwidth_hz", req.config.rbg_bandwidth_hz);
        read_opt(rf, "cc_center_freqs_hz", req.config.cc_center_freqs_hz);
        read_opt(rf, "jt_gain_window_db", req.config.jt_gain_window_db);
        if (!rf.contains("cc_center_freqs_hz")) {
            auto& f = req.config.cc_center_freqs_hz;
            while (static_cast<int>(f.size()) < req.config.num_ccs) f.push_back(f.empty() ? 3.5e9 : f.back() + 0.1e9);
            f.resize(req.config.num_ccs);
        }
    }
    if (j.contains("layout")) {
        const json& lj = j.at("layout");
        reject_unknown(lj,
                       {"oru_positions", "x_min", "x_max", "y_min", "y_max", "ue_height", "num_ues",
                        "pathloss_exponent", "pathloss_ref_gain"},
                       "layout");
        if (lj.contains("oru_positions")) {
            req.layout.oru_positions.clear();
            for (const auto& p : lj.at("oru_positions")) req.layout.oru_positions.push_back(position_from(p));
        }
        read_opt(lj, "x_min", req.layout.x_min);
        read_opt(lj, "x_max", req.layout.x_max);
        read_opt(lj, "y_min", req.layout.y_min);
        read_opt(lj, "y_max", req.layout.y_max);
        read_opt(lj, "ue_height", req.layout.ue_height);
        read_opt(lj, "num_ues", req.layout.num_ues);
        read_opt(lj, "pathloss_exponent", req.layout.pathloss_exponent);
        read_opt(lj, "pathloss_ref_gain", req.layout.pathloss_ref_gain);
    }
    if (j.contains("qos")) {
        const json& q = j.at("qos");
        reject_unknown(q, {"num_qos", "q_lo", "q_hi"}, "qos");
        read_opt(q, "num_qos", req.num_qos);
        read_opt(q, "q_lo", req.q_lo);
        read_opt(q, "q_hi", req.q_hi);
    }
    read_opt(j, "seed", req.seed);
    req.config.validate();
    return req;
}

json request_to_json(const ScenarioRequest& request) {
    return {{"rf", rf_to_json(request.config)},
            {"layout", layout_to_json(request.layout)},
            {"qos", {{"num_qos", request.num_qos}, {"q_lo", request.q_lo}, {"q_hi", request.q_hi}}},
            {"seed", request.seed}};
}

ScenarioRequest load_request(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario config '" + path + "' is not valid JSON: " + e.what());
    }
    return request_from_json(j);
}

void write_channels(const ChannelSet& channels, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write channel file '" + path + "'");
    const Dims& d = channels.dims();
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, 1);
    for (int v : {d.cells, d.ues, d.ccs, d.rbgs, channels.nr(), channels.nt()}) put_le<std::int32_t>(os, v);
    for (int m = 0; m < d.cells; ++m)
        for (int k = 0; k < d.ues; ++k) put_le<double>(os, channels.gain(m, k));
    for (int m = 0; m < d.cells; ++m)
        for (int k = 0; k < d.ues; ++k)
            for (int c = 0; c < d.ccs; ++c)
                for (int r = 0; r < d.rbgs; ++r) {
                    const CMatrix& h = channels.at(m, k, c, r);
                    for (int i = 0; i < h.rows(); ++i)
                        for (int jj = 0; jj < h.cols(); ++jj) {
                            put_le<double>(os, h(i, jj).real());
                            put_le<double>(os, h(i, jj).imag());
                        }
                }
    if (!os) throw IoError("short write on channel file '" + path + "'");
}

ChannelSet read_channels(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open channel file '" + path + "'");
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a channel file: '" + path + "'");
    const auto version = get_le<std::uint32_t>(is);
    if (version != 1) throw IoError("unsupported channel file version " + std::to_string(version));
    int v[6];
    for (int& x : v) x = get_le<std::int32_t>(is);
    for (int x : v)
        if (x < 1 || x > (1 << 20)) throw IoError("implausible channel file dimensions");
    ChannelSet ch(Dims{v[0], v[1], v[2], v[3]}, v[4], v[5]);
    for (int m = 0; m < v[0]; ++m)
        for (int k = 0; k < v[1]; ++k) ch.gain(m, k) = get_le<double>(is);
    for (int m = 0; m < v[0]; ++m)
        for (int k = 0; k < v[1]; ++k)
            for (int c = 0; c < v[2]; ++c)
                for (int r = 0; r < v[3]; ++r) {
                    CMatrix& h = ch.at(m, k, c, r);
                    for (int i = 0; i < v[4]; ++i)
                        for (int jj = 0; jj < v[5]; ++jj) {
                            const double re = get_le<double>(is);
                            const double im = get_le<double>(is);
                            h(i, jj) = cdouble(re, im);
                        }
                }
    if (is.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes in channel file");
    return ch;
}

json scenario_to_json(const Scenario& scenario, const std::string& channel_file) {
    json ues = json::array();
    for (const auto& ue : scenario.ues) {
        ues.push_back({{"id", ue.id},
                       {"position", position_to(ue.position)},
                       {"kind", ue.is_jt() ? "jt" : "njt"},
                       {"serving_set", ue.serving_set},
                       {"has_qos", ue.has_qos},
                       {"qos_demand", ue.qos_demand}});
    }
    return {{"format", "jtsched.scenario"},
            {"version", 1},
            {"rf", rf_to_json(scenario.config)},
            {"layout", layout_to_json(scenario.layout)},
            {"ues", ues},
            {"channel_file", channel_file}};
}

void save_scenario(const Scenario& scenario, const ChannelSet& channels, const std::string& json_path,
                   const std::string& channel_path) {
    namespace fs = std::filesystem;
    write_channels(channels, channel_path);
    const fs::path base = fs::path(json_path).parent_path();
    const std::string rel = fs::relative(fs::absolute(channel_path), fs::absolute(base.empty() ? "." : base)).generic_string();
    std::ofstream os(json_path);
    if (!os) throw IoError("cannot write scenario file '" + json_path + "'");
    os << scenario_to_json(scenario, rel).dump(2) << '\n';
}

std::pair<Scenario, ChannelSet> load_scenario(const std::string& json_path) {
    namespace fs = std::filesystem;
    std::ifstream in(json_path);
    if (!in) throw IoError("cannot open scenario file '" + json_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("scenario file is not valid JSON: " + std::string(e.what()));
    }
    if (j.value("format", "") != "jtsched.scenario") throw IoError("not a scenario file: '" + json_path + "'");
    Scenario s;
    try {
        ScenarioRequest req = request_from_json({{"rf", j.at("rf")}, {"layout", j.at("layout")}});
        s.config = req.config;
        s.layout = req.layout;
        for (const auto& u : j.at("ues")) {
            UeProfile ue;
            ue.id = u.at("id").get<int>();
            ue.position = position_from(u.at("position"));
            ue.serving_set = u.at("serving_set").get<std::vector<int>>();
            ue.kind = u.at("kind").get<std::string>() == "jt" ? UeKind::Jt : UeKind::Njt;
            ue.has_qos = u.at("has_qos").get<bool>();
            ue.qos_demand = u.at("qos_demand").get<double>();
            s.ues.push_back(ue);
        }
    } catch (const json::exception& e) {
        throw IoError("malformed scenario file: " + std::string(e.what()));
    }
    for (int k = 0; k < s.num_ues(); ++k)
        if (s.ues[k].id != k) throw IoError("UE ids must be 0..K-1 in order");
    s.validate();
    s.index();
    const fs::path ch_path = fs::path(json_path).parent_path() / j.at("channel_file").get<std::string>();
    ChannelSet ch = read_channels(ch_path.string());
    if (!(ch.dims() == s.dims()) || ch.nr() != s.config.nr || ch.nt() != s.config.nt)
        throw IoError("channel file dimensions do not match the scenario");
    return {std::move(s), std::move(ch)};
}

}  // namespace jtsched
