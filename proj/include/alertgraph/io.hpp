/*
 * Copyright 2026 The alertgraph authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alertgraph/alert.hpp"
#include "alertgraph/datagen.hpp"
#include "alertgraph/encoding.hpp"
#include "alertgraph/gmn.hpp"
#include "alertgraph/grouping.hpp"
#include "alertgraph/knowledge_base.hpp"

namespace alertgraph::io {

/// ordered_json keeps key order stable, so identical values always print
/// identical bytes -- the determinism the reports rely on.
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// files

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// small json helpers

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw std::runtime_error(where + ": missing required key '" + key + "'");
    }
    return *it;
}

inline double require_number(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) {
        throw std::runtime_error(where + ": key '" + key + "' must be a number");
    }
    return v.get<double>();
}

inline std::string require_string(const json& j, const char* key,
                                  const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_string()) {
        throw std::runtime_error(where + ": key '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

inline std::vector<std::string> string_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw std::runtime_error(where + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) {
            throw std::runtime_error(where + ": expected an array of strings");
        }
        out.push_back(e.get<std::string>());
    }
    return out;
}

/// Splits a text into lines; a trailing newline does not create an empty
/// final line.
inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

inline json parse_line(const std::string& line, const std::string& where) {
    try {
        return json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(where + ": malformed line: " + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// attribute values

inline json attr_to_json(const AttrValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::vector<std::string>>(v);
}

namespace detail {

/// Normalises one attribute leaf. Nested objects recurse with dotted keys;
/// null is skipped; a list must hold scalars, which are stringified.
inline void flatten_attribute(const std::string& key, const json& v,
                              std::map<std::string, AttrValue>& out,
                              const std::string& where) {
    if (v.is_null()) return;
    if (v.is_string()) {
        out[key] = v.get<std::string>();
    } else if (v.is_number()) {
        out[key] = v.get<double>();
    } else if (v.is_boolean()) {
        out[key] = std::string(v.get<bool>() ? "true" : "false");
    } else if (v.is_array()) {
        std::vector<std::string> items;
        for (const auto& e : v) {
            if (e.is_string()) {
                items.push_back(e.get<std::string>());
            } else if (e.is_number()) {
                items.push_back(format_double(e.get<double>()));
            } else if (e.is_boolean()) {
                items.push_back(e.get<bool>() ? "true" : "false");
            } else {
                throw std::runtime_error(where + ": attribute '" + key +
                                         "' has a list with non-scalar elements");
            }
        }
        out[key] = std::move(items);
    } else if (v.is_object()) {
        for (const auto& [sub, subval] : v.items()) {
            flatten_attribute(key + "." + sub, subval, out, where);
        }
    } else {
        throw std::runtime_error(where + ": attribute '" + key +
                                 "' has an unsupported value type");
    }
}

}  // namespace detail

inline std::map<std::string, AttrValue> attributes_from_json(const json& obj,
                                                             const std::string& where) {
    if (!obj.is_object()) {
        throw std::runtime_error(where + ": 'attributes' must be an object");
    }
    std::map<std::string, AttrValue> out;
    for (const auto& [key, value] : obj.items()) {
        detail::flatten_attribute(key, value, out, where);
    }
    return out;
}

// ---------------------------------------------------------------------------
// alerts (line-delimited)

inline json alert_to_json(const Alert& alert) {
    json j;
    j["id"] = alert.id;
    j["ts"] = alert.timestamp;
    j["detector"] = alert.detector;
    j["label"] = alert.label;
    json attrs = json::object();
    for (const auto& [key, value] : alert.attributes) attrs[key] = attr_to_json(value);
    j["attributes"] = attrs;
    return j;
}

/// Parses one alert object. `fallback_id` is used when the line carries no
/// id of its own (raw detector exports often do not).
inline Alert alert_from_json(const json& j, std::uint64_t fallback_id,
                             const std::string& where) {
    if (!j.is_object()) throw std::runtime_error(where + ": expected an object");
    Alert alert;
    if (auto it = j.find("id"); it != j.end()) {
        if (!it->is_number_unsigned()) {
            throw std::runtime_error(where + ": 'id' must be a non-negative integer");
        }
        alert.id = it->get<std::uint64_t>();
    } else {
        alert.id = fallback_id;
    }
    alert.timestamp = detail::require_number(j, "ts", where);
    alert.detector = detail::get_or<std::string>(j, "detector", "");
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw std::runtime_error(where + ": 'label' must be a string");
        alert.label = normalise_label(it->get<std::string>());
    } else {
        alert.label = kBenignLabel;
    }
    if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
        alert.attributes = attributes_from_json(*it, where);
    }
    // keep the detector visible to attribute-driven encodings
    if (!alert.detector.empty()) {
        alert.attributes.try_emplace("detector", alert.detector);
    }
    return alert;
}

inline std::vector<Alert> parse_alerts(const std::string& text, const std::string& name) {
    std::vector<Alert> out;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = name + ":" + std::to_string(i + 1);
        out.push_back(alert_from_json(detail::parse_line(lines[i], where), out.size(), where));
    }
    return out;
}

inline std::vector<Alert> load_alerts(const std::filesystem::path& path) {
    return parse_alerts(read_file(path), path.string());
}

inline void save_alerts(const std::filesystem::path& path, std::span<const Alert> alerts) {
    std::string out;
    for (const auto& alert : alerts) {
        out += alert_to_json(alert).dump();
        out += '\n';
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// timeline properties

inline json property_to_json(const TimelineProperty& p) {
    return json{{"value", p.value}, {"type", to_string(p.ptype)}};
}

inline TimelineProperty property_from_json(const json& j, const std::string& where) {
    TimelineProperty p;
    p.value = detail::require_string(j, "value", where);
    try {
        p.ptype = property_type_from_string(detail::require_string(j, "type", where));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    return p;
}

// ---------------------------------------------------------------------------
// alert groups (line-delimited interchange)

inline json group_to_json(const AlertGroup& group) {
    json j;
    j["id"] = group.id;
    json nodes = json::array();
    for (const auto& n : group.nodes) {
        json node;
        node["id"] = n.id;
        node["ts"] = n.timestamp;
        node["label"] = n.label;
        node["detector"] = n.detector;
        node["vec"] = n.vec;
        json props = json::array();
        for (const auto& p : n.properties) props.push_back(property_to_json(p));
        node["properties"] = props;
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& [key, edge] : group.edges) {
        json e;
        e["src"] = key.first;
        e["dst"] = key.second;
        e["weight"] = edge.weight;
        e["feature"] = json::array({edge.feature[0], edge.feature[1]});
        json shared = json::array();
        for (const auto& p : edge.shared) shared.push_back(property_to_json(p));
        e["shared"] = std::move(shared);
        edges.push_back(std::move(e));
    }
    j["edges"] = std::move(edges);
    return j;
}

inline AlertGroup group_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw std::runtime_error(where + ": expected an object");
    AlertGroup group;
    group.id = detail::require(j, "id", where).get<std::uint64_t>();
    std::set<std::uint64_t> node_ids;
    for (const auto& nj : detail::require(j, "nodes", where)) {
        GraphNode n;
        n.id = detail::require(nj, "id", where).get<std::uint64_t>();
        n.timestamp = detail::require_number(nj, "ts", where);
        n.label = detail::require_string(nj, "label", where);
        n.detector = detail::get_or<std::string>(nj, "detector", "");
        n.vec = detail::require(nj, "vec", where).get<std::vector<double>>();
        if (auto it = nj.find("properties"); it != nj.end()) {
            for (const auto& pj : *it) n.properties.insert(property_from_json(pj, where));
        }
        if (!node_ids.insert(n.id).second) {
            throw std::runtime_error(where + ": duplicate node id " + std::to_string(n.id));
        }
        group.nodes.push_back(std::move(n));
    }
    if (group.nodes.empty()) throw std::runtime_error(where + ": group has no nodes");
    for (const auto& ej : detail::require(j, "edges", where)) {
        const auto src = detail::require(ej, "src", where).get<std::uint64_t>();
        const auto dst = detail::require(ej, "dst", where).get<std::uint64_t>();
        if (!node_ids.contains(src) || !node_ids.contains(dst)) {
            throw std::runtime_error(where + ": edge " + std::to_string(src) + "->" +
                                     std::to_string(dst) +
                                     " references a node outside the group");
        }
        EdgeData edge;
        edge.weight = detail::require_number(ej, "weight", where);
        const auto& fj = detail::require(ej, "feature", where);
        if (!fj.is_array() || fj.size() != 2) {
            throw std::runtime_error(where + ": edge feature must be a 2-element array");
        }
        edge.feature = {fj[0].get<double>(), fj[1].get<double>()};
        for (const auto& pj : detail::require(ej, "shared", where)) {
            edge.shared.insert(property_from_json(pj, where));
        }
        if (edge.shared.empty()) {
            throw std::runtime_error(where + ": edge without shared properties");
        }
        group.edges.emplace(AlertGraph::EdgeKey{src, dst}, std::move(edge));
    }
    return group;
}

inline std::vector<AlertGroup> parse_groups(const std::string& text,
                                            const std::string& name) {
    std::vector<AlertGroup> out;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = name + ":" + std::to_string(i + 1);
        out.push_back(group_from_json(detail::parse_line(lines[i], where), where));
    }
    return out;
}

inline std::vector<AlertGroup> load_groups(const std::filesystem::path& path) {
    return parse_groups(read_file(path), path.string());
}

inline void save_groups(const std::filesystem::path& path,
                        std::span<const AlertGroup> groups) {
    std::string out;
    for (const auto& g : groups) {
        out += group_to_json(g).dump();
        out += '\n';
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// configuration documents

inline json extraction_to_json(const ExtractionConfig& cfg) {
    json sources = json::object();
    for (const auto& [ptype, keys] : cfg.sources) sources[to_string(ptype)] = keys;
    json blacklist = json::array();
    for (const auto& p : cfg.blacklist) blacklist.push_back(property_to_json(p));
    return json{{"sources", sources}, {"blacklist", blacklist}};
}

inline ExtractionConfig extraction_from_json(const json& j, const std::string& where) {
    ExtractionConfig cfg;
    for (const auto& [key, value] : detail::require(j, "sources", where).items()) {
        PropertyType ptype;
        try {
            ptype = property_type_from_string(key);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        cfg.sources[ptype] = detail::string_list(value, where + ".sources." + key);
    }
    if (auto it = j.find("blacklist"); it != j.end()) {
        for (const auto& pj : *it) cfg.blacklist.insert(property_from_json(pj, where));
    }
    cfg.validate();
    return cfg;
}

inline json schema_to_json(const EncodingSchema& schema) {
    json features = json::array();
    for (const auto& f : schema.features) {
        json fj;
        fj["kind"] = to_string(f.kind);
        fj["key"] = f.key;
        if (f.kind == FeatureKind::numeric) {
            fj["scale"] = f.scale;
        } else {
            fj["vocabulary"] = f.vocabulary;
        }
        features.push_back(std::move(fj));
    }
    return json{{"features", features},
                {"excluded_keys", std::vector<std::string>(schema.excluded_keys.begin(),
                                                           schema.excluded_keys.end())}};
}

inline EncodingSchema schema_from_json(const json& j, const std::string& where) {
    EncodingSchema schema;
    for (const auto& fj : detail::require(j, "features", where)) {
        FeatureSpec f;
        try {
            f.kind = feature_kind_from_string(detail::require_string(fj, "kind", where));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        f.key = detail::require_string(fj, "key", where);
        if (f.kind == FeatureKind::numeric) {
            f.scale = detail::get_or<double>(fj, "scale", 1.0);
        } else {
            f.vocabulary = detail::string_list(detail::require(fj, "vocabulary", where),
                                               where + "." + f.key);
        }
        schema.features.push_back(std::move(f));
    }
    if (auto it = j.find("excluded_keys"); it != j.end()) {
        for (const auto& k : detail::string_list(*it, where + ".excluded_keys")) {
            schema.excluded_keys.insert(k);
        }
    }
    schema.validate();
    return schema;
}

inline json deltas_to_json(const DeltaConfig& deltas) {
    json j = json::object();
    for (const auto& [ptype, d] : deltas.delta) j[to_string(ptype)] = d;
    return j;
}

inline DeltaConfig deltas_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw std::runtime_error(where + ": deltas must be an object");
    DeltaConfig deltas;
    for (const auto& [key, value] : j.items()) {
        PropertyType ptype;
        try {
            ptype = property_type_from_string(key);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        if (!value.is_number()) {
            throw std::runtime_error(where + ": delta for '" + key + "' must be a number");
        }
        deltas.delta[ptype] = value.get<double>();
    }
    return deltas;
}

inline json gmn_config_to_json(const GmnConfig& c) {
    return json{{"node_in_dim", c.node_in_dim},
                {"edge_in_dim", c.edge_in_dim},
                {"hidden_dim", c.hidden_dim},
                {"prop_rounds", c.prop_rounds},
                {"graph_dim", c.graph_dim},
                {"margin", c.margin},
                {"learning_rate", c.learning_rate},
                {"epochs", c.epochs},
                {"seed", c.seed}};
}

inline GmnConfig gmn_config_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw std::runtime_error(where + ": model config must be an object");
    GmnConfig c;
    c.node_in_dim = detail::get_or<std::size_t>(j, "node_in_dim", c.node_in_dim);
    c.edge_in_dim = detail::get_or<std::size_t>(j, "edge_in_dim", c.edge_in_dim);
    c.hidden_dim = detail::get_or<std::size_t>(j, "hidden_dim", c.hidden_dim);
    c.prop_rounds = detail::get_or<std::size_t>(j, "prop_rounds", c.prop_rounds);
    c.graph_dim = detail::get_or<std::size_t>(j, "graph_dim", c.graph_dim);
    c.margin = detail::get_or<double>(j, "margin", c.margin);
    c.learning_rate = detail::get_or<double>(j, "learning_rate", c.learning_rate);
    c.epochs = detail::get_or<std::size_t>(j, "epochs", c.epochs);
    c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// scenario specs

inline json attr_map_to_json(const std::map<std::string, AttrValue>& attrs) {
    json j = json::object();
    for (const auto& [key, value] : attrs) j[key] = attr_to_json(value);
    return j;
}

inline json scenario_to_json(const ScenarioSpec& spec) {
    json templates = json::array();
    for (const auto& t : spec.templates) {
        json tj;
        tj["label"] = t.label;
        tj["min_alerts"] = t.min_alerts;
        tj["max_alerts"] = t.max_alerts;
        json share = json::array();
        for (auto p : t.share) share.push_back(to_string(p));
        tj["share"] = std::move(share);
        tj["min_gap"] = t.min_gap;
        tj["max_gap"] = t.max_gap;
        tj["instances"] = t.instances;
        tj["detector"] = t.detector;
        tj["signature"] = attr_map_to_json(t.signature);
        templates.push_back(std::move(tj));
    }
    return json{{"templates", templates},
                {"noise_rate", spec.noise_rate},
                {"duration", spec.duration},
                {"ip_pool", spec.ip_pool},
                {"user_pool", spec.user_pool},
                {"host_pool", spec.host_pool},
                {"collision_rate", spec.collision_rate},
                {"benign_detector", spec.benign_detector},
                {"benign_signature", attr_map_to_json(spec.benign_signature)},
                {"seed", spec.seed}};
}

inline ScenarioSpec scenario_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw std::runtime_error(where + ": scenario must be an object");
    ScenarioSpec spec;
    if (auto it = j.find("templates"); it != j.end()) {
        for (const auto& tj : *it) {
            AttackTemplate t;
            t.label = detail::require_string(tj, "label", where);
            const std::string twhere = where + ".templates." + t.label;
            t.min_alerts = detail::get_or<std::size_t>(tj, "min_alerts", 1);
            t.max_alerts = detail::get_or<std::size_t>(tj, "max_alerts", t.min_alerts);
            for (const auto& s :
                 detail::string_list(detail::require(tj, "share", twhere), twhere)) {
                try {
                    t.share.push_back(property_type_from_string(s));
                } catch (const std::invalid_argument& e) {
                    throw std::runtime_error(twhere + ": " + e.what());
                }
            }
            t.min_gap = detail::get_or<double>(tj, "min_gap", 0.0);
            t.max_gap = detail::get_or<double>(tj, "max_gap", t.min_gap);
            t.instances = detail::get_or<std::size_t>(tj, "instances", 1);
            t.detector = detail::get_or<std::string>(tj, "detector", "");
            if (auto sit = tj.find("signature"); sit != tj.end()) {
                t.signature = attributes_from_json(*sit, twhere);
            }
            spec.templates.push_back(std::move(t));
        }
    }
    spec.noise_rate = detail::get_or<double>(j, "noise_rate", 0.0);
    spec.duration = detail::get_or<double>(j, "duration", 60.0);
    spec.ip_pool = detail::get_or<std::vector<std::string>>(j, "ip_pool", {});
    spec.user_pool = detail::get_or<std::vector<std::string>>(j, "user_pool", {});
    spec.host_pool = detail::get_or<std::vector<std::string>>(j, "host_pool", {});
    spec.collision_rate = detail::get_or<double>(j, "collision_rate", 0.0);
    spec.benign_detector = detail::get_or<std::string>(j, "benign_detector", "noise");
    if (auto it = j.find("benign_signature"); it != j.end()) {
        spec.benign_signature = attributes_from_json(*it, where + ".benign_signature");
    }
    spec.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    return spec;
}

inline ScenarioSpec load_scenario(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return scenario_from_json(j, path.string());
}

// ---------------------------------------------------------------------------
// ground truth sidecar

inline void save_truth(const std::filesystem::path& path,
                       std::span<const TruthInstance> truth) {
    std::string out;
    for (const auto& t : truth) {
        json j{{"label", t.label}, {"instance", t.instance}, {"alert_ids", t.alert_ids}};
        out += j.dump();
        out += '\n';
    }
    write_file(path, out);
}

inline std::vector<TruthInstance> load_truth(const std::filesystem::path& path) {
    std::vector<TruthInstance> out;
    const auto lines = detail::split_lines(read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(i + 1);
        const json j = detail::parse_line(lines[i], where);
        TruthInstance t;
        t.label = detail::require_string(j, "label", where);
        t.instance = detail::require(j, "instance", where).get<std::size_t>();
        t.alert_ids =
            detail::require(j, "alert_ids", where).get<std::vector<std::uint64_t>>();
        out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// model checkpoints

inline constexpr const char* kCheckpointFormat = "alertgraph-gmn-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const std::filesystem::path& path, const GmnParams& params,
                            const GmnConfig& config) {
    json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["config"] = gmn_config_to_json(config);
    json tensors = json::object();
    for (const auto& [name, m] : params.tensors()) {
        tensors[name] = json{{"rows", m->rows}, {"cols", m->cols}, {"data", m->data}};
    }
    j["tensors"] = std::move(tensors);
    write_file(path, j.dump(2) + "\n");
}

inline std::pair<GmnParams, GmnConfig> load_checkpoint(const std::filesystem::path& path) {
    const std::string where = path.string();
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    if (detail::require_string(j, "format", where) != kCheckpointFormat) {
        throw std::runtime_error(where + ": not a model checkpoint");
    }
    if (detail::require(j, "version", where).get<int>() != kCheckpointVersion) {
        throw std::runtime_error(where + ": unsupported checkpoint version");
    }
    GmnConfig config = gmn_config_from_json(detail::require(j, "config", where), where);
    GmnParams params = GmnParams::shaped(config);
    const json& tensors = detail::require(j, "tensors", where);
    for (auto& [name, m] : params.tensors()) {
        auto it = tensors.find(name);
        if (it == tensors.end()) {
            throw std::runtime_error(where + ": checkpoint missing tensor '" + name + "'");
        }
        const auto rows = detail::require(*it, "rows", where).get<std::size_t>();
        const auto cols = detail::require(*it, "cols", where).get<std::size_t>();
        if (rows != m->rows || cols != m->cols) {
            throw std::runtime_error(where + ": tensor '" + name + "' has shape " +
                                     std::to_string(rows) + "x" + std::to_string(cols) +
                                     ", config implies " + m->shape_str());
        }
        auto data = detail::require(*it, "data", where).get<std::vector<double>>();
        if (data.size() != m->data.size()) {
            throw std::runtime_error(where + ": tensor '" + name + "' data length mismatch");
        }
        m->data = std::move(data);
    }
    return {std::move(params), config};
}

// ---------------------------------------------------------------------------
// knowledge base (line-delimited data file + index)

inline constexpr const char* kKbIndexFormat = "alertgraph-kb-index";

inline void save_kb(const KnowledgeBase& kb, const std::filesystem::path& data_path,
                    const std::filesystem::path& index_path) {
    std::string data;
    json index_entries = json::array();
    for (std::size_t i = 0; i < kb.size(); ++i) {
        const auto& e = kb.entries()[i];
        json j;
        j["incident_id"] = e.incident_id;
        j["attack_step"] = e.attack_step;
        j["notes"] = e.notes;
        j["added_at"] = e.added_at;
        j["group"] = group_to_json(e.group);
        data += j.dump();
        data += '\n';
        index_entries.push_back(json{{"line", i + 1},
                                     {"incident_id", e.incident_id},
                                     {"group_id", e.group.id},
                                     {"attack_step", e.attack_step}});
    }
    json index;
    index["format"] = kKbIndexFormat;
    index["version"] = 1;
    index["count"] = kb.size();
    index["entries"] = std::move(index_entries);
    write_file(data_path, data);
    write_file(index_path, index.dump(2) + "\n");
}

inline KnowledgeBase load_kb(const std::filesystem::path& data_path,
                             const std::filesystem::path& index_path) {
    KnowledgeBase kb;
    const auto lines = detail::split_lines(read_file(data_path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = data_path.string() + ":" + std::to_string(i + 1);
        const json j = detail::parse_line(lines[i], where);
        KnownGroup entry;
        entry.incident_id = detail::require_string(j, "incident_id", where);
        entry.attack_step = detail::require_string(j, "attack_step", where);
        entry.notes = detail::get_or<std::string>(j, "notes", "");
        entry.added_at = detail::get_or<double>(j, "added_at", 0.0);
        entry.group = group_from_json(detail::require(j, "group", where), where);
        try {
            kb.add(std::move(entry));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }

    const std::string iwhere = index_path.string();
    json index;
    try {
        index = json::parse(read_file(index_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(iwhere + ": " + e.what());
    }
    if (detail::require_string(index, "format", iwhere) != kKbIndexFormat) {
        throw std::runtime_error(iwhere + ": not a knowledge-base index");
    }
    const auto count = detail::require(index, "count", iwhere).get<std::size_t>();
    if (count != kb.size()) {
        throw std::runtime_error(iwhere + ": index count " + std::to_string(count) +
                                 " does not match data file (" + std::to_string(kb.size()) +
                                 " entries)");
    }
    const json& entries = detail::require(index, "entries", iwhere);
    for (std::size_t i = 0; i < kb.size(); ++i) {
        const auto& e = kb.entries()[i];
        const json& ij = entries.at(i);
        if (detail::require_string(ij, "incident_id", iwhere) != e.incident_id ||
            detail::require(ij, "group_id", iwhere).get<std::uint64_t>() != e.group.id) {
            throw std::runtime_error(iwhere + ": index entry " + std::to_string(i) +
                                     " does not match the data file");
        }
    }
    return kb;
}

// ---------------------------------------------------------------------------
// loss history

inline std::string loss_csv(const std::vector<double>& history) {
    std::ostringstream out;
    out << "epoch,mean_loss\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out << i << ',' << format_double(history[i]) << '\n';
    }
    return out.str();
}

}  // namespace alertgraph::io
