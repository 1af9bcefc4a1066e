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

// Shared fixtures and, crucially, independent oracle implementations the
// tests compare the engine against. The oracles use different algorithms
// from the production code on purpose: a forward scan instead of timeline
// heads, breadth-first search instead of union-find.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "alertgraph/alert.hpp"
#include "alertgraph/graph.hpp"
#include "alertgraph/grouping.hpp"
#include "alertgraph/rng.hpp"

namespace testing_support {

using namespace alertgraph;

/// Extraction config reading the conventional keys.
inline ExtractionConfig default_extraction() {
    ExtractionConfig cfg;
    cfg.sources[PropertyType::ip] = {"src_ip"};
    cfg.sources[PropertyType::username] = {"user"};
    cfg.sources[PropertyType::hostname] = {"host"};
    return cfg;
}

/// Tiny schema: one-hot over detectors a/b plus a numeric weight.
inline EncodingSchema tiny_schema() {
    EncodingSchema schema;
    schema.features.push_back(FeatureSpec{FeatureKind::one_hot, "detector", {"a", "b"}, 1.0});
    schema.features.push_back(FeatureSpec{FeatureKind::numeric, "magnitude", {}, 1.0});
    return schema;
}

inline Alert make_alert(std::uint64_t id, double ts,
                        std::map<std::string, AttrValue> attrs,
                        std::string label = std::string(kBenignLabel),
                        std::string detector = "a") {
    Alert a;
    a.id = id;
    a.timestamp = ts;
    a.detector = std::move(detector);
    a.label = std::move(label);
    a.attributes = std::move(attrs);
    return a;
}

// ---------------------------------------------------------------------------
// oracle 1: graph construction by forward scan
//
// For every alert i and every property p it carries, the next later alert j
// that also carries p receives the edge i -> j caused by p. Properties
// shared between the same ordered pair land on one merged edge. This is an
// independent restatement of the streaming timeline-head construction.

struct OracleEdge {
    std::set<TimelineProperty> shared;
    double weight = 0.0;
};

using OracleEdgeMap = std::map<std::pair<std::uint64_t, std::uint64_t>, OracleEdge>;

inline OracleEdgeMap oracle_edges(const std::vector<Alert>& alerts,
                                  const ExtractionConfig& cfg) {
    std::vector<std::set<TimelineProperty>> props;
    props.reserve(alerts.size());
    for (const auto& a : alerts) props.push_back(extract_properties(a, cfg));

    OracleEdgeMap edges;
    for (std::size_t i = 0; i < alerts.size(); ++i) {
        for (const auto& p : props[i]) {
            for (std::size_t j = i + 1; j < alerts.size(); ++j) {
                if (!props[j].contains(p)) continue;
                auto& e = edges[{alerts[i].id, alerts[j].id}];
                e.shared.insert(p);
                e.weight = alerts[j].timestamp - alerts[i].timestamp;
                break;  // only the next alert on this property's timeline
            }
        }
    }
    return edges;
}

// ---------------------------------------------------------------------------
// oracle 2: delta grouping by breadth-first search
//
// Keeps the edges the delta map admits and collects weakly connected
// components by BFS over an adjacency list, assigning each component the
// smallest member id. Returns the partition as id sets keyed by group id.

inline std::map<std::uint64_t, std::set<std::uint64_t>> oracle_partition(
    const AlertGraph& graph, const DeltaConfig& deltas) {
    const auto& nodes = graph.nodes();
    std::map<std::uint64_t, std::vector<std::uint64_t>> adj;
    for (const auto& n : nodes) adj[n.id];
    for (const auto& [key, edge] : graph.edges()) {
        bool keep = false;
        for (const auto& p : edge.shared) {
            const double d = deltas.at(p.ptype);
            if (d > 0 && edge.weight <= d) keep = true;
        }
        if (keep) {
            adj[key.first].push_back(key.second);
            adj[key.second].push_back(key.first);
        }
    }

    std::map<std::uint64_t, std::set<std::uint64_t>> partition;
    std::set<std::uint64_t> seen;
    for (const auto& n : nodes) {
        if (seen.contains(n.id)) continue;
        std::set<std::uint64_t> component;
        std::deque<std::uint64_t> queue{n.id};
        seen.insert(n.id);
        while (!queue.empty()) {
            const auto cur = queue.front();
            queue.pop_front();
            component.insert(cur);
            for (const auto nb : adj.at(cur)) {
                if (seen.insert(nb).second) queue.push_back(nb);
            }
        }
        partition.emplace(*component.begin(), std::move(component));
    }
    return partition;
}

inline std::map<std::uint64_t, std::set<std::uint64_t>> partition_of(
    const std::vector<AlertGroup>& groups) {
    std::map<std::uint64_t, std::set<std::uint64_t>> partition;
    for (const auto& g : groups) {
        std::set<std::uint64_t> members;
        for (const auto& n : g.nodes) members.insert(n.id);
        partition.emplace(g.id, std::move(members));
    }
    return partition;
}

// ---------------------------------------------------------------------------
// fuzzing streams

struct FuzzOptions {
    std::size_t max_alerts = 200;
    std::size_t max_values = 10;  // distinct property values across the stream
    double max_gap = 20.0;
    double property_chance = 0.7;
};

/// A seeded random alert stream over a small value pool: adjacent alerts
/// frequently share properties, producing dense, merge-heavy graphs.
inline std::vector<Alert> fuzz_stream(std::uint64_t seed, const FuzzOptions& opt = {}) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.uniform_int(opt.max_alerts);
    const std::size_t n_values = 1 + rng.uniform_int(opt.max_values);
    std::vector<Alert> alerts;
    double ts = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::map<std::string, AttrValue> attrs;
        if (rng.uniform() < opt.property_chance) {
            attrs["src_ip"] = "ip" + std::to_string(rng.uniform_int(n_values));
        }
        if (rng.uniform() < opt.property_chance) {
            attrs["user"] = "u" + std::to_string(rng.uniform_int(n_values));
        }
        if (rng.uniform() < 0.3) {
            attrs["host"] = "h" + std::to_string(rng.uniform_int(n_values));
        }
        attrs["detector"] = rng.uniform() < 0.5 ? "a" : "b";
        attrs["magnitude"] = static_cast<double>(rng.uniform_int(5));
        const bool attack = rng.uniform() < 0.3;
        alerts.push_back(make_alert(i, ts, std::move(attrs),
                                    attack ? "step" + std::to_string(rng.uniform_int(3))
                                           : std::string(kBenignLabel)));
        ts += rng.uniform(0.0, opt.max_gap);
    }
    return alerts;
}

}  // namespace testing_support
