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

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alertgraph/alert.hpp"
#include "alertgraph/encoding.hpp"

namespace alertgraph {

/// What the edge stores: the property value(s) that caused it, the time
/// difference between its endpoints, and the two-component feature vector.
struct EdgeData {
    std::set<TimelineProperty> shared;
    double weight = 0.0;
    std::array<double, 2> feature{0.0, 0.0};

    bool operator==(const EdgeData&) const = default;
};

/// A vectorised alert inside the graph. The full attribute map is replaced
/// by the node vector; the pivot values and detector are retained for
/// reporting.
struct GraphNode {
    std::uint64_t id = 0;
    double timestamp = 0.0;
    std::string label = kBenignLabel;
    std::string detector;
    std::vector<double> vec;
    std::set<TimelineProperty> properties;

    bool operator==(const GraphNode&) const = default;
};

/// The global alert graph: a DAG whose nodes are alerts in stream order and
/// whose edges link consecutive alerts on each property timeline. Multiple
/// shared properties between the same pair merge into a single edge.
class AlertGraph {
public:
    using EdgeKey = std::pair<std::uint64_t, std::uint64_t>;

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::map<EdgeKey, EdgeData>& edges() const { return edges_; }

    bool empty() const { return nodes_.empty(); }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const GraphNode& node(std::uint64_t id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            throw std::out_of_range("no node with id " + std::to_string(id));
        }
        return nodes_[it->second];
    }

    const GraphNode& newest() const {
        if (nodes_.empty()) throw std::out_of_range("empty graph");
        return nodes_.back();
    }

    void add_node(GraphNode node) {
        if (!nodes_.empty() && node.id <= nodes_.back().id) {
            throw std::invalid_argument("node ids must be strictly increasing: got " +
                                        std::to_string(node.id) + " after " +
                                        std::to_string(nodes_.back().id));
        }
        index_.emplace(node.id, nodes_.size());
        nodes_.push_back(std::move(node));
    }

    /// Adds the property to the src->dst edge, creating the edge if the pair
    /// is not linked yet. src must have been inserted before dst.
    void link(std::uint64_t src, std::uint64_t dst, const TimelineProperty& cause,
              double weight) {
        if (src >= dst) {
            throw std::invalid_argument("edge must run forward in insertion order: " +
                                        std::to_string(src) + " -> " + std::to_string(dst));
        }
        auto& edge = edges_[{src, dst}];
        edge.shared.insert(cause);
        edge.weight = weight;
        edge.feature = encode_edge(edge.shared);
    }

    bool operator==(const AlertGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    std::vector<GraphNode> nodes_;
    std::map<EdgeKey, EdgeData> edges_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Head of each property timeline: the most recent node carrying the
/// property.
struct TimelineHeads {
    std::map<TimelineProperty, std::uint64_t> head;
};

/// One step of the streaming construction: inserts the alert as a node and
/// links it to the head of every timeline it belongs to, then takes over as
/// the new head. Merges multi-property matches between the same pair into
/// one edge. Alerts must arrive in chronological order; `tolerance` seconds
/// of jitter are allowed before the stream is rejected as out of order.
inline void add_alert(AlertGraph& graph, TimelineHeads& heads, const Alert& alert,
                      const ExtractionConfig& cfg, const EncodingSchema& schema,
                      double tolerance = 0.0) {
    if (!graph.empty() && alert.timestamp < graph.newest().timestamp - tolerance) {
        throw std::runtime_error(
            "out-of-order alert " + std::to_string(alert.id) + ": timestamp " +
            format_double(alert.timestamp) + " precedes newest node timestamp " +
            format_double(graph.newest().timestamp) + " beyond tolerance " +
            format_double(tolerance));
    }
    GraphNode node;
    node.id = alert.id;
    node.timestamp = alert.timestamp;
    node.label = alert.label;
    node.detector = alert.detector;
    node.vec = vectorise(alert, schema);
    node.properties = extract_properties(alert, cfg);
    const auto props = node.properties;
    graph.add_node(std::move(node));

    for (const auto& p : props) {
        auto it = heads.head.find(p);
        if (it != heads.head.end()) {
            const auto pred = it->second;
            // clamp guards the tolerance window; with tolerance 0 the
            // difference is already non-negative
            const double weight =
                std::max(0.0, alert.timestamp - graph.node(pred).timestamp);
            graph.link(pred, alert.id, p, weight);
        }
        heads.head[p] = alert.id;
    }
}

/// Incremental builder over an alert stream. Single writer; the finished
/// graph is immutable and safe to share between readers.
class GraphBuilder {
public:
    GraphBuilder(ExtractionConfig cfg, EncodingSchema schema, double tolerance = 0.0)
        : cfg_(std::move(cfg)), schema_(std::move(schema)), tolerance_(tolerance) {
        cfg_.validate();
        schema_.validate();
    }

    void add(const Alert& alert) {
        add_alert(graph_, heads_, alert, cfg_, schema_, tolerance_);
    }

    const AlertGraph& graph() const { return graph_; }
    const TimelineHeads& heads() const { return heads_; }

    AlertGraph take() { return std::move(graph_); }

private:
    AlertGraph graph_;
    TimelineHeads heads_;
    ExtractionConfig cfg_;
    EncodingSchema schema_;
    double tolerance_;
};

/// Builds the whole graph from a chronologically sorted stream. Equal to
/// folding add_alert over the sequence from the empty graph.
inline AlertGraph build_graph(std::span<const Alert> alerts, const ExtractionConfig& cfg,
                              const EncodingSchema& schema, double tolerance = 0.0) {
    GraphBuilder builder(cfg, schema, tolerance);
    for (const auto& alert : alerts) builder.add(alert);
    return builder.take();
}

}  // namespace alertgraph
