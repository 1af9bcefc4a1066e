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
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/graph.hpp"

namespace alertgraph {

/// Per-property-type cut-off in seconds. A delta of zero disables the type
/// entirely: its edges are never kept, zero-gap edges included.
struct DeltaConfig {
    std::map<PropertyType, double> delta;

    double at(PropertyType t) const {
        auto it = delta.find(t);
        if (it == delta.end()) {
            throw std::invalid_argument(std::string("deltas: no delta configured for "
                                                    "property type '") +
                                        to_string(t) + "'");
        }
        if (it->second < 0) {
            throw std::invalid_argument(std::string("deltas: negative delta for '") +
                                        to_string(t) + "'");
        }
        return it->second;
    }

    /// An edge survives if any of its shared properties admits it.
    bool admits(const EdgeData& edge) const {
        bool keep = false;
        for (const auto& p : edge.shared) {
            const double d = at(p.ptype);
            if (d > 0 && edge.weight <= d) keep = true;
        }
        return keep;
    }
};

/// A weakly connected component of the delta-filtered graph, keeping its
/// own subgraph structure. Group id is the smallest member alert id.
struct AlertGroup {
    std::uint64_t id = 0;
    std::vector<GraphNode> nodes;  // insertion order
    std::map<AlertGraph::EdgeKey, EdgeData> edges;

    std::size_t size() const { return nodes.size(); }

    double span() const {
        if (nodes.empty()) return 0.0;
        return nodes.back().timestamp - nodes.front().timestamp;
    }

    std::map<std::string, std::size_t> label_histogram() const {
        std::map<std::string, std::size_t> hist;
        for (const auto& n : nodes) ++hist[n.label];
        return hist;
    }

    /// Most frequent non-benign label, ties broken lexicographically;
    /// "benign" when the group holds no attack labels at all.
    std::string majority_attack_label() const {
        std::string best = kBenignLabel;
        std::size_t best_count = 0;
        for (const auto& [label, count] : label_histogram()) {
            if (label == kBenignLabel) continue;
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        }
        return best;
    }

    bool is_attack() const { return majority_attack_label() != kBenignLabel; }
};

struct GroupStats {
    std::size_t size = 0;
    double span = 0.0;
    std::map<std::string, std::size_t> label_histogram;
    std::string majority_label;
};

inline GroupStats group_stats(const AlertGroup& group) {
    return {group.size(), group.span(), group.label_histogram(),
            group.majority_attack_label()};
}

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Removes every edge longer than its admitted delta and returns the weakly
/// connected components of what is left, ordered by smallest member id.
/// Pure: one frozen graph supports any number of delta sweeps.
inline std::vector<AlertGroup> cut_groups(const AlertGraph& graph,
                                          const DeltaConfig& deltas) {
    const auto& nodes = graph.nodes();
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);

    detail::UnionFind uf(nodes.size());
    std::vector<std::pair<AlertGraph::EdgeKey, const EdgeData*>> surviving;
    for (const auto& [key, edge] : graph.edges()) {
        if (deltas.admits(edge)) {
            surviving.emplace_back(key, &edge);
            uf.unite(index.at(key.first), index.at(key.second));
        }
    }

    // component root (lowest member index) -> group slot, in id order
    std::map<std::size_t, std::size_t> slot_of_root;
    std::vector<AlertGroup> groups;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto root = uf.find(i);
        auto [it, fresh] = slot_of_root.try_emplace(root, groups.size());
        if (fresh) {
            groups.emplace_back();
            groups.back().id = nodes[root].id;
        }
        groups[it->second].nodes.push_back(nodes[i]);
    }
    for (const auto& [key, edge] : surviving) {
        groups[slot_of_root.at(uf.find(index.at(key.first)))].edges.emplace(key, *edge);
    }
    return groups;
}

}  // namespace alertgraph
