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

#include <span>
#include <stdexcept>
#include <vector>

#include "alertgraph/grouping.hpp"

namespace alertgraph {

/// Purely time-based aggregation, the comparison baseline: consecutive
/// alerts stay in one group while the gap between them is strictly shorter
/// than delta. Groups carry no edges. With delta 0 every alert is a
/// singleton.
inline std::vector<AlertGroup> time_group(std::span<const Alert> alerts, double delta,
                                          const EncodingSchema& schema) {
    if (delta < 0) throw std::invalid_argument("time_group: delta must be >= 0");
    std::vector<AlertGroup> groups;
    for (std::size_t i = 0; i < alerts.size(); ++i) {
        const auto& alert = alerts[i];
        if (i > 0 && alert.timestamp < alerts[i - 1].timestamp) {
            throw std::invalid_argument("time_group: alerts must be sorted by timestamp");
        }
        const bool chain = i > 0 && alert.timestamp - alerts[i - 1].timestamp < delta;
        if (!chain) {
            groups.emplace_back();
            groups.back().id = alert.id;
        }
        GraphNode node;
        node.id = alert.id;
        node.timestamp = alert.timestamp;
        node.label = alert.label;
        node.detector = alert.detector;
        node.vec = vectorise(alert, schema);
        groups.back().nodes.push_back(std::move(node));
    }
    return groups;
}

}  // namespace alertgraph
