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

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/grouping.hpp"

namespace alertgraph {

/// A group collapsed to one point for cluster-quality measurement: the
/// aggregated node vector plus the group's majority attack label.
struct GroupFeature {
    std::uint64_t group_id = 0;
    std::vector<double> vec;
    std::string cluster_label;
};

enum class Aggregation { mean, sum };

/// Fraction of the group's alerts carrying its majority attack label.
/// Only meaningful for groups capturing actual attack steps; callers must
/// filter out benign-majority groups first.
inline double purity(const AlertGroup& group) {
    const auto majority = group.majority_attack_label();
    if (majority == kBenignLabel) {
        throw std::invalid_argument("purity: group " + std::to_string(group.id) +
                                    " has a benign majority; filter attack groups first");
    }
    std::size_t correct = 0;
    for (const auto& n : group.nodes) {
        if (n.label == majority) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(group.size());
}

/// Size-weighted purity over the attack groups: correctly grouped alerts
/// divided by all alerts in attack groups.
inline double dataset_purity(const std::vector<AlertGroup>& groups) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const auto& g : groups) {
        const auto majority = g.majority_attack_label();
        if (majority == kBenignLabel) continue;
        total += g.size();
        for (const auto& n : g.nodes) {
            if (n.label == majority) ++correct;
        }
    }
    if (total == 0) {
        throw std::invalid_argument("dataset_purity: no attack groups to evaluate");
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

/// Aggregates the member node vectors into the group-level feature vector.
inline GroupFeature group_feature(const AlertGroup& group,
                                  Aggregation agg = Aggregation::mean) {
    if (group.nodes.empty()) {
        throw std::invalid_argument("group_feature: empty group");
    }
    GroupFeature f;
    f.group_id = group.id;
    f.cluster_label = group.majority_attack_label();
    f.vec.assign(group.nodes.front().vec.size(), 0.0);
    for (const auto& n : group.nodes) {
        if (n.vec.size() != f.vec.size()) {
            throw std::invalid_argument("group_feature: inconsistent vector lengths in group " +
                                        std::to_string(group.id));
        }
        for (std::size_t i = 0; i < f.vec.size(); ++i) f.vec[i] += n.vec[i];
    }
    if (agg == Aggregation::mean) {
        for (auto& v : f.vec) v /= static_cast<double>(group.nodes.size());
    }
    return f;
}

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Mean silhouette over the feature points, clustered by label. For each
/// point, a = mean distance to its own cluster, b = smallest mean distance
/// to another cluster, s = (b - a) / max(a, b); points in singleton
/// clusters score 0. Needs at least two clusters.
inline double silhouette(const std::vector<GroupFeature>& features) {
    std::map<std::string, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < features.size(); ++i) {
        clusters[features[i].cluster_label].push_back(i);
    }
    if (clusters.size() < 2) {
        throw std::invalid_argument("silhouette: needs at least 2 clusters, got " +
                                    std::to_string(clusters.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& own = clusters.at(features[i].cluster_label);
        if (own.size() == 1) continue;  // singleton convention: s = 0
        double a = 0.0;
        for (auto j : own) {
            if (j != i) a += euclidean(features[i].vec, features[j].vec);
        }
        a /= static_cast<double>(own.size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, members] : clusters) {
            if (label == features[i].cluster_label) continue;
            double d = 0.0;
            for (auto j : members) d += euclidean(features[i].vec, features[j].vec);
            b = std::min(b, d / static_cast<double>(members.size()));
        }
        const double denom = std::max(a, b);
        total += denom > 0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(features.size());
}

struct EvalOptions {
    std::set<std::string> excluded_labels;
    Aggregation aggregation = Aggregation::mean;
};

/// One table row: method and exclusion setting against both metrics.
/// Silhouette is absent when fewer than two clusters remain.
struct GroupingReportRow {
    std::string setting;  // "standard" or "excluding_<labels>"
    std::string method;   // "graph_based" or "time_based"
    std::size_t n_groups = 0;
    std::size_t n_attack_groups = 0;
    double purity = 0.0;
    std::optional<double> silhouette;
};

struct GroupingReport {
    std::vector<GroupingReportRow> rows;
};

namespace detail {

inline GroupingReportRow score_side(const std::string& setting, const std::string& method,
                                    const std::vector<AlertGroup>& groups,
                                    const std::set<std::string>& excluded,
                                    Aggregation agg) {
    GroupingReportRow row;
    row.setting = setting;
    row.method = method;
    row.n_groups = groups.size();
    std::vector<AlertGroup> attack;
    for (const auto& g : groups) {
        const auto label = g.majority_attack_label();
        if (label == kBenignLabel || excluded.contains(label)) continue;
        attack.push_back(g);
    }
    row.n_attack_groups = attack.size();
    row.purity = attack.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : dataset_purity(attack);
    std::vector<GroupFeature> feats;
    feats.reserve(attack.size());
    std::set<std::string> labels;
    for (const auto& g : attack) {
        feats.push_back(group_feature(g, agg));
        labels.insert(feats.back().cluster_label);
    }
    if (labels.size() >= 2) row.silhouette = silhouette(feats);
    return row;
}

}  // namespace detail

/// Scores both grouping methods on purity and silhouette, standard and,
/// when an exclusion set is given, with the excluded labels' groups dropped.
inline GroupingReport evaluate_grouping(const std::vector<AlertGroup>& graph_based,
                                        const std::vector<AlertGroup>& time_based,
                                        const EvalOptions& options = {}) {
    GroupingReport report;
    report.rows.push_back(detail::score_side("standard", "graph_based", graph_based, {},
                                             options.aggregation));
    report.rows.push_back(detail::score_side("standard", "time_based", time_based, {},
                                             options.aggregation));
    if (!options.excluded_labels.empty()) {
        std::string setting = "excluding";
        for (const auto& l : options.excluded_labels) setting += "_" + l;
        report.rows.push_back(detail::score_side(setting, "graph_based", graph_based,
                                                 options.excluded_labels,
                                                 options.aggregation));
        report.rows.push_back(detail::score_side(setting, "time_based", time_based,
                                                 options.excluded_labels,
                                                 options.aggregation));
    }
    return report;
}

inline std::string to_csv(const GroupingReport& report) {
    std::ostringstream os;
    os << "setting,method,metric,value\n";
    for (const auto& row : report.rows) {
        os << row.setting << "," << row.method << ",purity," << format_double(row.purity)
           << "\n";
        os << row.setting << "," << row.method << ",silhouette,"
           << (row.silhouette ? format_double(*row.silhouette) : "nan") << "\n";
        os << row.setting << "," << row.method << ",n_groups," << row.n_groups << "\n";
        os << row.setting << "," << row.method << ",n_attack_groups,"
           << row.n_attack_groups << "\n";
    }
    return os.str();
}

}  // namespace alertgraph
