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
#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace alertgraph;
using testing_support::default_extraction;
using testing_support::fuzz_stream;
using testing_support::make_alert;
using testing_support::oracle_partition;
using testing_support::partition_of;
using testing_support::tiny_schema;

namespace {

DeltaConfig all_types(double ip, double user, double host) {
    DeltaConfig d;
    d.delta[PropertyType::ip] = ip;
    d.delta[PropertyType::username] = user;
    d.delta[PropertyType::hostname] = host;
    d.delta[PropertyType::extensible] = 0.0;
    return d;
}

EdgeData edge_with(std::set<TimelineProperty> shared, double weight) {
    EdgeData e;
    e.shared = std::move(shared);
    e.weight = weight;
    return e;
}

AlertGraph ip_chain(std::vector<double> timestamps) {
    std::vector<Alert> alerts;
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        alerts.push_back(make_alert(i, timestamps[i],
                                    {{"src_ip", std::string("10.0.0.1")}}));
    }
    return build_graph(alerts, default_extraction(), tiny_schema());
}

}  // namespace

TEST_CASE("delta lookup rejects missing and negative entries", "[grouping]") {
    DeltaConfig d;
    d.delta[PropertyType::ip] = 10.0;
    d.delta[PropertyType::username] = -1.0;
    REQUIRE(d.at(PropertyType::ip) == 10.0);
    REQUIRE_THROWS_AS(d.at(PropertyType::hostname), std::invalid_argument);
    REQUIRE_THROWS_AS(d.at(PropertyType::username), std::invalid_argument);
}

TEST_CASE("an edge survives while its gap fits the cut-off", "[grouping]") {
    const auto d = all_types(10.0, 5.0, 0.0);
    const TimelineProperty ip{"10.0.0.1", PropertyType::ip};
    const TimelineProperty user{"alice", PropertyType::username};

    REQUIRE(d.admits(edge_with({ip}, 10.0)));  // boundary is inclusive
    REQUIRE_FALSE(d.admits(edge_with({ip}, 10.0001)));
    REQUIRE(d.admits(edge_with({user}, 0.0)));
    REQUIRE_FALSE(d.admits(edge_with({user}, 5.5)));
}

TEST_CASE("a zero delta disables its property type outright", "[grouping]") {
    const auto d = all_types(10.0, 5.0, 0.0);
    const TimelineProperty host{"web01", PropertyType::hostname};
    // Even a simultaneous pair does not connect through a disabled type.
    REQUIRE_FALSE(d.admits(edge_with({host}, 0.0)));
}

TEST_CASE("one admitting property rescues a merged edge", "[grouping]") {
    const auto d = all_types(10.0, 5.0, 0.0);
    const TimelineProperty ip{"10.0.0.1", PropertyType::ip};
    const TimelineProperty user{"alice", PropertyType::username};
    // Gap 8 is beyond the username cut-off but inside the ip cut-off.
    REQUIRE(d.admits(edge_with({ip, user}, 8.0)));
    // Gap 12 is beyond both.
    REQUIRE_FALSE(d.admits(edge_with({ip, user}, 12.0)));
}

TEST_CASE("cutting a chain splits it at the long gaps", "[grouping]") {
    // Gaps 4, 20, 3: the middle edge falls to a 10-second cut-off.
    const auto g = ip_chain({0.0, 4.0, 24.0, 27.0});
    const auto groups = cut_groups(g, all_types(10.0, 10.0, 10.0));
    REQUIRE(groups.size() == 2);
    REQUIRE(groups[0].id == 0);
    REQUIRE(groups[0].size() == 2);
    REQUIRE(groups[0].edges.size() == 1);
    REQUIRE(groups[0].edges.contains({0, 1}));
    REQUIRE(groups[1].id == 2);
    REQUIRE(groups[1].size() == 2);
    REQUIRE(groups[1].edges.contains({2, 3}));
}

TEST_CASE("every node lands in a group, isolated ones alone", "[grouping]") {
    const std::vector<Alert> alerts{
        make_alert(0, 0.0, {{"src_ip", std::string("10.0.0.1")}}),
        make_alert(1, 1.0, {}),
        make_alert(2, 2.0, {{"src_ip", std::string("10.0.0.1")}}),
    };
    const auto g = build_graph(alerts, default_extraction(), tiny_schema());
    const auto groups = cut_groups(g, all_types(10.0, 10.0, 10.0));
    REQUIRE(groups.size() == 2);
    REQUIRE(partition_of(groups) ==
            std::map<std::uint64_t, std::set<std::uint64_t>>{{0, {0, 2}}, {1, {1}}});
}

TEST_CASE("group ids are the smallest member and come out ascending", "[grouping]") {
    const auto g = ip_chain({0.0, 100.0, 200.0, 201.0});
    const auto groups = cut_groups(g, all_types(10.0, 10.0, 10.0));
    REQUIRE(groups.size() == 3);
    std::vector<std::uint64_t> ids;
    for (const auto& grp : groups) {
        ids.push_back(grp.id);
        REQUIRE(grp.id == grp.nodes.front().id);
        for (const auto& n : grp.nodes) REQUIRE(grp.id <= n.id);
    }
    REQUIRE(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("one graph supports several delta sweeps", "[grouping]") {
    const auto g = ip_chain({0.0, 4.0, 24.0, 27.0});
    REQUIRE(cut_groups(g, all_types(30.0, 0.0, 0.0)).size() == 1);
    REQUIRE(cut_groups(g, all_types(10.0, 0.0, 0.0)).size() == 2);
    REQUIRE(cut_groups(g, all_types(0.0, 0.0, 0.0)).size() == 4);
}

TEST_CASE("group statistics summarise the membership", "[grouping]") {
    AlertGroup group;
    group.id = 3;
    const char* labels[] = {"benign", "scan", "scan", "exfil", "benign", "benign"};
    for (std::uint64_t i = 0; i < 6; ++i) {
        GraphNode n;
        n.id = 3 + i;
        n.timestamp = 10.0 + static_cast<double>(i);
        n.label = labels[i];
        group.nodes.push_back(n);
    }
    REQUIRE(group.size() == 6);
    REQUIRE(group.span() == 5.0);
    REQUIRE(group.label_histogram() ==
            std::map<std::string, std::size_t>{{"benign", 3}, {"exfil", 1}, {"scan", 2}});
    REQUIRE(group.majority_attack_label() == "scan");
    REQUIRE(group.is_attack());

    const auto stats = group_stats(group);
    REQUIRE(stats.size == 6);
    REQUIRE(stats.span == 5.0);
    REQUIRE(stats.majority_label == "scan");
}

TEST_CASE("attack majority ignores benign counts and breaks ties by name", "[grouping]") {
    AlertGroup group;
    const char* labels[] = {"benign", "benign", "benign", "zulu", "alpha"};
    for (std::uint64_t i = 0; i < 5; ++i) {
        GraphNode n;
        n.id = i;
        n.label = labels[i];
        group.nodes.push_back(n);
    }
    // benign outnumbers every attack label but never wins; the 1-1 tie
    // between alpha and zulu resolves to the lexicographically first.
    REQUIRE(group.majority_attack_label() == "alpha");

    AlertGroup quiet;
    GraphNode n;
    n.label = kBenignLabel;
    quiet.nodes.push_back(n);
    REQUIRE(quiet.majority_attack_label() == kBenignLabel);
    REQUIRE_FALSE(quiet.is_attack());
}

TEST_CASE("grouping matches the breadth-first oracle on fuzzed streams", "[grouping]") {
    const DeltaConfig sweeps[] = {
        all_types(5.0, 5.0, 5.0),
        all_types(12.0, 3.0, 0.0),
        all_types(0.0, 8.0, 2.0),
        all_types(40.0, 40.0, 40.0),
    };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto alerts = fuzz_stream(seed);
        const auto g = build_graph(alerts, default_extraction(), tiny_schema());
        for (const auto& deltas : sweeps) {
            INFO("seed " << seed);
            REQUIRE(partition_of(cut_groups(g, deltas)) == oracle_partition(g, deltas));
        }
    }
}

TEST_CASE("groups keep exactly the surviving edges among their members", "[grouping]") {
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const auto alerts = fuzz_stream(seed);
        const auto g = build_graph(alerts, default_extraction(), tiny_schema());
        const auto deltas = all_types(8.0, 8.0, 8.0);
        std::size_t surviving = 0;
        for (const auto& [key, edge] : g.edges()) {
            if (deltas.admits(edge)) ++surviving;
        }
        std::size_t kept = 0;
        std::size_t members = 0;
        for (const auto& grp : cut_groups(g, deltas)) {
            kept += grp.edges.size();
            members += grp.size();
            std::set<std::uint64_t> ids;
            for (const auto& n : grp.nodes) ids.insert(n.id);
            for (const auto& [key, edge] : grp.edges) {
                REQUIRE(ids.contains(key.first));
                REQUIRE(ids.contains(key.second));
                REQUIRE(deltas.admits(edge));
            }
        }
        REQUIRE(kept == surviving);
        REQUIRE(members == g.node_count());
    }
}
