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

#include "alertgraph/baseline.hpp"
#include "alertgraph/datagen.hpp"
#include "helpers.hpp"

using namespace alertgraph;
using testing_support::default_extraction;
using testing_support::tiny_schema;

namespace {

ScenarioSpec quiet_spec() {
    ScenarioSpec spec;
    AttackTemplate tpl;
    tpl.label = "bruteforce";
    tpl.min_alerts = 5;
    tpl.max_alerts = 5;
    tpl.share = {PropertyType::ip};
    tpl.min_gap = 1.0;
    tpl.max_gap = 2.0;
    tpl.instances = 1;
    tpl.detector = "ids";
    tpl.signature["alert_type"] = std::string("login_failure");
    spec.templates.push_back(tpl);
    spec.duration = 100.0;
    spec.ip_pool = {"10.0.0.1", "10.0.0.2", "10.0.0.3"};
    spec.seed = 7;
    return spec;
}

}  // namespace

TEST_CASE("a noiseless template emits exactly its alerts and truth", "[datagen]") {
    const auto scenario = generate(quiet_spec());
    REQUIRE(scenario.alerts.size() == 5);
    REQUIRE(scenario.truth.size() == 1);
    REQUIRE(scenario.truth[0].label == "bruteforce");
    REQUIRE(scenario.truth[0].instance == 0);
    REQUIRE(scenario.truth[0].alert_ids == std::vector<std::uint64_t>{0, 1, 2, 3, 4});

    for (const auto& a : scenario.alerts) {
        REQUIRE(a.label == "bruteforce");
        REQUIRE(a.detector == "ids");
        REQUIRE(std::get<std::string>(a.attributes.at("alert_type")) == "login_failure");
        REQUIRE(std::get<std::string>(a.attributes.at("detector")) == "ids");
    }
}

TEST_CASE("generation is a pure function of the spec", "[datagen]") {
    auto spec = quiet_spec();
    spec.noise_rate = 0.5;
    spec.user_pool = {"alice", "bob"};
    spec.host_pool = {"web01"};
    const auto a = generate(spec);
    const auto b = generate(spec);
    REQUIRE(a.alerts.size() == b.alerts.size());
    for (std::size_t i = 0; i < a.alerts.size(); ++i) {
        REQUIRE(a.alerts[i].id == b.alerts[i].id);
        REQUIRE(a.alerts[i].timestamp == b.alerts[i].timestamp);
        REQUIRE(a.alerts[i].label == b.alerts[i].label);
        REQUIRE(a.alerts[i].attributes == b.alerts[i].attributes);
    }
    REQUIRE(a.truth == b.truth);

    spec.seed = 8;
    const auto c = generate(spec);
    bool differs = c.alerts.size() != a.alerts.size();
    for (std::size_t i = 0; !differs && i < a.alerts.size(); ++i) {
        differs = a.alerts[i].timestamp != c.alerts[i].timestamp;
    }
    REQUIRE(differs);
}

TEST_CASE("ids are chronological positions in the stream", "[datagen]") {
    auto spec = quiet_spec();
    spec.templates[0].instances = 4;
    spec.noise_rate = 1.0;
    spec.user_pool = {"alice", "bob", "carol"};
    spec.host_pool = {"web01", "web02"};
    const auto scenario = generate(spec);
    for (std::size_t i = 0; i < scenario.alerts.size(); ++i) {
        REQUIRE(scenario.alerts[i].id == i);
        if (i > 0) {
            REQUIRE(scenario.alerts[i].timestamp >= scenario.alerts[i - 1].timestamp);
        }
    }
}

TEST_CASE("truth ids point at alerts of the right label", "[datagen]") {
    auto spec = quiet_spec();
    spec.templates[0].instances = 3;
    AttackTemplate second;
    second.label = "exfil";
    second.min_alerts = 2;
    second.max_alerts = 4;
    second.share = {PropertyType::username};
    second.min_gap = 0.5;
    second.max_gap = 1.5;
    second.instances = 2;
    spec.templates.push_back(second);
    spec.user_pool = {"alice", "bob", "carol"};
    spec.noise_rate = 0.3;
    spec.host_pool = {"web01"};
    const auto scenario = generate(spec);

    REQUIRE(scenario.truth.size() == 5);  // template order, then instances
    REQUIRE(scenario.truth[0].label == "bruteforce");
    REQUIRE(scenario.truth[3].label == "exfil");
    REQUIRE(scenario.truth[3].instance == 0);
    REQUIRE(scenario.truth[4].instance == 1);

    std::set<std::uint64_t> claimed;
    for (const auto& t : scenario.truth) {
        for (auto id : t.alert_ids) {
            REQUIRE(scenario.alerts.at(id).label == t.label);
            REQUIRE(claimed.insert(id).second);  // each alert in one instance
        }
    }
    // every attack alert is accounted for
    std::size_t attack_alerts = 0;
    for (const auto& a : scenario.alerts) {
        if (a.label != kBenignLabel) ++attack_alerts;
    }
    REQUIRE(claimed.size() == attack_alerts);
    // the exfil template used the default detector: its own label
    for (const auto& a : scenario.alerts) {
        if (a.label == "exfil") REQUIRE(a.detector == "exfil");
    }
}

TEST_CASE("an instance shares one value per configured type", "[datagen]") {
    auto spec = quiet_spec();
    spec.templates[0].share = {PropertyType::ip, PropertyType::username};
    spec.templates[0].instances = 2;
    spec.user_pool = {"alice", "bob"};
    const auto scenario = generate(spec);
    const auto cfg = default_extraction();

    std::vector<std::set<std::string>> ips_per_instance;
    for (const auto& t : scenario.truth) {
        std::set<std::string> ips;
        std::set<std::string> users;
        for (auto id : t.alert_ids) {
            const auto props = extract_properties(scenario.alerts.at(id), cfg);
            for (const auto& p : props) {
                if (p.ptype == PropertyType::ip) ips.insert(p.value);
                if (p.ptype == PropertyType::username) users.insert(p.value);
            }
        }
        REQUIRE(ips.size() == 1);
        REQUIRE(users.size() == 1);
        ips_per_instance.push_back(ips);
    }
    // round-robin claiming gives the two instances distinct values
    REQUIRE(ips_per_instance[0] != ips_per_instance[1]);
}

TEST_CASE("gaps inside an instance respect the configured bounds", "[datagen]") {
    auto spec = quiet_spec();
    spec.templates[0].instances = 5;
    spec.templates[0].min_gap = 2.0;
    spec.templates[0].max_gap = 3.0;
    const auto scenario = generate(spec);
    for (const auto& t : scenario.truth) {
        for (std::size_t i = 1; i < t.alert_ids.size(); ++i) {
            const double gap = scenario.alerts.at(t.alert_ids[i]).timestamp -
                               scenario.alerts.at(t.alert_ids[i - 1]).timestamp;
            REQUIRE(gap >= 2.0);
            REQUIRE(gap <= 3.0);
        }
    }
}

TEST_CASE("benign noise arrives at roughly the configured rate", "[datagen]") {
    ScenarioSpec spec;
    spec.noise_rate = 2.0;
    spec.duration = 500.0;
    spec.ip_pool = {"10.0.0.1", "10.0.0.2", "10.0.0.3", "10.0.0.4"};
    spec.user_pool = {"alice", "bob"};
    spec.host_pool = {"web01", "web02"};
    spec.benign_detector = "sensor";
    spec.benign_signature["alert_type"] = std::string("heartbeat");
    spec.seed = 3;
    const auto scenario = generate(spec);

    // Poisson(rate 2 * 500s) = 1000 expected; 5 sigma is about 160.
    REQUIRE(scenario.alerts.size() > 840);
    REQUIRE(scenario.alerts.size() < 1160);
    REQUIRE(scenario.truth.empty());
    for (const auto& a : scenario.alerts) {
        REQUIRE(a.label == kBenignLabel);
        REQUIRE(a.detector == "sensor");
        REQUIRE(a.timestamp <= 500.0);
        REQUIRE(std::get<std::string>(a.attributes.at("alert_type")) == "heartbeat");
        REQUIRE(a.attributes.contains("src_ip"));
        REQUIRE(a.attributes.contains("user"));
        REQUIRE(a.attributes.contains("host"));
    }
}

TEST_CASE("benign alerts avoid claimed values unless collisions are asked for",
          "[datagen]") {
    auto spec = quiet_spec();
    spec.templates[0].instances = 1;
    spec.noise_rate = 1.0;
    spec.duration = 200.0;
    spec.ip_pool = {"10.0.0.1", "10.0.0.2", "10.0.0.3", "10.0.0.4"};
    spec.user_pool = {"alice", "bob"};
    spec.host_pool = {"web01", "web02"};
    spec.collision_rate = 0.0;
    const auto clean = generate(spec);

    std::string claimed_ip;
    for (const auto& a : clean.alerts) {
        if (a.label != kBenignLabel) {
            claimed_ip = std::get<std::string>(a.attributes.at("src_ip"));
            break;
        }
    }
    REQUIRE_FALSE(claimed_ip.empty());
    for (const auto& a : clean.alerts) {
        if (a.label == kBenignLabel) {
            REQUIRE(std::get<std::string>(a.attributes.at("src_ip")) != claimed_ip);
        }
    }

    // with full collision rate every benign alert reuses the claimed ip
    spec.collision_rate = 1.0;
    const auto noisy = generate(spec);
    for (const auto& a : noisy.alerts) {
        if (a.label == kBenignLabel) {
            REQUIRE(std::get<std::string>(a.attributes.at("src_ip")) == claimed_ip);
        }
    }
}

TEST_CASE("spec validation covers the foot-guns", "[datagen]") {
    ScenarioSpec spec = quiet_spec();
    spec.templates[0].label = kBenignLabel;
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.templates[0].min_alerts = 3;
    spec.templates[0].max_alerts = 2;
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.templates[0].share.clear();
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.templates[0].min_gap = 5.0;
    spec.templates[0].max_gap = 1.0;
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.ip_pool.clear();  // the template shares ip but has no pool
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.noise_rate = 0.5;  // noise needs all three pools
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.collision_rate = 1.5;
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);

    spec = quiet_spec();
    spec.noise_rate = -1.0;
    REQUIRE_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("two distant instances separate by graph but merge by time", "[datagen]") {
    // Two interleaved attack runs on different IPs: the shared-property graph
    // splits them cleanly, while pure time-chaining with a wide delta fuses
    // everything that overlaps.
    ScenarioSpec spec;
    AttackTemplate tpl;
    tpl.label = "bruteforce";
    tpl.min_alerts = 4;
    tpl.max_alerts = 4;
    tpl.share = {PropertyType::ip};
    tpl.min_gap = 1.0;
    tpl.max_gap = 2.0;
    tpl.instances = 2;
    spec.templates.push_back(tpl);
    spec.duration = 4.0;  // both instances start inside a 4-second window
    spec.ip_pool = {"10.0.0.1", "10.0.0.2"};
    spec.seed = 2;
    const auto scenario = generate(spec);
    REQUIRE(scenario.alerts.size() == 8);

    const auto graph = build_graph(scenario.alerts, default_extraction(), tiny_schema());
    DeltaConfig deltas;
    deltas.delta[PropertyType::ip] = 10.0;
    deltas.delta[PropertyType::username] = 10.0;
    deltas.delta[PropertyType::hostname] = 10.0;
    deltas.delta[PropertyType::extensible] = 0.0;
    const auto by_graph = cut_groups(graph, deltas);
    REQUIRE(by_graph.size() == 2);
    for (const auto& g : by_graph) REQUIRE(g.size() == 4);

    const auto by_time = time_group(scenario.alerts, 10.0, tiny_schema());
    REQUIRE(by_time.size() == 1);  // every gap is under 10 seconds
    REQUIRE(by_time[0].size() == 8);
}
