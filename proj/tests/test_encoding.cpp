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

#include "alertgraph/io.hpp"
#include "helpers.hpp"

using namespace alertgraph;
using testing_support::make_alert;
using testing_support::tiny_schema;

TEST_CASE("feature widths follow kind and vocabulary", "[encoding]") {
    FeatureSpec one{FeatureKind::one_hot, "k", {"a", "b", "c"}, 1.0};
    FeatureSpec multi{FeatureKind::multi_label, "k", {"a", "b"}, 1.0};
    FeatureSpec num{FeatureKind::numeric, "k", {}, 1.0};
    REQUIRE(one.width() == 3);
    REQUIRE(multi.width() == 2);
    REQUIRE(num.width() == 1);

    EncodingSchema schema;
    schema.features = {one, multi, num};
    REQUIRE(schema.total_dim() == 6);
}

TEST_CASE("schema validation rejects broken specs", "[encoding]") {
    EncodingSchema empty_key;
    empty_key.features.push_back(FeatureSpec{FeatureKind::numeric, "", {}, 1.0});
    REQUIRE_THROWS_AS(empty_key.validate(), std::invalid_argument);

    EncodingSchema excluded;
    excluded.features.push_back(FeatureSpec{FeatureKind::numeric, "x", {}, 1.0});
    excluded.excluded_keys.insert("x");
    REQUIRE_THROWS_AS(excluded.validate(), std::invalid_argument);

    EncodingSchema no_vocab;
    no_vocab.features.push_back(FeatureSpec{FeatureKind::one_hot, "x", {}, 1.0});
    REQUIRE_THROWS_AS(no_vocab.validate(), std::invalid_argument);
}

TEST_CASE("one-hot features light exactly one slot", "[encoding]") {
    const auto schema = tiny_schema();
    const auto a = make_alert(0, 0.0, {{"detector", std::string("a")},
                                       {"magnitude", 2.0}});
    REQUIRE(vectorise(a, schema) == std::vector<double>{1.0, 0.0, 2.0});
    const auto b = make_alert(1, 0.0, {{"detector", std::string("b")},
                                       {"magnitude", 0.5}});
    REQUIRE(vectorise(b, schema) == std::vector<double>{0.0, 1.0, 0.5});
}

TEST_CASE("out-of-vocabulary and missing values encode as zeros", "[encoding]") {
    const auto schema = tiny_schema();
    const auto oov = make_alert(0, 0.0, {{"detector", std::string("zeek")}});
    REQUIRE(vectorise(oov, schema) == std::vector<double>{0.0, 0.0, 0.0});
    const auto missing = make_alert(1, 0.0, {});
    REQUIRE(vectorise(missing, schema) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("one-hot ignores list values instead of guessing one", "[encoding]") {
    const auto schema = tiny_schema();
    const auto a = make_alert(
        0, 0.0, {{"detector", std::vector<std::string>{"a", "b"}}});
    REQUIRE(vectorise(a, schema) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("multi-label features light every vocabulary hit", "[encoding]") {
    EncodingSchema schema;
    schema.features.push_back(
        FeatureSpec{FeatureKind::multi_label, "groups", {"auth", "web", "dns"}, 1.0});
    const auto a = make_alert(
        0, 0.0, {{"groups", std::vector<std::string>{"dns", "auth", "smtp"}}});
    REQUIRE(vectorise(a, schema) == std::vector<double>{1.0, 0.0, 1.0});
    const auto single = make_alert(1, 0.0, {{"groups", std::string("web")}});
    REQUIRE(vectorise(single, schema) == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("numeric features scale and reject non-numbers", "[encoding]") {
    EncodingSchema schema;
    schema.features.push_back(FeatureSpec{FeatureKind::numeric, "bytes", {}, 0.001});
    const auto a = make_alert(0, 0.0, {{"bytes", 1500.0}});
    REQUIRE(vectorise(a, schema) == std::vector<double>{1.5});
    const auto s = make_alert(1, 0.0, {{"bytes", std::string("250")}});
    REQUIRE(vectorise(s, schema) == std::vector<double>{0.25});
    const auto bad = make_alert(2, 0.0, {{"bytes", std::string("many")}});
    REQUIRE_THROWS_AS(vectorise(bad, schema), std::invalid_argument);
}

TEST_CASE("the shipped wide schema loads and spans 133 dimensions", "[encoding]") {
    const auto text = io::read_file(std::string(ALERTGRAPH_CONFIG_DIR) + "/ait_schema.json");
    const auto schema = io::schema_from_json(io::json::parse(text), "ait_schema.json");
    schema.validate();
    REQUIRE(schema.total_dim() == 133);
    REQUIRE(schema.excluded_keys.contains("src_ip"));
}

TEST_CASE("edge features flag ip and username causes", "[encoding]") {
    const std::set<TimelineProperty> ip_only{{"10.0.0.1", PropertyType::ip}};
    REQUIRE(encode_edge(ip_only) == std::array<double, 2>{1.0, 0.0});

    const std::set<TimelineProperty> user_only{{"alice", PropertyType::username}};
    REQUIRE(encode_edge(user_only) == std::array<double, 2>{0.0, 1.0});

    const std::set<TimelineProperty> both{{"10.0.0.1", PropertyType::ip},
                                          {"alice", PropertyType::username}};
    REQUIRE(encode_edge(both) == std::array<double, 2>{1.0, 1.0});

    const std::set<TimelineProperty> host_only{{"web01", PropertyType::hostname}};
    REQUIRE(encode_edge(host_only) == std::array<double, 2>{0.0, 0.0});

    REQUIRE_THROWS_AS(encode_edge({}), std::invalid_argument);
}
