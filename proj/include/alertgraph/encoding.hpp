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
#include <array>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/alert.hpp"

namespace alertgraph {

enum class FeatureKind { one_hot, multi_label, numeric };

inline const char* to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::one_hot: return "one_hot";
        case FeatureKind::multi_label: return "multi_label";
        case FeatureKind::numeric: return "numeric";
    }
    return "?";
}

inline FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "one_hot") return FeatureKind::one_hot;
    if (s == "multi_label") return FeatureKind::multi_label;
    if (s == "numeric") return FeatureKind::numeric;
    throw std::invalid_argument("unknown feature kind: '" + s + "'");
}

/// One block of the node vector: a categorical one-hot, a multi-label set
/// over a vocabulary, or a scaled numeric value.
struct FeatureSpec {
    FeatureKind kind = FeatureKind::one_hot;
    std::string key;
    std::vector<std::string> vocabulary;  // one_hot / multi_label
    double scale = 1.0;                   // numeric

    std::size_t width() const {
        return kind == FeatureKind::numeric ? 1 : vocabulary.size();
    }
};

/// The fixed alert-to-vector layout. Out-of-vocabulary categorical values
/// encode as an all-zero block; alert streams are open-vocabulary.
struct EncodingSchema {
    std::vector<FeatureSpec> features;
    std::set<std::string> excluded_keys;

    std::size_t total_dim() const {
        std::size_t n = 0;
        for (const auto& f : features) n += f.width();
        return n;
    }

    void validate() const {
        for (const auto& f : features) {
            if (f.key.empty()) {
                throw std::invalid_argument("encoding: feature with empty key");
            }
            if (excluded_keys.contains(f.key)) {
                throw std::invalid_argument("encoding: key '" + f.key +
                                            "' is excluded but has a feature spec");
            }
            if (f.kind != FeatureKind::numeric && f.vocabulary.empty()) {
                throw std::invalid_argument("encoding: feature '" + f.key +
                                            "' has an empty vocabulary");
            }
        }
    }
};

/// Encodes an alert into the schema's fixed-size vector. Deterministic;
/// throws if a numeric feature key holds a non-numeric value.
inline std::vector<double> vectorise(const Alert& alert, const EncodingSchema& schema) {
    schema.validate();
    std::vector<double> out(schema.total_dim(), 0.0);
    std::size_t offset = 0;
    for (const auto& f : schema.features) {
        auto it = alert.attributes.find(f.key);
        switch (f.kind) {
            case FeatureKind::one_hot: {
                if (it != alert.attributes.end() &&
                    !std::holds_alternative<std::vector<std::string>>(it->second)) {
                    const auto value = attr_as_strings(it->second).front();
                    auto pos = std::find(f.vocabulary.begin(), f.vocabulary.end(), value);
                    if (pos != f.vocabulary.end()) {
                        out[offset + static_cast<std::size_t>(pos - f.vocabulary.begin())] = 1.0;
                    }
                }
                break;
            }
            case FeatureKind::multi_label: {
                if (it != alert.attributes.end()) {
                    for (const auto& value : attr_as_strings(it->second)) {
                        auto pos = std::find(f.vocabulary.begin(), f.vocabulary.end(), value);
                        if (pos != f.vocabulary.end()) {
                            out[offset + static_cast<std::size_t>(pos - f.vocabulary.begin())] = 1.0;
                        }
                    }
                }
                break;
            }
            case FeatureKind::numeric: {
                if (it != alert.attributes.end()) {
                    auto num = attr_as_number(it->second);
                    if (!num) {
                        throw std::invalid_argument(
                            "alert " + std::to_string(alert.id) + ": attribute '" + f.key +
                            "' is not numeric but the schema encodes it as numeric");
                    }
                    out[offset] = *num * f.scale;
                }
                break;
            }
        }
        offset += f.width();
    }
    return out;
}

/// Two-component edge feature: [any IP match, any username match]. Edges
/// caused only by other property types encode as zeros; the deployments this
/// mirrors pivot on IP and username.
inline std::array<double, 2> encode_edge(const std::set<TimelineProperty>& shared) {
    if (shared.empty()) {
        throw std::invalid_argument("encode_edge: an edge needs at least one shared property");
    }
    std::array<double, 2> f{0.0, 0.0};
    for (const auto& p : shared) {
        if (p.ptype == PropertyType::ip) f[0] = 1.0;
        if (p.ptype == PropertyType::username) f[1] = 1.0;
    }
    return f;
}

}  // namespace alertgraph
