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

#include <charconv>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace alertgraph {

/// Label carried by alerts that are false positives or benign activity.
inline constexpr const char* kBenignLabel = "benign";

/// Types of timeline-defining properties used to link alerts into
/// per-property timelines. `extensible` is a catch-all slot for deployments
/// that pivot on something beyond the three common kinds.
enum class PropertyType { ip, username, hostname, extensible };

inline const char* to_string(PropertyType t) {
    switch (t) {
        case PropertyType::ip: return "ip";
        case PropertyType::username: return "username";
        case PropertyType::hostname: return "hostname";
        case PropertyType::extensible: return "extensible";
    }
    return "?";
}

inline PropertyType property_type_from_string(const std::string& s) {
    if (s == "ip") return PropertyType::ip;
    if (s == "username") return PropertyType::username;
    if (s == "hostname") return PropertyType::hostname;
    if (s == "extensible") return PropertyType::extensible;
    throw std::invalid_argument("unknown property type: '" + s + "'");
}

/// A pivotable indicator value together with its type. Equality is on the
/// (value, type) pair: ("abc", hostname) and ("abc", username) are distinct.
struct TimelineProperty {
    std::string value;
    PropertyType ptype;

    auto operator<=>(const TimelineProperty&) const = default;
};

/// Attribute values are flat: a scalar string, a number, or a list of
/// strings. Nested input is flattened with dotted keys at ingestion.
using AttrValue = std::variant<std::string, double, std::vector<std::string>>;

/// Canonical shortest decimal form, round-trips exactly.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

/// String view(s) of an attribute value, for categorical encodings and
/// property extraction. Numbers are rendered in canonical decimal form.
inline std::vector<std::string> attr_as_strings(const AttrValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return {*s};
    if (const auto* d = std::get_if<double>(&v)) return {format_double(*d)};
    return std::get<std::vector<std::string>>(v);
}

/// Numeric view of an attribute value: a number, or a string that parses
/// fully as one. Lists and non-numeric strings have no numeric view.
inline std::optional<double> attr_as_number(const AttrValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* s = std::get_if<std::string>(&v)) {
        double out = 0;
        const char* begin = s->data();
        const char* end = begin + s->size();
        auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec == std::errc() && ptr == end && !s->empty()) return out;
        return std::nullopt;
    }
    return std::nullopt;
}

/// A single detector event. Ids are ordinals assigned at ingestion, strictly
/// increasing in stream order. An absent or "-" ground-truth label is
/// normalised to "benign".
struct Alert {
    std::uint64_t id = 0;
    double timestamp = 0.0;
    std::string detector;
    std::string label = kBenignLabel;
    std::map<std::string, AttrValue> attributes;

    bool is_benign() const { return label == kBenignLabel; }
};

inline std::string normalise_label(const std::optional<std::string>& raw) {
    if (!raw || raw->empty() || *raw == "-") return kBenignLabel;
    return *raw;
}

/// Where to read timeline-defining properties from, per property type, plus
/// a blacklist of values that must never create edges (shared proxies, NAT
/// addresses and similar tie systems together for no analytic reason).
struct ExtractionConfig {
    std::map<PropertyType, std::vector<std::string>> sources;
    std::set<TimelineProperty> blacklist;

    void validate() const {
        for (const auto& [ptype, keys] : sources) {
            if (keys.empty()) {
                throw std::invalid_argument(
                    std::string("extraction.sources.") + to_string(ptype) +
                    ": needs at least one attribute key");
            }
        }
    }
};

/// Extracts the alert's timeline-defining property set. Missing keys
/// contribute nothing; blacklisted values are dropped; the result may be
/// empty, in which case the alert stays an isolated node.
inline std::set<TimelineProperty> extract_properties(const Alert& alert,
                                                     const ExtractionConfig& cfg) {
    cfg.validate();
    std::set<TimelineProperty> out;
    for (const auto& [ptype, keys] : cfg.sources) {
        for (const auto& key : keys) {
            auto it = alert.attributes.find(key);
            if (it == alert.attributes.end()) continue;
            for (auto& value : attr_as_strings(it->second)) {
                if (value.empty()) continue;
                TimelineProperty prop{std::move(value), ptype};
                if (!cfg.blacklist.contains(prop)) out.insert(std::move(prop));
            }
        }
    }
    return out;
}

}  // namespace alertgraph
