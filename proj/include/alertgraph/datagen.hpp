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
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/alert.hpp"
#include "alertgraph/rng.hpp"

namespace alertgraph {

/// One attack step to inject. Every instance of the template emits a run of
/// alerts that all carry the same value for each property type in `share`,
/// with inter-alert gaps drawn uniformly from [min_gap, max_gap].
struct AttackTemplate {
    std::string label;                 // attack-step label, never the benign label
    std::size_t min_alerts = 1;        // alerts per instance, inclusive range
    std::size_t max_alerts = 1;
    std::vector<PropertyType> share;   // property types shared within an instance
    double min_gap = 0.0;              // seconds between consecutive alerts
    double max_gap = 1.0;
    std::size_t instances = 1;         // independent occurrences to inject
    std::string detector;              // empty -> label is used as detector
    /// Extra attributes stamped on every alert of the template; these are
    /// what downstream feature encodings see.
    std::map<std::string, AttrValue> signature;

    void validate() const {
        if (label.empty() || label == kBenignLabel) {
            throw std::invalid_argument("scenario: template label must be a non-empty "
                                        "attack label");
        }
        if (min_alerts < 1 || max_alerts < min_alerts) {
            throw std::invalid_argument("scenario: template '" + label +
                                        "' needs 1 <= min_alerts <= max_alerts");
        }
        if (share.empty()) {
            throw std::invalid_argument("scenario: template '" + label +
                                        "' must share at least one property type");
        }
        if (min_gap < 0 || max_gap < min_gap) {
            throw std::invalid_argument("scenario: template '" + label +
                                        "' needs 0 <= min_gap <= max_gap");
        }
        if (instances < 1) {
            throw std::invalid_argument("scenario: template '" + label +
                                        "' needs instances >= 1");
        }
    }
};

/// A full synthetic scenario: attack templates embedded in Poisson benign
/// noise, all drawing property values from shared pools.
struct ScenarioSpec {
    std::vector<AttackTemplate> templates;
    double noise_rate = 0.0;       // benign alerts per second
    double duration = 60.0;        // seconds covered by the stream
    std::vector<std::string> ip_pool;
    std::vector<std::string> user_pool;
    std::vector<std::string> host_pool;
    /// Probability that a benign alert reuses a property value already
    /// claimed by an attack instance (per property type it carries).
    double collision_rate = 0.0;
    std::string benign_detector = "noise";
    std::map<std::string, AttrValue> benign_signature;
    std::uint64_t seed = 0;

    void validate() const {
        for (const auto& t : templates) t.validate();
        if (noise_rate < 0) throw std::invalid_argument("scenario: noise_rate must be >= 0");
        if (duration < 0) throw std::invalid_argument("scenario: duration must be >= 0");
        if (collision_rate < 0 || collision_rate > 1) {
            throw std::invalid_argument("scenario: collision_rate must be in [0, 1]");
        }
        std::set<PropertyType> needed;
        for (const auto& t : templates) needed.insert(t.share.begin(), t.share.end());
        if (noise_rate > 0) {
            needed.insert({PropertyType::ip, PropertyType::username, PropertyType::hostname});
        }
        for (auto ptype : needed) {
            if (pool(ptype).empty()) {
                throw std::invalid_argument(
                    std::string("scenario: empty property pool for type '") +
                    to_string(ptype) + "'");
            }
        }
    }

    const std::vector<std::string>& pool(PropertyType ptype) const {
        switch (ptype) {
            case PropertyType::ip: return ip_pool;
            case PropertyType::username: return user_pool;
            default: return host_pool;  // hostname and extensible share a pool
        }
    }
};

/// Ground truth for one injected attack instance.
struct TruthInstance {
    std::string label;
    std::size_t instance = 0;               // index among the template's instances
    std::vector<std::uint64_t> alert_ids;   // chronological

    bool operator==(const TruthInstance&) const = default;
};

struct Scenario {
    std::vector<Alert> alerts;          // chronological, ids 0..n-1
    std::vector<TruthInstance> truth;   // template order, then instance order
};

namespace detail {

/// Attribute key a generated property value is stored under; the matching
/// extraction config maps these back to property types.
inline const char* property_key(PropertyType ptype) {
    switch (ptype) {
        case PropertyType::ip: return "src_ip";
        case PropertyType::username: return "user";
        default: return "host";
    }
}

/// Hands out pool values for attack instances round-robin, so instances get
/// distinct values as long as the pool is large enough.
class PoolAllocator {
public:
    explicit PoolAllocator(const ScenarioSpec& spec) : spec_(spec) {}

    std::string claim(PropertyType ptype) {
        const auto& pool = spec_.pool(ptype);
        const std::string value = pool[next_[ptype] % pool.size()];
        ++next_[ptype];
        claimed_[ptype].push_back(value);
        return value;
    }

    /// A value for a benign alert: with probability collision_rate an
    /// attack-claimed value, otherwise an unclaimed one (pool order), so
    /// collisions happen only at the configured rate.
    std::string benign_value(PropertyType ptype, Rng& rng) {
        const auto& pool = spec_.pool(ptype);
        const auto& claimed = claimed_[ptype];
        if (!claimed.empty() && rng.uniform() < spec_.collision_rate) {
            return claimed[rng.uniform_int(claimed.size())];
        }
        const std::size_t used = std::min(next_[ptype], pool.size());
        if (used < pool.size()) {
            return pool[used + rng.uniform_int(pool.size() - used)];
        }
        return pool[rng.uniform_int(pool.size())];
    }

private:
    const ScenarioSpec& spec_;
    std::map<PropertyType, std::size_t> next_;
    std::map<PropertyType, std::vector<std::string>> claimed_;
};

struct PendingAlert {
    double ts = 0.0;
    std::string detector;
    std::string label;
    std::map<std::string, AttrValue> attributes;
    std::size_t truth_index = SIZE_MAX;  // SIZE_MAX marks benign
    std::size_t order = 0;               // creation order, breaks ts ties
};

}  // namespace detail

/// Generates the scenario's alert stream and ground truth. Deterministic
/// for a given spec; alerts come out chronological with ids 0..n-1.
inline Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    Rng root(spec.seed);
    Rng attack_rng = root.sub("attacks");
    Rng noise_rng = root.sub("noise");

    detail::PoolAllocator pools(spec);
    std::vector<detail::PendingAlert> pending;
    Scenario out;

    // attack instances first: property values are claimed in template order
    for (const auto& tpl : spec.templates) {
        for (std::size_t inst = 0; inst < tpl.instances; ++inst) {
            const std::size_t truth_index = out.truth.size();
            out.truth.push_back(TruthInstance{tpl.label, inst, {}});

            std::map<std::string, AttrValue> shared_attrs;
            for (auto ptype : tpl.share) {
                shared_attrs[detail::property_key(ptype)] = pools.claim(ptype);
            }
            const std::size_t count =
                tpl.min_alerts +
                attack_rng.uniform_int(tpl.max_alerts - tpl.min_alerts + 1);
            double ts = attack_rng.uniform(0.0, spec.duration);
            for (std::size_t a = 0; a < count; ++a) {
                detail::PendingAlert alert;
                alert.ts = ts;
                alert.detector = tpl.detector.empty() ? tpl.label : tpl.detector;
                alert.label = tpl.label;
                alert.attributes = shared_attrs;
                for (const auto& [key, value] : tpl.signature) {
                    alert.attributes[key] = value;
                }
                // keep the detector visible to attribute-driven encodings
                alert.attributes.try_emplace("detector", alert.detector);
                alert.truth_index = truth_index;
                alert.order = pending.size();
                pending.push_back(std::move(alert));
                ts += attack_rng.uniform(tpl.min_gap, tpl.max_gap);
            }
        }
    }

    // benign noise: Poisson arrivals across the duration
    if (spec.noise_rate > 0 && spec.duration > 0) {
        double ts = noise_rng.exponential(spec.noise_rate);
        while (ts <= spec.duration) {
            detail::PendingAlert alert;
            alert.ts = ts;
            alert.detector = spec.benign_detector;
            alert.label = kBenignLabel;
            for (auto ptype :
                 {PropertyType::ip, PropertyType::username, PropertyType::hostname}) {
                alert.attributes[detail::property_key(ptype)] =
                    pools.benign_value(ptype, noise_rng);
            }
            for (const auto& [key, value] : spec.benign_signature) {
                alert.attributes[key] = value;
            }
            alert.attributes.try_emplace("detector", alert.detector);
            alert.order = pending.size();
            pending.push_back(std::move(alert));
            ts += noise_rng.exponential(spec.noise_rate);
        }
    }

    std::sort(pending.begin(), pending.end(),
              [](const detail::PendingAlert& a, const detail::PendingAlert& b) {
                  return a.ts != b.ts ? a.ts < b.ts : a.order < b.order;
              });

    out.alerts.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
        auto& p = pending[i];
        if (p.truth_index != SIZE_MAX) {
            out.truth[p.truth_index].alert_ids.push_back(i);
        }
        out.alerts.push_back(Alert{static_cast<std::uint64_t>(i), p.ts,
                                   std::move(p.detector), std::move(p.label),
                                   std::move(p.attributes)});
    }
    return out;
}

}  // namespace alertgraph
