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
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/gmn.hpp"

namespace alertgraph {

/// A historical alert group kept for future matching, with the incident
/// context an analyst needs when it matches again.
struct KnownGroup {
    AlertGroup group;
    std::string attack_step;  // non-empty class label this group exemplifies
    std::string incident_id;
    std::string notes;        // free text: CTI, phase, handling outcome
    double added_at = 0.0;

    bool operator==(const KnownGroup&) const = default;
};

/// In-memory store of known groups. Entries keep insertion order; the
/// (incident_id, group id) pair is unique.
class KnowledgeBase {
public:
    void add(KnownGroup entry) {
        if (entry.attack_step.empty()) {
            throw std::invalid_argument("kb_add: attack_step must be non-empty");
        }
        for (const auto& existing : entries_) {
            if (existing.incident_id == entry.incident_id &&
                existing.group.id == entry.group.id) {
                throw std::invalid_argument(
                    "kb_add: duplicate entry for incident '" + entry.incident_id +
                    "' group " + std::to_string(entry.group.id));
            }
        }
        entries_.push_back(std::move(entry));
    }

    const std::vector<KnownGroup>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool operator==(const KnowledgeBase&) const = default;

private:
    std::vector<KnownGroup> entries_;
};

/// One scored kb entry in a match ranking.
struct RankedMatch {
    std::size_t kb_index = 0;  // position in kb.entries()
    double score = 0.0;
    double distance() const { return -score; }
};

/// Outcome of matching one incoming group against the whole kb.
struct KbMatchResult {
    std::uint64_t incoming_id = 0;
    std::vector<RankedMatch> ranked;  // descending score; ties keep kb order
    bool novel = false;               // true iff best score < threshold
    double threshold = 0.0;
    /// Cross-graph attention of the best-scoring comparison
    /// (incoming -> kb entry and back), kept to explain the match.
    AttentionRecord top_attention;

    const RankedMatch& best() const {
        if (ranked.empty()) throw std::logic_error("match result has no entries");
        return ranked.front();
    }
};

/// Scores the incoming group against every kb entry, one by one, and ranks
/// the results. The kb is read-only here. Decision: novel iff even the best
/// score falls below the threshold.
inline KbMatchResult kb_match(const KnowledgeBase& kb, const AlertGroup& incoming,
                              const GmnParams& params, const GmnConfig& config,
                              double threshold) {
    if (kb.empty()) {
        throw std::invalid_argument("kb_match: knowledge base is empty");
    }
    KbMatchResult result;
    result.incoming_id = incoming.id;
    result.threshold = threshold;
    std::vector<AttentionRecord> attention;
    attention.reserve(kb.size());
    for (std::size_t i = 0; i < kb.size(); ++i) {
        auto fwd = forward_pair(incoming, kb.entries()[i].group, params, config);
        result.ranked.push_back(RankedMatch{i, fwd.score.score});
        attention.push_back(std::move(fwd.attention));
    }
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const RankedMatch& a, const RankedMatch& b) {
                         return a.score > b.score;
                     });
    result.novel = result.ranked.front().score < threshold;
    result.top_attention = std::move(attention[result.ranked.front().kb_index]);
    return result;
}

/// One cell of the evaluation cross table: a test group scored against a kb
/// entry. positive means both sides show the same attack step.
struct KbCrossRow {
    std::uint64_t test_group_id = 0;
    std::size_t kb_index = 0;
    std::string incident_id;
    std::string test_step;
    std::string kb_step;
    double score = 0.0;
    double distance() const { return -score; }
    bool positive = false;
};

struct ClassStats {
    std::size_t count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    double min = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
};

struct KbEvaluation {
    std::vector<KbCrossRow> rows;  // |test| x |kb|, test-major order
    ClassStats positive;           // score statistics per pair class
    ClassStats negative;
};

namespace detail {

/// Population statistics over scores; all-NaN when values is empty.
inline ClassStats class_stats(const std::vector<double>& values) {
    ClassStats s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

}  // namespace detail

/// Scores every (test group, kb entry) pair and summarises the score
/// distribution per pair class. A test group's step is its majority attack
/// label, so a benign-majority group pairs negatively with everything.
inline KbEvaluation kb_evaluate(const KnowledgeBase& kb,
                                const std::vector<AlertGroup>& test_groups,
                                const GmnParams& params, const GmnConfig& config) {
    KbEvaluation eval;
    std::vector<double> pos_scores;
    std::vector<double> neg_scores;
    for (const auto& test : test_groups) {
        const std::string test_step = test.majority_attack_label();
        for (std::size_t i = 0; i < kb.size(); ++i) {
            const auto& entry = kb.entries()[i];
            auto fwd = forward_pair(test, entry.group, params, config);
            KbCrossRow row;
            row.test_group_id = test.id;
            row.kb_index = i;
            row.incident_id = entry.incident_id;
            row.test_step = test_step;
            row.kb_step = entry.attack_step;
            row.score = fwd.score.score;
            row.positive = test.is_attack() && test_step == entry.attack_step;
            (row.positive ? pos_scores : neg_scores).push_back(row.score);
            eval.rows.push_back(std::move(row));
        }
    }
    eval.positive = detail::class_stats(pos_scores);
    eval.negative = detail::class_stats(neg_scores);
    return eval;
}

/// Midpoint between the two class mean scores on a labelled validation
/// split -- the default rule for the matched/novel threshold.
inline double calibrate_threshold(const KbEvaluation& eval) {
    if (eval.positive.count == 0 || eval.negative.count == 0) {
        throw std::invalid_argument(
            "calibrate_threshold: validation split must produce both same-step "
            "and different-step pairs");
    }
    return 0.5 * (eval.positive.mean + eval.negative.mean);
}

inline double calibrate_threshold(const KnowledgeBase& kb,
                                  const std::vector<AlertGroup>& validation,
                                  const GmnParams& params, const GmnConfig& config) {
    return calibrate_threshold(kb_evaluate(kb, validation, params, config));
}

/// Cross-table CSV: one row per (test group, kb entry) comparison.
inline std::string kb_cross_csv(const KbEvaluation& eval) {
    std::ostringstream out;
    out << "test_group,kb_index,incident_id,test_step,kb_step,score,distance,pair_class\n";
    for (const auto& row : eval.rows) {
        out << row.test_group_id << ',' << row.kb_index << ',' << row.incident_id << ','
            << row.test_step << ',' << row.kb_step << ',' << format_double(row.score)
            << ',' << format_double(row.distance()) << ','
            << (row.positive ? "positive" : "negative") << '\n';
    }
    return out.str();
}

/// Per-class score summary CSV (mean, std, min, max per pair class).
inline std::string kb_summary_csv(const KbEvaluation& eval) {
    std::ostringstream out;
    out << "pair_class,count,mean_score,std_score,min_score,max_score\n";
    auto write = [&out](const char* name, const ClassStats& s) {
        out << name << ',' << s.count << ',' << format_double(s.mean) << ','
            << format_double(s.stddev) << ',' << format_double(s.min) << ','
            << format_double(s.max) << '\n';
    };
    write("positive", eval.positive);
    write("negative", eval.negative);
    return out.str();
}

}  // namespace alertgraph
