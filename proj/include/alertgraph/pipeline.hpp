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
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/baseline.hpp"
#include "alertgraph/datagen.hpp"
#include "alertgraph/evaluation.hpp"
#include "alertgraph/gmn_train.hpp"
#include "alertgraph/io.hpp"
#include "alertgraph/knowledge_base.hpp"

namespace alertgraph {

/// Raised when matching is asked for against an empty knowledge base: the
/// caller reports "no knowledge", which is not the same verdict as "novel".
struct NoKnowledgeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One config document drives a whole run. Paths are resolved relative to
/// the process working directory; outputs land under output_dir with fixed
/// file names so reruns are byte-comparable.
struct RunConfig {
    std::filesystem::path alerts_path;     // input alert stream
    std::filesystem::path scenario_path;   // synthetic scenario spec (gen)
    std::filesystem::path groups_path;     // groups consumed by train/match
    std::filesystem::path kb_data_path;
    std::filesystem::path kb_index_path;
    std::filesystem::path checkpoint_path;
    std::filesystem::path output_dir = ".";

    ExtractionConfig extraction;
    EncodingSchema schema;
    DeltaConfig deltas;

    double baseline_delta = 0.0;                 // time-based grouping cut-off
    std::set<std::string> excluded_labels;       // extra evaluation setting
    Aggregation aggregation = Aggregation::mean;

    GmnConfig model;
    double threshold = 0.0;        // matched/novel decision line
    double train_split = 0.8;      // fraction of groups used for training
    double negative_ratio = 1.0;   // sampled negatives per positive pair
    std::uint64_t seed = 0;

    std::filesystem::path out(const std::string& name) const { return output_dir / name; }
};

inline RunConfig run_config_from_json(const io::json& j, const std::string& where) {
    RunConfig cfg;
    if (auto it = j.find("paths"); it != j.end()) {
        const auto& p = *it;
        cfg.alerts_path = io::detail::get_or<std::string>(p, "alerts", "");
        cfg.scenario_path = io::detail::get_or<std::string>(p, "scenario", "");
        cfg.groups_path = io::detail::get_or<std::string>(p, "groups", "");
        cfg.kb_data_path = io::detail::get_or<std::string>(p, "kb_data", "");
        cfg.kb_index_path = io::detail::get_or<std::string>(p, "kb_index", "");
        cfg.checkpoint_path = io::detail::get_or<std::string>(p, "checkpoint", "");
        cfg.output_dir = io::detail::get_or<std::string>(p, "output_dir", ".");
    }
    if (auto it = j.find("extraction"); it != j.end()) {
        cfg.extraction = io::extraction_from_json(*it, where + ".extraction");
    }
    if (auto it = j.find("encoding"); it != j.end()) {
        cfg.schema = io::schema_from_json(*it, where + ".encoding");
    }
    if (auto it = j.find("deltas"); it != j.end()) {
        cfg.deltas = io::deltas_from_json(*it, where + ".deltas");
    }
    cfg.baseline_delta = io::detail::get_or<double>(j, "baseline_delta", 0.0);
    if (auto it = j.find("excluded_labels"); it != j.end()) {
        for (const auto& l : io::detail::string_list(*it, where + ".excluded_labels")) {
            cfg.excluded_labels.insert(l);
        }
    }
    const auto agg = io::detail::get_or<std::string>(j, "aggregation", "mean");
    if (agg == "mean") {
        cfg.aggregation = Aggregation::mean;
    } else if (agg == "sum") {
        cfg.aggregation = Aggregation::sum;
    } else {
        throw std::runtime_error(where + ": aggregation must be 'mean' or 'sum'");
    }
    if (auto it = j.find("model"); it != j.end()) {
        cfg.model = io::gmn_config_from_json(*it, where + ".model");
    }
    cfg.threshold = io::detail::get_or<double>(j, "threshold", 0.0);
    cfg.train_split = io::detail::get_or<double>(j, "train_split", 0.8);
    cfg.negative_ratio = io::detail::get_or<double>(j, "negative_ratio", 1.0);
    cfg.seed = io::detail::get_or<std::uint64_t>(j, "seed", 0);
    if (cfg.train_split <= 0 || cfg.train_split >= 1) {
        throw std::runtime_error(where + ": train_split must be in (0, 1)");
    }
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    io::json j;
    try {
        j = io::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return run_config_from_json(j, path.string());
}

// ---------------------------------------------------------------------------
// commands

/// gen: synthesise the scenario's alert stream plus ground truth.
inline std::string run_gen(const RunConfig& cfg) {
    if (cfg.scenario_path.empty()) {
        throw std::runtime_error("gen: config key paths.scenario is required");
    }
    const ScenarioSpec spec = io::load_scenario(cfg.scenario_path);
    const Scenario scenario = generate(spec);
    io::save_alerts(cfg.out("alerts.jsonl"), scenario.alerts);
    io::save_truth(cfg.out("truth.jsonl"), scenario.truth);

    std::size_t attack_alerts = 0;
    for (const auto& t : scenario.truth) attack_alerts += t.alert_ids.size();
    std::ostringstream s;
    s << "generated " << scenario.alerts.size() << " alerts (" << attack_alerts
      << " attack across " << scenario.truth.size() << " instances, "
      << (scenario.alerts.size() - attack_alerts) << " benign)\n"
      << "wrote " << cfg.out("alerts.jsonl").string() << "\n"
      << "wrote " << cfg.out("truth.jsonl").string() << "\n";
    return s.str();
}

/// ingest: validate and normalise an alert stream, summarise label and
/// detector distributions.
inline std::string run_ingest(const RunConfig& cfg) {
    if (cfg.alerts_path.empty()) {
        throw std::runtime_error("ingest: config key paths.alerts is required");
    }
    const auto alerts = io::load_alerts(cfg.alerts_path);
    io::save_alerts(cfg.out("alerts_normalised.jsonl"), alerts);

    std::map<std::string, std::size_t> per_label;
    std::map<std::string, std::size_t> per_detector;
    for (const auto& a : alerts) {
        ++per_label[a.label];
        ++per_detector[a.detector];
    }
    std::ostringstream csv;
    csv << "dimension,value,count\n";
    for (const auto& [label, n] : per_label) csv << "label," << label << ',' << n << '\n';
    for (const auto& [det, n] : per_detector) csv << "detector," << det << ',' << n << '\n';
    io::write_file(cfg.out("ingest_summary.csv"), csv.str());

    std::ostringstream s;
    s << "ingested " << alerts.size() << " alerts, " << per_label.size() << " labels, "
      << per_detector.size() << " detectors\n"
      << "wrote " << cfg.out("alerts_normalised.jsonl").string() << "\n"
      << "wrote " << cfg.out("ingest_summary.csv").string() << "\n";
    return s.str();
}

/// group: build the alert graph, cut it with the configured deltas, run the
/// time-based baseline, and score both against each other.
inline std::string run_group(const RunConfig& cfg) {
    if (cfg.alerts_path.empty()) {
        throw std::runtime_error("group: config key paths.alerts is required");
    }
    const auto alerts = io::load_alerts(cfg.alerts_path);
    const AlertGraph graph = build_graph(alerts, cfg.extraction, cfg.schema);
    // fail fast if any property type present in the data has no delta
    for (const auto& [key, edge] : graph.edges()) {
        (void)cfg.deltas.admits(edge);
    }
    const auto graph_groups = cut_groups(graph, cfg.deltas);
    const auto time_groups = time_group(alerts, cfg.baseline_delta, cfg.schema);
    io::save_groups(cfg.out("groups_graph.jsonl"), graph_groups);
    io::save_groups(cfg.out("groups_time.jsonl"), time_groups);

    EvalOptions opts{cfg.excluded_labels, cfg.aggregation};
    const auto report = evaluate_grouping(graph_groups, time_groups, opts);
    io::write_file(cfg.out("grouping_report.csv"), to_csv(report));

    std::ostringstream s;
    s << "graph: " << graph.node_count() << " nodes, " << graph.edge_count() << " edges\n"
      << "graph-based groups: " << graph_groups.size()
      << ", time-based groups: " << time_groups.size() << "\n"
      << "wrote " << cfg.out("groups_graph.jsonl").string() << "\n"
      << "wrote " << cfg.out("groups_time.jsonl").string() << "\n"
      << "wrote " << cfg.out("grouping_report.csv").string() << "\n";
    return s.str();
}

/// eval: re-score previously written group files.
inline std::string run_eval(const RunConfig& cfg) {
    const auto graph_groups = io::load_groups(cfg.out("groups_graph.jsonl"));
    const auto time_groups = io::load_groups(cfg.out("groups_time.jsonl"));
    EvalOptions opts{cfg.excluded_labels, cfg.aggregation};
    const auto report = evaluate_grouping(graph_groups, time_groups, opts);
    io::write_file(cfg.out("grouping_report.csv"), to_csv(report));
    std::ostringstream s;
    s << "evaluated " << graph_groups.size() << " graph-based and " << time_groups.size()
      << " time-based groups\n"
      << "wrote " << cfg.out("grouping_report.csv").string() << "\n";
    return s.str();
}

namespace detail {

/// Attack groups split per class so both sides of the split keep every
/// class that has at least two groups.
struct GroupSplit {
    std::vector<AlertGroup> train;
    std::vector<AlertGroup> holdout;
};

inline GroupSplit split_groups(const std::vector<AlertGroup>& groups, double train_split,
                               Rng& rng) {
    std::map<std::string, std::vector<const AlertGroup*>> per_step;
    for (const auto& g : groups) per_step[g.majority_attack_label()].push_back(&g);
    GroupSplit out;
    for (auto& [step, members] : per_step) {
        rng.shuffle(members);
        std::size_t n_train = static_cast<std::size_t>(
            static_cast<double>(members.size()) * train_split);
        n_train = std::clamp<std::size_t>(n_train, 1,
                                          members.size() > 1 ? members.size() - 1
                                                             : members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            (i < n_train ? out.train : out.holdout).push_back(*members[i]);
        }
    }
    return out;
}

}  // namespace detail

/// train: select attack groups (optionally only around a target step),
/// split them, build labelled pairs, train the model, and write the
/// checkpoint plus loss history and the held-out groups.
inline std::string run_train(const RunConfig& cfg, const std::string& target_step = "") {
    const auto groups_path =
        cfg.groups_path.empty() ? cfg.out("groups_graph.jsonl") : cfg.groups_path;
    const auto all_groups = io::load_groups(groups_path);

    std::vector<AlertGroup> attack;
    std::size_t target_count = 0;
    for (const auto& g : all_groups) {
        if (!g.is_attack()) continue;
        attack.push_back(g);
        if (g.majority_attack_label() == target_step) ++target_count;
    }
    if (!target_step.empty() && target_count < 2) {
        throw std::runtime_error("train: need at least 2 groups with step '" + target_step +
                                 "', found " + std::to_string(target_count));
    }
    if (attack.size() < 2) {
        throw std::runtime_error("train: need at least 2 attack groups, found " +
                                 std::to_string(attack.size()));
    }

    Rng root(cfg.seed);
    Rng split_rng = root.sub("split");
    auto split = detail::split_groups(attack, cfg.train_split, split_rng);

    GmnConfig model = cfg.model;
    model.seed = cfg.seed;
    Rng pair_rng = root.sub("pair-sampling");
    std::vector<PairExample> pairs;
    if (!target_step.empty()) {
        pairs = pairs_from_labels(split.train, target_step, split.train,
                                  cfg.negative_ratio, pair_rng);
    } else {
        // no single target: build each step's pair set and pool them
        std::map<std::string, std::size_t> steps;
        for (const auto& g : split.train) ++steps[g.majority_attack_label()];
        for (const auto& [step, n] : steps) {
            if (n < 2) continue;
            auto step_pairs = pairs_from_labels(split.train, step, split.train,
                                                cfg.negative_ratio, pair_rng);
            pairs.insert(pairs.end(), step_pairs.begin(), step_pairs.end());
        }
        if (pairs.empty()) {
            throw std::runtime_error("train: no attack step has 2 or more groups");
        }
    }
    const auto trained = train(pairs, model);

    const auto checkpoint_path =
        cfg.checkpoint_path.empty() ? cfg.out("model.json") : cfg.checkpoint_path;
    io::save_checkpoint(checkpoint_path, trained.params, model);
    io::write_file(cfg.out("loss.csv"), io::loss_csv(trained.loss_history));
    io::save_groups(cfg.out("holdout_groups.jsonl"), split.holdout);

    std::ostringstream s;
    s << "trained on " << split.train.size() << " groups (" << pairs.size()
      << " pairs), holding out " << split.holdout.size() << " groups\n"
      << "final mean loss " << format_double(trained.loss_history.back()) << "\n"
      << "wrote " << checkpoint_path.string() << "\n"
      << "wrote " << cfg.out("loss.csv").string() << "\n"
      << "wrote " << cfg.out("holdout_groups.jsonl").string() << "\n";
    return s.str();
}

namespace detail {

/// Strongest cross-attention pairs of the top match, for the reports.
inline io::json explanation_json(const KbMatchResult& match, const AlertGroup& incoming,
                                 const AlertGroup& matched, std::size_t top_k = 3) {
    const Matrix& a = match.top_attention.a_g1_to_g2;
    std::vector<std::tuple<double, std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            cells.emplace_back(a.at(i, j), i, j);
        }
    }
    std::sort(cells.begin(), cells.end(),
              [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    io::json out = io::json::array();
    for (std::size_t k = 0; k < std::min(top_k, cells.size()); ++k) {
        const auto& [weight, i, j] = cells[k];
        out.push_back(io::json{{"incoming_node", incoming.nodes[i].id},
                               {"kb_node", matched.nodes[j].id},
                               {"attention", weight}});
    }
    return out;
}

}  // namespace detail

/// match: score every incoming group against the knowledge base and decide
/// matched vs novel. Also writes the full cross table against the labelled
/// incoming groups plus its per-class summary.
inline std::string run_match(const RunConfig& cfg) {
    if (cfg.kb_data_path.empty() || cfg.kb_index_path.empty()) {
        throw std::runtime_error("match: config keys paths.kb_data and paths.kb_index "
                                 "are required");
    }
    const auto checkpoint_path =
        cfg.checkpoint_path.empty() ? cfg.out("model.json") : cfg.checkpoint_path;
    auto [params, model] = io::load_checkpoint(checkpoint_path);
    const auto groups_path =
        cfg.groups_path.empty() ? cfg.out("holdout_groups.jsonl") : cfg.groups_path;
    const auto incoming = io::load_groups(groups_path);
    const KnowledgeBase kb = io::load_kb(cfg.kb_data_path, cfg.kb_index_path);
    if (kb.empty()) {
        throw NoKnowledgeError("match: the knowledge base holds no groups");
    }

    std::string report;
    std::size_t novel_count = 0;
    for (const auto& group : incoming) {
        const auto match = kb_match(kb, group, params, model, cfg.threshold);
        novel_count += match.novel ? 1 : 0;
        const auto& best_entry = kb.entries()[match.best().kb_index];
        io::json ranked = io::json::array();
        for (const auto& r : match.ranked) {
            ranked.push_back(io::json{{"kb_index", r.kb_index},
                                      {"incident_id", kb.entries()[r.kb_index].incident_id},
                                      {"attack_step", kb.entries()[r.kb_index].attack_step},
                                      {"score", r.score},
                                      {"distance", r.distance()}});
        }
        io::json j;
        j["incoming_group"] = match.incoming_id;
        j["decision"] = match.novel ? "novel" : "matched";
        j["threshold"] = match.threshold;
        j["best_incident"] = best_entry.incident_id;
        j["best_step"] = best_entry.attack_step;
        j["best_notes"] = best_entry.notes;
        j["ranked"] = std::move(ranked);
        j["explanation"] = detail::explanation_json(match, group, best_entry.group);
        report += j.dump();
        report += '\n';
    }
    io::write_file(cfg.out("match_report.jsonl"), report);

    const auto eval = kb_evaluate(kb, incoming, params, model);
    io::write_file(cfg.out("match_cross.csv"), kb_cross_csv(eval));
    io::write_file(cfg.out("match_summary.csv"), kb_summary_csv(eval));

    std::ostringstream s;
    s << "matched " << incoming.size() << " incoming groups against " << kb.size()
      << " known groups: " << (incoming.size() - novel_count) << " matched, "
      << novel_count << " novel (threshold " << format_double(cfg.threshold) << ")\n"
      << "wrote " << cfg.out("match_report.jsonl").string() << "\n"
      << "wrote " << cfg.out("match_cross.csv").string() << "\n"
      << "wrote " << cfg.out("match_summary.csv").string() << "\n";
    return s.str();
}

/// calibrate-threshold: midpoint of the class mean scores on a labelled
/// validation split.
inline std::string run_calibrate(const RunConfig& cfg) {
    if (cfg.kb_data_path.empty() || cfg.kb_index_path.empty()) {
        throw std::runtime_error("calibrate-threshold: config keys paths.kb_data and "
                                 "paths.kb_index are required");
    }
    const auto checkpoint_path =
        cfg.checkpoint_path.empty() ? cfg.out("model.json") : cfg.checkpoint_path;
    auto [params, model] = io::load_checkpoint(checkpoint_path);
    const auto groups_path =
        cfg.groups_path.empty() ? cfg.out("holdout_groups.jsonl") : cfg.groups_path;
    const auto validation = io::load_groups(groups_path);
    const KnowledgeBase kb = io::load_kb(cfg.kb_data_path, cfg.kb_index_path);
    if (kb.empty()) {
        throw NoKnowledgeError("calibrate-threshold: the knowledge base holds no groups");
    }
    const auto eval = kb_evaluate(kb, validation, params, model);
    const double threshold = calibrate_threshold(eval);
    io::json j{{"threshold", threshold},
               {"positive_mean", eval.positive.mean},
               {"negative_mean", eval.negative.mean}};
    io::write_file(cfg.out("threshold.json"), j.dump(2) + "\n");
    std::ostringstream s;
    s << "calibrated threshold " << format_double(threshold) << " (positive mean "
      << format_double(eval.positive.mean) << ", negative mean "
      << format_double(eval.negative.mean) << ")\n"
      << "wrote " << cfg.out("threshold.json").string() << "\n";
    return s.str();
}

}  // namespace alertgraph
