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
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "alertgraph/pipeline.hpp"

namespace {

// exit codes: 0 ok, 1 contract violation or bad input, 2 usage error (from
// the parser), 3 matching asked with an empty knowledge base
constexpr int kExitError = 1;
constexpr int kExitNoKnowledge = 3;

/// Output-directory precedence: --out flag > ALERTGRAPH_OUT_DIR > config.
void resolve_output_dir(alertgraph::RunConfig& cfg, const std::string& out_flag) {
    if (!out_flag.empty()) {
        cfg.output_dir = out_flag;
        return;
    }
    if (const char* env = std::getenv("ALERTGRAPH_OUT_DIR"); env && *env) {
        cfg.output_dir = env;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alert grouping and knowledge-base matching engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    app.add_option("-c,--config", config_path, "run configuration file (JSON)")
        ->envname("ALERTGRAPH_CONFIG");
    app.add_option("-o,--out", out_dir, "output directory (overrides config)");

    // per-command overrides; only applied when the flag was actually given
    std::string alerts_path, scenario_path, groups_path, checkpoint_path;
    std::string kb_data_path, kb_index_path, target_step;
    double threshold = 0.0, baseline_delta = 0.0;
    std::uint64_t seed = 0;
    std::size_t epochs = 0;

    auto* cmd_gen = app.add_subcommand("gen", "synthesise a scenario's alert stream");
    auto* gen_scenario = cmd_gen->add_option("--scenario", scenario_path, "scenario spec");
    auto* gen_seed = cmd_gen->add_option("--seed", seed, "override the scenario seed");

    auto* cmd_ingest = app.add_subcommand("ingest", "validate and normalise alerts");
    auto* ingest_alerts = cmd_ingest->add_option("--alerts", alerts_path, "alert stream");

    auto* cmd_group = app.add_subcommand("group", "build the graph and cut groups");
    auto* group_alerts = cmd_group->add_option("--alerts", alerts_path, "alert stream");
    auto* group_delta =
        cmd_group->add_option("--baseline-delta", baseline_delta, "time-based cut-off");

    auto* cmd_eval = app.add_subcommand("eval", "re-score written group files");

    auto* cmd_train = app.add_subcommand("train", "train the matching model");
    cmd_train->add_option("--target", target_step, "attack step the model is for");
    auto* train_groups = cmd_train->add_option("--groups", groups_path, "groups file");
    auto* train_ckpt =
        cmd_train->add_option("--checkpoint", checkpoint_path, "checkpoint to write");
    auto* train_epochs = cmd_train->add_option("--epochs", epochs, "training epochs");
    auto* train_seed = cmd_train->add_option("--seed", seed, "run seed");

    auto* cmd_match = app.add_subcommand("match", "match groups against the kb");
    auto* match_groups = cmd_match->add_option("--groups", groups_path, "incoming groups");
    auto* match_ckpt =
        cmd_match->add_option("--checkpoint", checkpoint_path, "trained checkpoint");
    auto* match_thresh = cmd_match->add_option("--threshold", threshold, "decision line");
    auto* match_kb_data = cmd_match->add_option("--kb-data", kb_data_path, "kb data file");
    auto* match_kb_index =
        cmd_match->add_option("--kb-index", kb_index_path, "kb index file");

    auto* cmd_cal =
        app.add_subcommand("calibrate-threshold", "pick the matched/novel decision line");
    auto* cal_groups = cmd_cal->add_option("--groups", groups_path, "validation groups");
    auto* cal_ckpt =
        cmd_cal->add_option("--checkpoint", checkpoint_path, "trained checkpoint");
    auto* cal_kb_data = cmd_cal->add_option("--kb-data", kb_data_path, "kb data file");
    auto* cal_kb_index = cmd_cal->add_option("--kb-index", kb_index_path, "kb index file");

    CLI11_PARSE(app, argc, argv);

    try {
        alertgraph::RunConfig cfg;
        if (!config_path.empty()) cfg = alertgraph::load_run_config(config_path);
        resolve_output_dir(cfg, out_dir);

        if (*gen_scenario || *ingest_alerts || *group_alerts) {
            // shared override targets; only one subcommand is active
            if (*gen_scenario) cfg.scenario_path = scenario_path;
            if (*ingest_alerts || *group_alerts) cfg.alerts_path = alerts_path;
        }
        if (*group_delta) cfg.baseline_delta = baseline_delta;
        if (*train_groups || *match_groups || *cal_groups) cfg.groups_path = groups_path;
        if (*train_ckpt || *match_ckpt || *cal_ckpt) cfg.checkpoint_path = checkpoint_path;
        if (*match_thresh) cfg.threshold = threshold;
        if (*match_kb_data || *cal_kb_data) cfg.kb_data_path = kb_data_path;
        if (*match_kb_index || *cal_kb_index) cfg.kb_index_path = kb_index_path;
        if (*train_epochs) cfg.model.epochs = epochs;
        if (*train_seed || *gen_seed) cfg.seed = seed;

        std::string summary;
        if (app.got_subcommand(cmd_gen)) {
            if (*gen_seed) {
                // regenerate with the overridden seed by patching the spec
                auto spec = alertgraph::io::load_scenario(cfg.scenario_path);
                spec.seed = seed;
                const auto scenario = alertgraph::generate(spec);
                alertgraph::io::save_alerts(cfg.out("alerts.jsonl"), scenario.alerts);
                alertgraph::io::save_truth(cfg.out("truth.jsonl"), scenario.truth);
                summary = "generated " + std::to_string(scenario.alerts.size()) +
                          " alerts with seed override\n";
            } else {
                summary = alertgraph::run_gen(cfg);
            }
        } else if (app.got_subcommand(cmd_ingest)) {
            summary = alertgraph::run_ingest(cfg);
        } else if (app.got_subcommand(cmd_group)) {
            summary = alertgraph::run_group(cfg);
        } else if (app.got_subcommand(cmd_eval)) {
            summary = alertgraph::run_eval(cfg);
        } else if (app.got_subcommand(cmd_train)) {
            summary = alertgraph::run_train(cfg, target_step);
        } else if (app.got_subcommand(cmd_match)) {
            summary = alertgraph::run_match(cfg);
        } else if (app.got_subcommand(cmd_cal)) {
            summary = alertgraph::run_calibrate(cfg);
        }
        std::cout << summary;
        return 0;
    } catch (const alertgraph::NoKnowledgeError& e) {
        std::cerr << "no knowledge: " << e.what() << "\n";
        return kExitNoKnowledge;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
