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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertgraph/gmn.hpp"
#include "alertgraph/rng.hpp"

namespace alertgraph {

/// Adam with the standard defaults (beta1 0.9, beta2 0.999, eps 1e-8) and
/// bias-corrected moment estimates. One instance per trained model.
class Adam {
public:
    Adam(const GmnConfig& config, double learning_rate)
        : lr_(learning_rate),
          m_(GmnParams::shaped(config)),
          v_(GmnParams::shaped(config)) {
        if (learning_rate < 0) {
            throw std::invalid_argument("adam: learning_rate must be >= 0");
        }
    }

    /// Applies one update in place. Gradients must be shaped like params.
    void step(GmnParams& params, const GmnParams& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        auto pv = params.tensors();
        auto gv = grads.tensors();
        auto mv = m_.tensors();
        auto vv = v_.tensors();
        for (std::size_t i = 0; i < pv.size(); ++i) {
            Matrix& p = *pv[i].second;
            const Matrix& g = *gv[i].second;
            Matrix& m = *mv[i].second;
            Matrix& v = *vv[i].second;
            la::check_same_shape(p, g, "adam step");
            for (std::size_t k = 0; k < p.data.size(); ++k) {
                m.data[k] = beta1_ * m.data[k] + (1.0 - beta1_) * g.data[k];
                v.data[k] = beta2_ * v.data[k] + (1.0 - beta2_) * g.data[k] * g.data[k];
                const double m_hat = m.data[k] / bc1;
                const double v_hat = v.data[k] / bc2;
                p.data[k] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
            }
        }
    }

    std::uint64_t steps_taken() const { return t_; }

private:
    static constexpr double beta1_ = 0.9;
    static constexpr double beta2_ = 0.999;
    static constexpr double eps_ = 1e-8;
    double lr_;
    std::uint64_t t_ = 0;
    GmnParams m_;
    GmnParams v_;
};

/// Builds the labelled pair set for one target attack step: every pair of
/// target-step groups is a positive, and `ratio` negatives per positive are
/// sampled pairing a target-step group with a group from the pool whose
/// step differs. Deterministic for a given rng state.
inline std::vector<PairExample> pairs_from_labels(const std::vector<AlertGroup>& groups,
                                                  const std::string& target,
                                                  const std::vector<AlertGroup>& negatives_pool,
                                                  double ratio, Rng& rng) {
    if (target.empty() || target == kBenignLabel) {
        throw std::invalid_argument("pairs_from_labels: target must be an attack step");
    }
    if (ratio < 0) {
        throw std::invalid_argument("pairs_from_labels: ratio must be >= 0");
    }
    std::vector<const AlertGroup*> targets;
    for (const auto& g : groups) {
        if (g.majority_attack_label() == target) targets.push_back(&g);
    }
    if (targets.size() < 2) {
        throw std::invalid_argument("pairs_from_labels: need at least 2 groups with step '" +
                                    target + "', found " + std::to_string(targets.size()));
    }
    std::vector<const AlertGroup*> others;
    for (const auto& g : negatives_pool) {
        if (g.majority_attack_label() != target) others.push_back(&g);
    }

    std::vector<PairExample> out;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            out.push_back(PairExample{*targets[i], *targets[j], +1});
        }
    }
    const std::size_t want = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(out.size())));
    if (want > 0 && others.empty()) {
        throw std::invalid_argument("pairs_from_labels: no groups outside step '" + target +
                                    "' to draw negatives from");
    }
    std::vector<std::pair<std::size_t, std::size_t>> cross;
    cross.reserve(targets.size() * others.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = 0; j < others.size(); ++j) cross.emplace_back(i, j);
    }
    rng.shuffle(cross);
    for (std::size_t k = 0; k < want; ++k) {
        // repeats only when more negatives are asked for than distinct pairs
        const auto [i, j] = k < cross.size() ? cross[k] : cross[rng.uniform_int(cross.size())];
        out.push_back(PairExample{*targets[i], *others[j], -1});
    }
    return out;
}

struct TrainResult {
    GmnParams params;
    std::vector<double> loss_history;  // one mean loss per epoch
};

/// Trains from scratch: init from config.seed, then config.epochs passes.
/// Positives are oversampled (with repetition) to match the negative count,
/// the epoch's examples are shuffled, and each optimisation step takes one
/// positive and one negative example.
inline TrainResult train(const std::vector<PairExample>& examples, const GmnConfig& config) {
    config.validate();
    std::vector<const PairExample*> pos;
    std::vector<const PairExample*> neg;
    for (const auto& ex : examples) {
        if (ex.label == 1) {
            pos.push_back(&ex);
        } else if (ex.label == -1) {
            neg.push_back(&ex);
        } else {
            throw std::invalid_argument("train: label must be +1 or -1");
        }
    }
    if (pos.empty() || neg.empty()) {
        throw std::invalid_argument("train: need at least one positive and one negative pair");
    }

    TrainResult result;
    result.params = init_params(config, config.seed);
    Adam opt(config, config.learning_rate);
    Rng rng = Rng(config.seed).sub("train");

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        // oversample the smaller positive side up to the negative count
        std::vector<const PairExample*> epoch_pos = pos;
        while (epoch_pos.size() < neg.size()) {
            epoch_pos.push_back(pos[rng.uniform_int(pos.size())]);
        }
        std::vector<const PairExample*> epoch_neg = neg;
        while (epoch_neg.size() < epoch_pos.size()) {
            epoch_neg.push_back(neg[rng.uniform_int(neg.size())]);
        }
        rng.shuffle(epoch_pos);
        rng.shuffle(epoch_neg);

        double loss_sum = 0.0;
        for (std::size_t i = 0; i < epoch_pos.size(); ++i) {
            std::vector<PairExample> batch{*epoch_pos[i], *epoch_neg[i]};
            auto gr = gradients(batch, result.params, config);
            opt.step(result.params, gr.grads);
            loss_sum += gr.mean_loss;
        }
        result.loss_history.push_back(loss_sum / static_cast<double>(epoch_pos.size()));
    }
    return result;
}

}  // namespace alertgraph
