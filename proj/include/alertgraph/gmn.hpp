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
#include <utility>
#include <vector>

#include "alertgraph/autodiff.hpp"
#include "alertgraph/grouping.hpp"
#include "alertgraph/rng.hpp"

namespace alertgraph {

/// Model hyperparameters. Node vectors enter at node_in_dim, edge features
/// at edge_in_dim; propagation runs prop_rounds rounds of within-graph
/// message passing plus cross-graph attention; graphs aggregate to
/// graph_dim vectors scored by dot product.
struct GmnConfig {
    std::size_t node_in_dim = 133;
    std::size_t edge_in_dim = 2;
    std::size_t hidden_dim = 32;
    std::size_t prop_rounds = 5;
    std::size_t graph_dim = 32;
    double margin = 1.0;
    double learning_rate = 0.0001;
    std::size_t epochs = 450;
    std::uint64_t seed = 0;

    void validate() const {
        if (node_in_dim < 1 || edge_in_dim < 1 || hidden_dim < 1 || graph_dim < 1) {
            throw std::invalid_argument("gmn: all dimensions must be >= 1");
        }
        if (prop_rounds < 1) throw std::invalid_argument("gmn: prop_rounds must be >= 1");
        if (epochs < 1) throw std::invalid_argument("gmn: epochs must be >= 1");
        if (margin <= 0) throw std::invalid_argument("gmn: margin must be > 0");
        // zero is allowed: a frozen optimiser is the degenerate baseline
        if (learning_rate < 0) {
            throw std::invalid_argument("gmn: learning_rate must be >= 0");
        }
    }
};

/// All learnable tensors. Weight matrices are stored out_dim x in_dim and
/// applied as X * W^T; biases are 1 x out_dim rows.
struct GmnParams {
    Matrix node_enc_w, node_enc_b;
    Matrix edge_enc_w, edge_enc_b;
    Matrix msg_w1, msg_b1, msg_w2, msg_b2;
    Matrix update_w, update_b;
    Matrix gate_w, gate_b;
    Matrix transform_w, transform_b;
    Matrix out_w, out_b;

    /// Stable (name, tensor) view used by the optimiser, serialisation and
    /// the gradient checks.
    std::vector<std::pair<std::string, Matrix*>> tensors() {
        return {
            {"node_enc_w", &node_enc_w},   {"node_enc_b", &node_enc_b},
            {"edge_enc_w", &edge_enc_w},   {"edge_enc_b", &edge_enc_b},
            {"msg_w1", &msg_w1},           {"msg_b1", &msg_b1},
            {"msg_w2", &msg_w2},           {"msg_b2", &msg_b2},
            {"update_w", &update_w},       {"update_b", &update_b},
            {"gate_w", &gate_w},           {"gate_b", &gate_b},
            {"transform_w", &transform_w}, {"transform_b", &transform_b},
            {"out_w", &out_w},             {"out_b", &out_b},
        };
    }

    std::vector<std::pair<std::string, const Matrix*>> tensors() const {
        auto mut = const_cast<GmnParams*>(this)->tensors();
        std::vector<std::pair<std::string, const Matrix*>> out;
        out.reserve(mut.size());
        for (auto& [name, m] : mut) out.emplace_back(name, m);
        return out;
    }

    /// Zero tensors with the shapes the config implies.
    static GmnParams shaped(const GmnConfig& c) {
        const auto h = c.hidden_dim;
        const auto g = c.graph_dim;
        GmnParams p;
        p.node_enc_w = Matrix(h, c.node_in_dim);
        p.node_enc_b = Matrix(1, h);
        p.edge_enc_w = Matrix(h, c.edge_in_dim);
        p.edge_enc_b = Matrix(1, h);
        p.msg_w1 = Matrix(h, 3 * h);
        p.msg_b1 = Matrix(1, h);
        p.msg_w2 = Matrix(h, h);
        p.msg_b2 = Matrix(1, h);
        p.update_w = Matrix(h, 3 * h);
        p.update_b = Matrix(1, h);
        p.gate_w = Matrix(g, h);
        p.gate_b = Matrix(1, g);
        p.transform_w = Matrix(g, h);
        p.transform_b = Matrix(1, g);
        p.out_w = Matrix(g, g);
        p.out_b = Matrix(1, g);
        return p;
    }

    bool operator==(const GmnParams&) const = default;
};

/// Weights drawn uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases
/// zero. Deterministic for a given seed.
inline GmnParams init_params(const GmnConfig& config, std::uint64_t seed) {
    config.validate();
    GmnParams p = GmnParams::shaped(config);
    Rng rng(seed);
    for (auto& [name, tensor] : p.tensors()) {
        if (name.ends_with("_b")) continue;  // biases stay zero
        const double bound = 1.0 / std::sqrt(static_cast<double>(tensor->cols));
        for (auto& v : tensor->data) v = rng.uniform(-bound, bound);
    }
    return p;
}

/// Cross-graph attention of the final propagation round: entry (i, j) is
/// how strongly node i of one graph attends to node j of the other. Kept
/// for explanation of matches.
struct AttentionRecord {
    Matrix a_g1_to_g2;  // n1 x n2
    Matrix a_g2_to_g1;  // n2 x n1
};

struct MatchScore {
    double score = 0.0;
    double distance() const { return -score; }
};

struct ForwardResult {
    std::vector<double> h1;
    std::vector<double> h2;
    MatchScore score;
    AttentionRecord attention;
};

namespace detail {

/// Node features, edge features and endpoint indices of one group, ready
/// for the model.
struct GraphTensors {
    Matrix x;                       // n x node_in
    Matrix f;                       // m x edge_in
    std::vector<std::size_t> src;   // m
    std::vector<std::size_t> dst;   // m
    std::size_t n = 0;
    std::size_t m = 0;
};

inline GraphTensors graph_tensors(const AlertGroup& group, const GmnConfig& c,
                                  const char* which) {
    if (group.nodes.empty()) {
        throw std::invalid_argument(std::string("forward_pair: ") + which + " is empty");
    }
    GraphTensors g;
    g.n = group.nodes.size();
    g.x = Matrix(g.n, c.node_in_dim);
    std::unordered_map<std::uint64_t, std::size_t> row;
    row.reserve(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const auto& node = group.nodes[i];
        if (node.vec.size() != c.node_in_dim) {
            throw std::invalid_argument(
                std::string("forward_pair: ") + which + " node " + std::to_string(node.id) +
                " has vector length " + std::to_string(node.vec.size()) + ", expected " +
                std::to_string(c.node_in_dim));
        }
        for (std::size_t j = 0; j < c.node_in_dim; ++j) g.x.at(i, j) = node.vec[j];
        row.emplace(node.id, i);
    }
    g.m = group.edges.size();
    g.f = Matrix(g.m, c.edge_in_dim);
    g.src.reserve(g.m);
    g.dst.reserve(g.m);
    std::size_t e = 0;
    for (const auto& [key, edge] : group.edges) {
        if (c.edge_in_dim != 2) {
            throw std::invalid_argument("forward_pair: edge_in_dim must be 2 to carry "
                                        "the stored edge features");
        }
        g.f.at(e, 0) = edge.feature[0];
        g.f.at(e, 1) = edge.feature[1];
        g.src.push_back(row.at(key.first));
        g.dst.push_back(row.at(key.second));
        ++e;
    }
    return g;
}

/// The propagation network, written once against an engine. Returns the
/// two graph vectors and the final-round attention variables.
template <typename E>
struct GmnNet {
    using Var = typename E::Var;

    E& eng;
    const GmnConfig& cfg;

    struct Params {
        Var node_enc_w, node_enc_b, edge_enc_w, edge_enc_b;
        Var msg_w1, msg_b1, msg_w2, msg_b2;
        Var update_w, update_b;
        Var gate_w, gate_b, transform_w, transform_b, out_w, out_b;
    };

    Params load(const GmnParams& p) {
        return Params{
            eng.leaf(p.node_enc_w),  eng.leaf(p.node_enc_b), eng.leaf(p.edge_enc_w),
            eng.leaf(p.edge_enc_b),  eng.leaf(p.msg_w1),     eng.leaf(p.msg_b1),
            eng.leaf(p.msg_w2),      eng.leaf(p.msg_b2),     eng.leaf(p.update_w),
            eng.leaf(p.update_b),    eng.leaf(p.gate_w),     eng.leaf(p.gate_b),
            eng.leaf(p.transform_w), eng.leaf(p.transform_b), eng.leaf(p.out_w),
            eng.leaf(p.out_b)};
    }

    Var affine(Var x, Var w, Var b) {
        return eng.add_rowvec(eng.matmul_nt(x, w), b);
    }

    /// Per-node sum of messages over incident edges, both directions, using
    /// the round-start states.
    Var message_sum(const Params& p, Var h, Var e_hidden, const GraphTensors& g) {
        if (g.m == 0) return eng.leaf(Matrix(g.n, cfg.hidden_dim));
        auto mlp = [&](Var recv, Var send) {
            Var in = eng.concat_cols({recv, send, e_hidden});
            Var l1 = eng.relu(affine(in, p.msg_w1, p.msg_b1));
            return affine(l1, p.msg_w2, p.msg_b2);
        };
        Var fwd = mlp(eng.gather_rows(h, g.dst), eng.gather_rows(h, g.src));
        Var bwd = mlp(eng.gather_rows(h, g.src), eng.gather_rows(h, g.dst));
        return eng.add(eng.scatter_add_rows(fwd, g.dst, g.n),
                       eng.scatter_add_rows(bwd, g.src, g.n));
    }

    /// Gated sum over node states, then the output transform.
    Var graph_vector(const Params& p, Var h) {
        Var gate = eng.sigmoid(affine(h, p.gate_w, p.gate_b));
        Var transformed = affine(h, p.transform_w, p.transform_b);
        Var pooled = eng.sum_rows(eng.hadamard(gate, transformed));
        return affine(pooled, p.out_w, p.out_b);
    }

    struct Output {
        Var h_g1, h_g2, score;
        Var attn_12, attn_21;
    };

    Output run(const Params& p, const GraphTensors& g1, const GraphTensors& g2) {
        Var h1 = affine(eng.leaf(g1.x), p.node_enc_w, p.node_enc_b);
        Var h2 = affine(eng.leaf(g2.x), p.node_enc_w, p.node_enc_b);
        Var e1 = g1.m > 0 ? affine(eng.leaf(g1.f), p.edge_enc_w, p.edge_enc_b)
                          : eng.leaf(Matrix(0, cfg.hidden_dim));
        Var e2 = g2.m > 0 ? affine(eng.leaf(g2.f), p.edge_enc_w, p.edge_enc_b)
                          : eng.leaf(Matrix(0, cfg.hidden_dim));

        Var attn_12 = eng.leaf(Matrix());
        Var attn_21 = eng.leaf(Matrix());
        for (std::size_t round = 0; round < cfg.prop_rounds; ++round) {
            Var m1 = message_sum(p, h1, e1, g1);
            Var m2 = message_sum(p, h2, e2, g2);
            // cross-graph attention on the round-start states; both
            // directions computed the same way so the score is exactly
            // symmetric under argument swap
            attn_12 = eng.softmax_rows(eng.matmul_nt(h1, h2));
            attn_21 = eng.softmax_rows(eng.matmul_nt(h2, h1));
            Var mu1 = eng.sub(h1, eng.matmul(attn_12, h2));
            Var mu2 = eng.sub(h2, eng.matmul(attn_21, h1));
            h1 = eng.relu(affine(eng.concat_cols({h1, m1, mu1}), p.update_w, p.update_b));
            h2 = eng.relu(affine(eng.concat_cols({h2, m2, mu2}), p.update_w, p.update_b));
        }
        Var hg1 = graph_vector(p, h1);
        Var hg2 = graph_vector(p, h2);
        Var score = eng.dot(hg1, hg2);
        return Output{hg1, hg2, score, attn_12, attn_21};
    }
};

}  // namespace detail

/// Scores a pair of alert groups: encodes, propagates prop_rounds times
/// with within-graph messages and cross-graph attention, aggregates each
/// graph to a vector, and returns their dot product plus the final-round
/// attention for explanation.
inline ForwardResult forward_pair(const AlertGroup& g1, const AlertGroup& g2,
                                  const GmnParams& params, const GmnConfig& config) {
    config.validate();
    const auto t1 = detail::graph_tensors(g1, config, "first group");
    const auto t2 = detail::graph_tensors(g2, config, "second group");
    EvalEngine eng;
    detail::GmnNet<EvalEngine> net{eng, config};
    auto p = net.load(params);
    auto out = net.run(p, t1, t2);

    ForwardResult r;
    r.h1 = out.h_g1.data;
    r.h2 = out.h_g2.data;
    r.score.score = out.score.at(0, 0);
    r.attention.a_g1_to_g2 = out.attn_12;
    r.attention.a_g2_to_g1 = out.attn_21;
    return r;
}

/// A labelled training pair: +1 when both groups show the same attack step,
/// -1 otherwise.
struct PairExample {
    AlertGroup g1;
    AlertGroup g2;
    int label = 1;
};

/// Margin loss on the similarity score: max(0, margin - label * score).
inline double pair_loss(double score, int label, double margin) {
    if (label != 1 && label != -1) {
        throw std::invalid_argument("pair_loss: label must be +1 or -1");
    }
    return std::max(0.0, margin - static_cast<double>(label) * score);
}

struct GradientResult {
    GmnParams grads;
    double mean_loss = 0.0;
};

/// Exact gradients of the mean pair loss over the batch, by reverse-mode
/// differentiation of the forward computation.
inline GradientResult gradients(const std::vector<PairExample>& batch,
                                const GmnParams& params, const GmnConfig& config) {
    if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
    config.validate();
    GradientResult result;
    result.grads = GmnParams::shaped(config);
    auto grad_view = result.grads.tensors();
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const auto& ex : batch) {
        if (ex.label != 1 && ex.label != -1) {
            throw std::invalid_argument("gradients: label must be +1 or -1");
        }
        const auto t1 = detail::graph_tensors(ex.g1, config, "first group");
        const auto t2 = detail::graph_tensors(ex.g2, config, "second group");
        Tape tape;
        detail::GmnNet<Tape> net{tape, config};
        auto p = net.load(params);
        auto out = net.run(p, t1, t2);
        // hinge: max(0, margin - label * score)
        Tape::Var loss = tape.relu(
            tape.add_const(tape.scale(out.score, -static_cast<double>(ex.label)),
                           config.margin));
        result.mean_loss += tape.value(loss).at(0, 0) * inv_batch;
        tape.backward(loss, inv_batch);

        const Tape::Var param_vars[] = {
            p.node_enc_w, p.node_enc_b, p.edge_enc_w, p.edge_enc_b,
            p.msg_w1,     p.msg_b1,     p.msg_w2,     p.msg_b2,
            p.update_w,   p.update_b,   p.gate_w,     p.gate_b,
            p.transform_w, p.transform_b, p.out_w,    p.out_b};
        for (std::size_t i = 0; i < grad_view.size(); ++i) {
            la::add_in_place(*grad_view[i].second, tape.grad(param_vars[i]));
        }
    }
    return result;
}

}  // namespace alertgraph
