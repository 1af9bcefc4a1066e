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
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alertgraph/linalg.hpp"

namespace alertgraph {

/// Reverse-mode tape over matrix operations. Each op records its value and
/// a closure that scatters the output gradient back to its inputs; running
/// the closures in reverse creation order yields exact gradients of a
/// scalar root. The op set is exactly what the matching model needs.
class Tape {
public:
    struct Var {
        std::uint32_t id = UINT32_MAX;
        bool valid() const { return id != UINT32_MAX; }
    };

    Var leaf(Matrix value) { return push(std::move(value), nullptr); }

    const Matrix& value(Var v) const { return nodes_[v.id].value; }
    const Matrix& grad(Var v) const { return nodes_[v.id].grad; }

    Var matmul(Var a, Var b) {
        Matrix out = la::mm(value(a), value(b));
        return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
            la::add_in_place(t.grad_ref(a), la::mm_nt(g, t.value(b)));
            la::add_in_place(t.grad_ref(b), la::mm_tn(t.value(a), g));
        });
    }

    /// C = A * B^T
    Var matmul_nt(Var a, Var b) {
        Matrix out = la::mm_nt(value(a), value(b));
        return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
            la::add_in_place(t.grad_ref(a), la::mm(g, t.value(b)));
            la::add_in_place(t.grad_ref(b), la::mm_tn(g, t.value(a)));
        });
    }

    Var add(Var a, Var b) {
        Matrix out = la::add(value(a), value(b));
        return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
            la::add_in_place(t.grad_ref(a), g);
            la::add_in_place(t.grad_ref(b), g);
        });
    }

    Var sub(Var a, Var b) {
        Matrix out = la::sub(value(a), value(b));
        return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
            la::add_in_place(t.grad_ref(a), g);
            auto& gb = t.grad_ref(b);
            for (std::size_t i = 0; i < gb.data.size(); ++i) gb.data[i] -= g.data[i];
        });
    }

    /// Adds a 1 x c row vector to every row of A.
    Var add_rowvec(Var a, Var row) {
        const Matrix& av = value(a);
        const Matrix& rv = value(row);
        if (rv.rows != 1 || rv.cols != av.cols) {
            throw std::invalid_argument("add_rowvec: row must be 1x" +
                                        std::to_string(av.cols) + ", got " + rv.shape_str());
        }
        Matrix out = av;
        for (std::size_t i = 0; i < out.rows; ++i) {
            for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) += rv.at(0, j);
        }
        return push(std::move(out), [a, row](Tape& t, const Matrix& g) {
            la::add_in_place(t.grad_ref(a), g);
            auto& gr = t.grad_ref(row);
            for (std::size_t i = 0; i < g.rows; ++i) {
                for (std::size_t j = 0; j < g.cols; ++j) gr.at(0, j) += g.at(i, j);
            }
        });
    }

    Var relu(Var a) {
        Matrix out = value(a);
        for (auto& v : out.data) v = v > 0 ? v : 0.0;
        return push(std::move(out), [a](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            const Matrix& av = t.value(a);
            for (std::size_t i = 0; i < ga.data.size(); ++i) {
                if (av.data[i] > 0) ga.data[i] += g.data[i];
            }
        });
    }

    Var sigmoid(Var a) {
        Matrix out = value(a);
        for (auto& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
        Var r = push(std::move(out), nullptr);
        nodes_[r.id].backward = [a, r](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            const Matrix& y = t.value(r);
            for (std::size_t i = 0; i < ga.data.size(); ++i) {
                ga.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
            }
        };
        return r;
    }

    Var hadamard(Var a, Var b) {
        Matrix out = la::hadamard(value(a), value(b));
        return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            auto& gb = t.grad_ref(b);
            const Matrix& av = t.value(a);
            const Matrix& bv = t.value(b);
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                ga.data[i] += g.data[i] * bv.data[i];
                gb.data[i] += g.data[i] * av.data[i];
            }
        });
    }

    Var concat_cols(const std::vector<Var>& parts) {
        if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
        const std::size_t rows = value(parts[0]).rows;
        std::size_t cols = 0;
        for (auto p : parts) {
            if (value(p).rows != rows) {
                throw std::invalid_argument("concat_cols: row counts differ");
            }
            cols += value(p).cols;
        }
        Matrix out(rows, cols);
        std::size_t off = 0;
        for (auto p : parts) {
            const Matrix& pv = value(p);
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < pv.cols; ++j) out.at(i, off + j) = pv.at(i, j);
            }
            off += pv.cols;
        }
        return push(std::move(out), [parts](Tape& t, const Matrix& g) {
            std::size_t off = 0;
            for (auto p : parts) {
                auto& gp = t.grad_ref(p);
                for (std::size_t i = 0; i < gp.rows; ++i) {
                    for (std::size_t j = 0; j < gp.cols; ++j) gp.at(i, j) += g.at(i, off + j);
                }
                off += gp.cols;
            }
        });
    }

    /// Row i of the result is row idx[i] of A.
    Var gather_rows(Var a, std::vector<std::size_t> idx) {
        const Matrix& av = value(a);
        Matrix out(idx.size(), av.cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = 0; j < av.cols; ++j) out.at(i, j) = av.at(idx[i], j);
        }
        return push(std::move(out), [a, idx = std::move(idx)](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < idx.size(); ++i) {
                for (std::size_t j = 0; j < g.cols; ++j) ga.at(idx[i], j) += g.at(i, j);
            }
        });
    }

    /// Row idx[i] of the result accumulates row i of A; rows not indexed
    /// stay zero.
    Var scatter_add_rows(Var a, std::vector<std::size_t> idx, std::size_t out_rows) {
        const Matrix& av = value(a);
        if (av.rows != idx.size()) {
            throw std::invalid_argument("scatter_add_rows: index count != rows");
        }
        Matrix out(out_rows, av.cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = 0; j < av.cols; ++j) out.at(idx[i], j) += av.at(i, j);
        }
        return push(std::move(out), [a, idx = std::move(idx)](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < idx.size(); ++i) {
                for (std::size_t j = 0; j < g.cols; ++j) ga.at(i, j) += g.at(idx[i], j);
            }
        });
    }

    /// Softmax along each row, max-shifted for stability.
    Var softmax_rows(Var a) {
        Matrix out = value(a);
        for (std::size_t i = 0; i < out.rows; ++i) {
            double mx = out.at(i, 0);
            for (std::size_t j = 1; j < out.cols; ++j) mx = std::max(mx, out.at(i, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < out.cols; ++j) {
                out.at(i, j) = std::exp(out.at(i, j) - mx);
                sum += out.at(i, j);
            }
            for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) /= sum;
        }
        Var r = push(std::move(out), nullptr);
        nodes_[r.id].backward = [a, r](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            const Matrix& y = t.value(r);
            for (std::size_t i = 0; i < y.rows; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < y.cols; ++j) dot += g.at(i, j) * y.at(i, j);
                for (std::size_t j = 0; j < y.cols; ++j) {
                    ga.at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
                }
            }
        };
        return r;
    }

    /// Column sums: n x c -> 1 x c.
    Var sum_rows(Var a) {
        const Matrix& av = value(a);
        Matrix out(1, av.cols);
        for (std::size_t i = 0; i < av.rows; ++i) {
            for (std::size_t j = 0; j < av.cols; ++j) out.at(0, j) += av.at(i, j);
        }
        return push(std::move(out), [a](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < ga.rows; ++i) {
                for (std::size_t j = 0; j < ga.cols; ++j) ga.at(i, j) += g.at(0, j);
            }
        });
    }

    /// Inner product of two 1 x c rows -> 1 x 1.
    Var dot(Var a, Var b) {
        const Matrix& av = value(a);
        const Matrix& bv = value(b);
        la::check_same_shape(av, bv, "dot");
        if (av.rows != 1) throw std::invalid_argument("dot: expects 1-row vectors");
        Matrix out(1, 1);
        for (std::size_t j = 0; j < av.cols; ++j) out.at(0, 0) += av.at(0, j) * bv.at(0, j);
        return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            auto& gb = t.grad_ref(b);
            const Matrix& av2 = t.value(a);
            const Matrix& bv2 = t.value(b);
            for (std::size_t j = 0; j < av2.cols; ++j) {
                ga.at(0, j) += g.at(0, 0) * bv2.at(0, j);
                gb.at(0, j) += g.at(0, 0) * av2.at(0, j);
            }
        });
    }

    Var scale(Var a, double s) {
        Matrix out = la::scale(value(a), s);
        return push(std::move(out), [a, s](Tape& t, const Matrix& g) {
            auto& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += s * g.data[i];
        });
    }

    Var add_const(Var a, double c) {
        Matrix out = value(a);
        for (auto& v : out.data) v += c;
        return push(std::move(out), [a](Tape& t, const Matrix& g) {
            la::add_in_place(t.grad_ref(a), g);
        });
    }

    /// Runs reverse accumulation from a 1 x 1 root. seed is the incoming
    /// gradient (1/batch for a mean-loss term).
    void backward(Var root, double seed = 1.0) {
        const Matrix& rv = value(root);
        if (rv.rows != 1 || rv.cols != 1) {
            throw std::invalid_argument("backward: root must be a 1x1 scalar");
        }
        for (auto& n : nodes_) {
            n.grad = Matrix::zeros(n.value.rows, n.value.cols);
        }
        nodes_[root.id].grad.at(0, 0) = seed;
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            if (nodes_[i].backward) nodes_[i].backward(*this, nodes_[i].grad);
        }
    }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        std::function<void(Tape&, const Matrix&)> backward;
    };

    Matrix& grad_ref(Var v) { return nodes_[v.id].grad; }

    Var push(Matrix value, std::function<void(Tape&, const Matrix&)> backward) {
        nodes_.push_back(Node{std::move(value), Matrix(), std::move(backward)});
        return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
    }

    std::vector<Node> nodes_;
};

/// Forward-only twin of Tape: the same op vocabulary computed directly on
/// matrices. The model's forward pass is written once against either
/// engine; inference runs here without recording.
class EvalEngine {
public:
    using Var = Matrix;

    Var leaf(Matrix v) { return v; }
    const Matrix& value(const Var& v) const { return v; }

    Var matmul(const Var& a, const Var& b) { return la::mm(a, b); }
    Var matmul_nt(const Var& a, const Var& b) { return la::mm_nt(a, b); }
    Var add(const Var& a, const Var& b) { return la::add(a, b); }
    Var sub(const Var& a, const Var& b) { return la::sub(a, b); }

    Var add_rowvec(const Var& a, const Var& row) {
        Matrix out = a;
        for (std::size_t i = 0; i < out.rows; ++i) {
            for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) += row.at(0, j);
        }
        return out;
    }

    Var relu(const Var& a) {
        Matrix out = a;
        for (auto& v : out.data) v = v > 0 ? v : 0.0;
        return out;
    }

    Var sigmoid(const Var& a) {
        Matrix out = a;
        for (auto& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
        return out;
    }

    Var hadamard(const Var& a, const Var& b) { return la::hadamard(a, b); }

    Var concat_cols(const std::vector<Var>& parts) {
        const std::size_t rows = parts.at(0).rows;
        std::size_t cols = 0;
        for (const auto& p : parts) cols += p.cols;
        Matrix out(rows, cols);
        std::size_t off = 0;
        for (const auto& p : parts) {
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < p.cols; ++j) out.at(i, off + j) = p.at(i, j);
            }
            off += p.cols;
        }
        return out;
    }

    Var gather_rows(const Var& a, const std::vector<std::size_t>& idx) {
        Matrix out(idx.size(), a.cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = 0; j < a.cols; ++j) out.at(i, j) = a.at(idx[i], j);
        }
        return out;
    }

    Var scatter_add_rows(const Var& a, const std::vector<std::size_t>& idx,
                         std::size_t out_rows) {
        Matrix out(out_rows, a.cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = 0; j < a.cols; ++j) out.at(idx[i], j) += a.at(i, j);
        }
        return out;
    }

    Var softmax_rows(const Var& a) {
        Matrix out = a;
        for (std::size_t i = 0; i < out.rows; ++i) {
            double mx = out.at(i, 0);
            for (std::size_t j = 1; j < out.cols; ++j) mx = std::max(mx, out.at(i, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < out.cols; ++j) {
                out.at(i, j) = std::exp(out.at(i, j) - mx);
                sum += out.at(i, j);
            }
            for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) /= sum;
        }
        return out;
    }

    Var sum_rows(const Var& a) {
        Matrix out(1, a.cols);
        for (std::size_t i = 0; i < a.rows; ++i) {
            for (std::size_t j = 0; j < a.cols; ++j) out.at(0, j) += a.at(i, j);
        }
        return out;
    }

    Var dot(const Var& a, const Var& b) {
        Matrix out(1, 1);
        for (std::size_t j = 0; j < a.cols; ++j) out.at(0, 0) += a.at(0, j) * b.at(0, j);
        return out;
    }

    Var scale(const Var& a, double s) { return la::scale(a, s); }

    Var add_const(const Var& a, double c) {
        Matrix out = a;
        for (auto& v : out.data) v += c;
        return out;
    }
};

}  // namespace alertgraph
