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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace alertgraph {

/// Dense row-major matrix of doubles. Small and unclever on purpose: the
/// model dimensions stay in the tens, and the backward passes need direct
/// element access.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    std::string shape_str() const {
        return std::to_string(rows) + "x" + std::to_string(cols);
    }

    bool operator==(const Matrix&) const = default;
};

namespace la {

inline void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
    }
}

/// C = A * B
inline Matrix mm(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("mm: inner dimensions differ, " + a.shape_str() +
                                    " * " + b.shape_str());
    }
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) {
                c.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return c;
}

/// C = A * B^T
inline Matrix mm_nt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) {
        throw std::invalid_argument("mm_nt: inner dimensions differ, " + a.shape_str() +
                                    " * " + b.shape_str() + "^T");
    }
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += a.at(i, k) * b.at(j, k);
            c.at(i, j) = s;
        }
    }
    return c;
}

/// C = A^T * B
inline Matrix mm_tn(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) {
        throw std::invalid_argument("mm_tn: inner dimensions differ, " + a.shape_str() +
                                    "^T * " + b.shape_str());
    }
    Matrix c(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = a.at(k, i);
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) {
                c.at(i, j) += aki * b.at(k, j);
            }
        }
    }
    return c;
}

inline void add_in_place(Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "add_in_place");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

inline Matrix add(Matrix a, const Matrix& b) {
    add_in_place(a, b);
    return a;
}

inline Matrix sub(Matrix a, const Matrix& b) {
    check_same_shape(a, b, "sub");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
    return a;
}

inline Matrix hadamard(Matrix a, const Matrix& b) {
    check_same_shape(a, b, "hadamard");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] *= b.data[i];
    return a;
}

inline Matrix scale(Matrix a, double s) {
    for (auto& v : a.data) v *= s;
    return a;
}

}  // namespace la

}  // namespace alertgraph
