// SPDX-License-Identifier: Apache-2.0
//
// pdpgan: generative modelling of multipath power delay profiles
// Copyright (C) 2026 The pdpgan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef PDPGAN_AUTODIFF_HPP
#define PDPGAN_AUTODIFF_HPP

#include "pdpgan/tensor.hpp"

#include <array>
#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace pdpgan::ad
{

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var
{
  public:
    Var() = default;

    const Tensor &value() const;
    const Shape &shape() const { return value().shape(); }
    bool requires_grad() const;
    bool valid() const { return tape_ != nullptr; }
    std::size_t id() const { return id_; }
    Tape *tape() const { return tape_; }

  private:
    friend class Tape;
    Var(Tape *tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape *tape_ = nullptr;
    std::size_t id_ = 0;
};

// Given the node itself and the gradient flowing into it, returns the gradient contribution for
// each input whose `need` flag is set (others may be left invalid). The returned Vars are built
// with the same differentiable ops, so a gradient can itself be differentiated.
using BackwardFn = std::function<std::array<Var, 2>(Var self, Var grad, std::array<bool, 2> need)>;

// Append-only record of a computation. Node ids are assigned in creation order, which is a
// topological order. A tape is single-threaded; distinct tapes are independent.
class Tape
{
  public:
    Tape() = default;
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var constant(Tensor value);
    Var variable(Tensor value);

    std::size_t size() const { return nodes_.size(); }
    bool recording() const { return recording_; }

    // Gradients of a scalar `output` with respect to `wrt`. Inputs that do not influence the
    // output receive zeros. With create_graph the returned Vars are differentiable nodes on this
    // tape; otherwise they are constants.
    std::vector<Var> grad(Var output, std::span<const Var> wrt, bool create_graph = false);

    // Convenience: gradient values only.
    std::vector<Tensor> gradients(Var output, std::span<const Var> wrt);

    // Low-level node creation used by the op library.
    Var record(std::string_view op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
    Var input(Var node, std::size_t k) const;
    std::string_view op_name(Var node) const;

  private:
    friend class Var;

    struct Node
    {
        std::string_view op;
        Tensor value;
        std::array<std::size_t, 2> inputs{};
        std::size_t input_count = 0;
        bool requires_grad = false;
        BackwardFn backward;
    };

    const Node &node(std::size_t id) const { return nodes_[id]; }

    // std::deque keeps references stable while backward passes append nodes.
    std::deque<Node> nodes_;
    bool recording_ = true;
};

// ---- Differentiable ops -----------------------------------------------------------------

Var matmul(Var a, Var b, bool transpose_a = false, bool transpose_b = false);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b); // elementwise
Var div(Var a, Var b); // elementwise
Var scalar_mul(Var a, double c);
Var affine(Var a, double scale, double shift); // scale * a + shift, elementwise
Var mul_const(Var a, const Tensor &c);         // elementwise product with a constant tensor
Var sum(Var a);                                 // -> scalar
Var mean(Var a);                                // -> scalar
Var square(Var a);
Var sqrt(Var a);
Var leaky_relu(Var a, double slope);
Var sigmoid(Var a);

// Matrix reductions and broadcasts.
Var sum_rows(Var a);                            // [r x c] -> [1 x c]
Var sum_cols(Var a);                            // [r x c] -> [r x 1]
Var broadcast_rows(Var row, std::size_t rows);  // [1 x c] -> [rows x c]
Var broadcast_cols(Var col, std::size_t cols);  // [r x 1] -> [r x cols]
Var broadcast_scalar(Var s, const Shape &shape);
Var add_bias(Var x, Var bias);                  // [r x c] + [1 x c]

// Per-row Euclidean norm of a batch matrix, sqrt(sum_j x_ij^2 + eps): [r x c] -> [r x 1].
Var l2_norm_rows(Var x, double eps = 0.0);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

// Value-only helpers shared with the non-differentiable inference paths.
double leaky_relu(double x, double slope);
double sigmoid(double x);

} // namespace pdpgan::ad

#endif
