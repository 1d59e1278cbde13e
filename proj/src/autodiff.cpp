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

#include "pdpgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace pdpgan::ad
{

const Tensor &Var::value() const
{
    if (!tape_)
        throw std::logic_error("Use of an empty Var.");
    return tape_->node(id_).value;
}

bool Var::requires_grad() const
{
    return tape_ && tape_->node(id_).requires_grad;
}

Var Tape::constant(Tensor value)
{
    nodes_.push_back(Node{"constant", std::move(value), {}, 0, false, {}});
    return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value)
{
    nodes_.push_back(Node{"variable", std::move(value), {}, 0, true, {}});
    return Var(this, nodes_.size() - 1);
}

Var Tape::record(std::string_view op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward)
{
    Node n;
    n.op = op;
    n.value = std::move(value);
    bool any = false;
    for (const Var &v : inputs)
    {
        if (v.tape_ != this)
            throw std::logic_error(std::string(op) + ": inputs live on a different tape.");
        any = any || node(v.id_).requires_grad;
    }
    n.requires_grad = recording_ && any;
    if (n.requires_grad)
    {
        for (const Var &v : inputs)
            n.inputs[n.input_count++] = v.id_;
        n.backward = std::move(backward);
    }
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Var Tape::input(Var v, std::size_t k) const
{
    const auto &n = node(v.id_);
    if (k >= n.input_count)
        throw std::logic_error("Node input index out of range.");
    return Var(const_cast<Tape *>(this), n.inputs[k]);
}

std::string_view Tape::op_name(Var v) const
{
    return node(v.id_).op;
}

namespace
{
class RecordingGuard
{
  public:
    RecordingGuard(bool &flag, bool value) : flag_(flag), saved_(flag) { flag_ = value; }
    ~RecordingGuard() { flag_ = saved_; }
    RecordingGuard(const RecordingGuard &) = delete;
    RecordingGuard &operator=(const RecordingGuard &) = delete;

  private:
    bool &flag_;
    bool saved_;
};
} // namespace

std::vector<Var> Tape::grad(Var output, std::span<const Var> wrt, bool create_graph)
{
    if (output.tape_ != this)
        throw std::logic_error("grad: output lives on a different tape.");
    if (output.value().size() != 1)
        throw ShapeError("grad needs a scalar output, got shape " + to_string(output.shape()) + ".");

    const std::size_t end = output.id_ + 1;

    // A node needs a gradient when it is a target or depends on one.
    std::vector<char> needed(end, 0);
    for (const Var &w : wrt)
    {
        if (w.tape_ != this)
            throw std::logic_error("grad: target lives on a different tape.");
        if (w.id_ < end)
            needed[w.id_] = 1;
    }
    for (std::size_t i = 0; i < end; ++i)
    {
        const auto &n = nodes_[i];
        if (!n.requires_grad)
            continue;
        for (std::size_t k = 0; k < n.input_count; ++k)
            needed[i] = needed[i] || needed[n.inputs[k]];
    }

    RecordingGuard guard(recording_, create_graph && recording_);

    std::vector<std::optional<Var>> grads(end);
    if (needed[output.id_])
        grads[output.id_] = constant(Tensor(output.shape(), 1.0));

    for (std::size_t i = end; i-- > 0;)
    {
        if (!grads[i] || !needed[i])
            continue;
        const Node &n = nodes_[i];
        if (!n.backward)
            continue;
        std::array<bool, 2> need{};
        for (std::size_t k = 0; k < n.input_count; ++k)
            need[k] = needed[n.inputs[k]] != 0;
        const auto contributions = n.backward(Var(this, i), *grads[i], need);
        for (std::size_t k = 0; k < n.input_count; ++k)
        {
            if (!need[k] || !contributions[k].valid())
                continue;
            auto &slot = grads[n.inputs[k]];
            slot = slot ? add(*slot, contributions[k]) : contributions[k];
        }
        // Release intermediate gradients that are no longer required.
        if (!std::any_of(wrt.begin(), wrt.end(), [i](const Var &w) { return w.id_ == i; }))
            grads[i].reset();
    }

    std::vector<Var> out;
    out.reserve(wrt.size());
    for (const Var &w : wrt)
    {
        if (w.id_ < end && grads[w.id_])
            out.push_back(*grads[w.id_]);
        else
            out.push_back(constant(Tensor(w.shape(), 0.0)));
    }
    return out;
}

std::vector<Tensor> Tape::gradients(Var output, std::span<const Var> wrt)
{
    const auto vars = grad(output, wrt, false);
    std::vector<Tensor> out;
    out.reserve(vars.size());
    for (const auto &v : vars)
        out.push_back(v.value());
    return out;
}

// ---- op library ----------------------------------------------------------------------------

double leaky_relu(double x, double slope)
{
    return x >= 0.0 ? x : slope * x;
}

double sigmoid(double x)
{
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace
{
Tape &tape_of(Var a)
{
    if (!a.valid())
        throw std::logic_error("Use of an empty Var.");
    return *a.tape();
}

void require_same_shape(const char *op, Var a, Var b)
{
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()) +
                         ".");
}

template <typename F>
Tensor map(const Tensor &a, F f)
{
    Tensor out(a.shape());
    auto src = a.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = f(src[i]);
    return out;
}

template <typename F>
Tensor zip(const Tensor &a, const Tensor &b, F f)
{
    Tensor out(a.shape());
    auto x = a.values();
    auto y = b.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < x.size(); ++i)
        dst[i] = f(x[i], y[i]);
    return out;
}
} // namespace

Var matmul(Var a, Var b, bool ta, bool tb)
{
    Tape &t = tape_of(a);
    Tensor value = ad::matmul(a.value(), b.value(), ta, tb);
    return t.record("matmul", std::move(value), {a, b}, [ta, tb](Var self, Var g, std::array<bool, 2> need) {
        Tape &tp = *self.tape();
        const Var a = tp.input(self, 0);
        const Var b = tp.input(self, 1);
        std::array<Var, 2> out;
        if (need[0])
            out[0] = ta ? matmul(b, g, tb, true) : matmul(g, b, false, !tb);
        if (need[1])
            out[1] = tb ? matmul(g, a, true, ta) : matmul(a, g, !ta, false);
        return out;
    });
}

Var add(Var a, Var b)
{
    require_same_shape("add", a, b);
    return tape_of(a).record("add", zip(a.value(), b.value(), std::plus<>()), {a, b},
                             [](Var, Var g, std::array<bool, 2>) { return std::array<Var, 2>{g, g}; });
}

Var sub(Var a, Var b)
{
    require_same_shape("sub", a, b);
    return tape_of(a).record("sub", zip(a.value(), b.value(), std::minus<>()), {a, b},
                             [](Var, Var g, std::array<bool, 2> need) {
                                 return std::array<Var, 2>{g, need[1] ? scalar_mul(g, -1.0) : Var{}};
                             });
}

Var mul(Var a, Var b)
{
    require_same_shape("mul", a, b);
    return tape_of(a).record("mul", zip(a.value(), b.value(), std::multiplies<>()), {a, b},
                             [](Var self, Var g, std::array<bool, 2> need) {
                                 Tape &tp = *self.tape();
                                 std::array<Var, 2> out;
                                 if (need[0])
                                     out[0] = mul(g, tp.input(self, 1));
                                 if (need[1])
                                     out[1] = mul(g, tp.input(self, 0));
                                 return out;
                             });
}

Var div(Var a, Var b)
{
    require_same_shape("div", a, b);
    return tape_of(a).record("div", zip(a.value(), b.value(), std::divides<>()), {a, b},
                             [](Var self, Var g, std::array<bool, 2> need) {
                                 Tape &tp = *self.tape();
                                 const Var b = tp.input(self, 1);
                                 std::array<Var, 2> out;
                                 if (need[0])
                                     out[0] = div(g, b);
                                 if (need[1])
                                     out[1] = scalar_mul(div(mul(g, self), b), -1.0);
                                 return out;
                             });
}

Var affine(Var a, double scale, double shift)
{
    return tape_of(a).record("affine", map(a.value(), [=](double x) { return scale * x + shift; }), {a},
                             [scale](Var, Var g, std::array<bool, 2>) {
                                 return std::array<Var, 2>{affine(g, scale, 0.0), Var{}};
                             });
}

Var scalar_mul(Var a, double c)
{
    return affine(a, c, 0.0);
}

Var mul_const(Var a, const Tensor &c)
{
    if (a.shape() != c.shape())
        throw ShapeError("mul_const: shape mismatch " + to_string(a.shape()) + " vs " + to_string(c.shape()) + ".");
    return tape_of(a).record("mul_const", zip(a.value(), c, std::multiplies<>()), {a},
                             [c](Var, Var g, std::array<bool, 2>) {
                                 return std::array<Var, 2>{mul_const(g, c), Var{}};
                             });
}

Var sum(Var a)
{
    double s = 0.0;
    for (double v : a.value().values())
        s += v;
    Shape shape = a.shape();
    return tape_of(a).record("sum", Tensor::scalar(s), {a}, [shape](Var, Var g, std::array<bool, 2>) {
        return std::array<Var, 2>{broadcast_scalar(g, shape), Var{}};
    });
}

Var mean(Var a)
{
    const double n = static_cast<double>(a.value().size());
    double s = 0.0;
    for (double v : a.value().values())
        s += v;
    Shape shape = a.shape();
    return tape_of(a).record("mean", Tensor::scalar(s / n), {a}, [shape, n](Var, Var g, std::array<bool, 2>) {
        return std::array<Var, 2>{broadcast_scalar(scalar_mul(g, 1.0 / n), shape), Var{}};
    });
}

Var square(Var a)
{
    return tape_of(a).record("square", map(a.value(), [](double x) { return x * x; }), {a},
                             [](Var self, Var g, std::array<bool, 2>) {
                                 const Var x = self.tape()->input(self, 0);
                                 return std::array<Var, 2>{mul(g, scalar_mul(x, 2.0)), Var{}};
                             });
}

Var sqrt(Var a)
{
    return tape_of(a).record("sqrt", map(a.value(), [](double x) { return std::sqrt(x); }), {a},
                             [](Var self, Var g, std::array<bool, 2>) {
                                 return std::array<Var, 2>{div(scalar_mul(g, 0.5), self), Var{}};
                             });
}

Var leaky_relu(Var a, double slope)
{
    Tensor mask = map(a.value(), [slope](double x) { return x > 0.0 ? 1.0 : slope; });
    return tape_of(a).record("leaky_relu", map(a.value(), [slope](double x) { return leaky_relu(x, slope); }), {a},
                             [mask = std::move(mask)](Var, Var g, std::array<bool, 2>) {
                                 return std::array<Var, 2>{mul_const(g, mask), Var{}};
                             });
}

Var sigmoid(Var a)
{
    return tape_of(a).record("sigmoid", map(a.value(), [](double x) { return sigmoid(x); }), {a},
                             [](Var self, Var g, std::array<bool, 2>) {
                                 return std::array<Var, 2>{mul(g, mul(self, affine(self, -1.0, 1.0))), Var{}};
                             });
}

Var sum_rows(Var a)
{
    const Tensor &x = a.value();
    const std::size_t r = x.rows(), c = x.cols();
    Tensor out = Tensor::matrix(1, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            out[j] += x(i, j);
    return tape_of(a).record("sum_rows", std::move(out), {a}, [r](Var, Var g, std::array<bool, 2>) {
        return std::array<Var, 2>{broadcast_rows(g, r), Var{}};
    });
}

Var sum_cols(Var a)
{
    const Tensor &x = a.value();
    const std::size_t r = x.rows(), c = x.cols();
    Tensor out = Tensor::matrix(r, 1);
    for (std::size_t i = 0; i < r; ++i)
    {
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j)
            s += x(i, j);
        out[i] = s;
    }
    return tape_of(a).record("sum_cols", std::move(out), {a}, [c](Var, Var g, std::array<bool, 2>) {
        return std::array<Var, 2>{broadcast_cols(g, c), Var{}};
    });
}

Var broadcast_rows(Var row, std::size_t rows)
{
    const Tensor &x = row.value();
    if (x.rows() != 1)
        throw ShapeError("broadcast_rows expects a [1 x c] row, got " + to_string(x.shape()) + ".");
    const std::size_t c = x.cols();
    Tensor out = Tensor::matrix(rows, c);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < c; ++j)
            out(i, j) = x[j];
    return tape_of(row).record("broadcast_rows", std::move(out), {row}, [](Var, Var g, std::array<bool, 2>) {
        return std::array<Var, 2>{sum_rows(g), Var{}};
    });
}

Var broadcast_cols(Var col, std::size_t cols)
{
    const Tensor &x = col.value();
    if (x.cols() != 1)
        throw ShapeError("broadcast_cols expects an [r x 1] column, got " + to_string(x.shape()) + ".");
    const std::size_t r = x.rows();
    Tensor out = Tensor::matrix(r, cols);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out(i, j) = x[i];
    return tape_of(col).record("broadcast_cols", std::move(out), {col}, [](Var, Var g, std::array<bool, 2>) {
        return std::array<Var, 2>{sum_cols(g), Var{}};
    });
}

Var broadcast_scalar(Var s, const Shape &shape)
{
    if (s.value().rank() != 0)
        throw ShapeError("broadcast_scalar expects a scalar, got " + to_string(s.shape()) + ".");
    return tape_of(s).record("broadcast_scalar", Tensor(shape, s.value()[0]), {s},
                             [](Var, Var g, std::array<bool, 2>) { return std::array<Var, 2>{sum(g), Var{}}; });
}

Var add_bias(Var x, Var bias)
{
    const Tensor &xv = x.value();
    const Tensor &bv = bias.value();
    if (bv.rank() != 2 || bv.rows() != 1 || bv.cols() != xv.cols())
        throw ShapeError("add_bias: shape mismatch " + to_string(xv.shape()) + " vs " + to_string(bv.shape()) + ".");
    Tensor out = xv;
    const std::size_t r = xv.rows(), c = xv.cols();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            out(i, j) += bv[j];
    return tape_of(x).record("add_bias", std::move(out), {x, bias}, [](Var, Var g, std::array<bool, 2> need) {
        return std::array<Var, 2>{g, need[1] ? sum_rows(g) : Var{}};
    });
}

Var l2_norm_rows(Var x, double eps)
{
    return sqrt(affine(sum_cols(square(x)), 1.0, eps));
}

} // namespace pdpgan::ad
