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

#ifndef PDPGAN_TENSOR_HPP
#define PDPGAN_TENSOR_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpgan::ad
{

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape &shape);

class ShapeError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Dense row-major array of doubles. Rank 0 is a scalar; the differentiable ops work on
// rank-2 matrices and scalars.
class Tensor
{
  public:
    Tensor() : shape_{}, values_(1, 0.0) {}
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> values);

    static Tensor scalar(double v) { return Tensor(Shape{}, std::vector<double>{v}); }
    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) { return Tensor({rows, cols}, fill); }

    const Shape &shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }

    // Matrix view: requires rank 2.
    std::size_t rows() const;
    std::size_t cols() const;

    double &operator()(std::size_t r, std::size_t c) { return values_[r * shape_[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * shape_[1] + c]; }
    double &operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double> &data() { return values_; }
    const std::vector<double> &data() const { return values_; }

    // Value of a single-element tensor.
    double item() const;

    bool all_finite() const;

    bool operator==(const Tensor &) const = default;

  private:
    Shape shape_;
    std::vector<double> values_;
};

std::size_t element_count(const Shape &shape);

// C = op(A) * op(B), op = identity or transpose.
Tensor matmul(const Tensor &a, const Tensor &b, bool transpose_a = false, bool transpose_b = false);

} // namespace pdpgan::ad

#endif
