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

#include "pdpgan/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace pdpgan::ad
{

std::string to_string(const Shape &shape)
{
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i)
    {
        if (i)
            s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

std::size_t element_count(const Shape &shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), values_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values))
{
    if (values_.size() != element_count(shape_))
        throw ShapeError("Tensor of shape " + to_string(shape_) + " cannot hold " + std::to_string(values_.size()) +
                         " values.");
}

std::size_t Tensor::rows() const
{
    if (rank() != 2)
        throw ShapeError("Expected a matrix, got shape " + to_string(shape_) + ".");
    return shape_[0];
}

std::size_t Tensor::cols() const
{
    if (rank() != 2)
        throw ShapeError("Expected a matrix, got shape " + to_string(shape_) + ".");
    return shape_[1];
}

double Tensor::item() const
{
    if (values_.size() != 1)
        throw ShapeError("item() needs a single-element tensor, got shape " + to_string(shape_) + ".");
    return values_[0];
}

bool Tensor::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace
{
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;
} // namespace

Tensor matmul(const Tensor &a, const Tensor &b, bool transpose_a, bool transpose_b)
{
    const std::size_t ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    const std::size_t m = transpose_a ? ac : ar;
    const std::size_t k = transpose_a ? ar : ac;
    const std::size_t k2 = transpose_b ? bc : br;
    const std::size_t n = transpose_b ? br : bc;
    if (k != k2)
        throw ShapeError("matmul shape mismatch: " + to_string(a.shape()) + (transpose_a ? "^T" : "") + " x " +
                         to_string(b.shape()) + (transpose_b ? "^T" : "") + ".");

    Tensor c = Tensor::matrix(m, n);
    ConstMap ma(a.values().data(), static_cast<Eigen::Index>(ar), static_cast<Eigen::Index>(ac));
    ConstMap mb(b.values().data(), static_cast<Eigen::Index>(br), static_cast<Eigen::Index>(bc));
    MutMap mc(c.values().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    if (!transpose_a && !transpose_b)
        mc.noalias() = ma * mb;
    else if (transpose_a && !transpose_b)
        mc.noalias() = ma.transpose() * mb;
    else if (!transpose_a && transpose_b)
        mc.noalias() = ma * mb.transpose();
    else
        mc.noalias() = ma.transpose() * mb.transpose();
    return c;
}

} // namespace pdpgan::ad
