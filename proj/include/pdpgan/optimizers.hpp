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

#ifndef PDPGAN_OPTIMIZERS_HPP
#define PDPGAN_OPTIMIZERS_HPP

#include "pdpgan/tensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdpgan::train
{

enum class OptimizerKind
{
    sgd,
    adam
};

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string &name);

struct OptimizerConfig
{
    OptimizerKind kind = OptimizerKind::sgd;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.9;
    double eps = 1e-8;

    bool operator==(const OptimizerConfig &) const = default;
};

// Bias-corrected first/second moment estimates, one tensor per parameter.
struct AdamState
{
    std::vector<ad::Tensor> m;
    std::vector<ad::Tensor> v;
    std::uint64_t step = 0;

    static AdamState zeros_like(std::span<ad::Tensor *const> params);
    bool operator==(const AdamState &) const = default;
};

struct OptimizerState
{
    OptimizerKind kind = OptimizerKind::sgd;
    AdamState adam; // unused for SGD

    static OptimizerState fresh(OptimizerKind kind, std::span<ad::Tensor *const> params);
    bool operator==(const OptimizerState &) const = default;
};

// p <- p - lr * g
void sgd_step(std::span<ad::Tensor *const> params, std::span<const ad::Tensor> grads, double lr);

void adam_step(std::span<ad::Tensor *const> params, std::span<const ad::Tensor> grads, AdamState &state, double lr,
               double beta1, double beta2, double eps);

void apply_update(const OptimizerConfig &config, OptimizerState &state, std::span<ad::Tensor *const> params,
                  std::span<const ad::Tensor> grads);

} // namespace pdpgan::train

#endif
