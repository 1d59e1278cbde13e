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

#include "pdpgan/optimizers.hpp"

#include <cmath>
#include <stdexcept>

namespace pdpgan::train
{

std::string to_string(OptimizerKind k)
{
    return k == OptimizerKind::adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_string(const std::string &name)
{
    if (name == "sgd")
        return OptimizerKind::sgd;
    if (name == "adam")
        return OptimizerKind::adam;
    throw std::invalid_argument("Unknown optimizer '" + name + "'.");
}

AdamState AdamState::zeros_like(std::span<ad::Tensor *const> params)
{
    AdamState s;
    for (const auto *p : params)
    {
        s.m.emplace_back(p->shape());
        s.v.emplace_back(p->shape());
    }
    return s;
}

OptimizerState OptimizerState::fresh(OptimizerKind kind, std::span<ad::Tensor *const> params)
{
    OptimizerState s;
    s.kind = kind;
    if (kind == OptimizerKind::adam)
        s.adam = AdamState::zeros_like(params);
    return s;
}

namespace
{
void check_shapes(std::span<ad::Tensor *const> params, std::span<const ad::Tensor> grads)
{
    if (params.size() != grads.size())
        throw ad::ShapeError("Optimizer got " + std::to_string(params.size()) + " parameters but " +
                             std::to_string(grads.size()) + " gradients.");
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        if (params[i]->shape() != grads[i].shape())
            throw ad::ShapeError("Parameter " + std::to_string(i) + " has shape " + ad::to_string(params[i]->shape()) +
                                 " but its gradient has shape " + ad::to_string(grads[i].shape()) + ".");
    }
}
} // namespace

void sgd_step(std::span<ad::Tensor *const> params, std::span<const ad::Tensor> grads, double lr)
{
    check_shapes(params, grads);
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        auto p = params[i]->values();
        auto g = grads[i].values();
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] -= lr * g[k];
    }
}

void adam_step(std::span<ad::Tensor *const> params, std::span<const ad::Tensor> grads, AdamState &state, double lr,
               double beta1, double beta2, double eps)
{
    check_shapes(params, grads);
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw ad::ShapeError("Adam state holds " + std::to_string(state.m.size()) + " moments for " +
                             std::to_string(params.size()) + " parameters.");
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        if (state.m[i].shape() != params[i]->shape() || state.v[i].shape() != params[i]->shape())
            throw ad::ShapeError("Adam moment " + std::to_string(i) + " does not match parameter shape " +
                                 ad::to_string(params[i]->shape()) + ".");
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        auto p = params[i]->values();
        auto g = grads[i].values();
        auto m = state.m[i].values();
        auto v = state.v[i].values();
        for (std::size_t k = 0; k < p.size(); ++k)
        {
            m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
            v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
            const double m_hat = m[k] / c1;
            const double v_hat = v[k] / c2;
            p[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

void apply_update(const OptimizerConfig &config, OptimizerState &state, std::span<ad::Tensor *const> params,
                  std::span<const ad::Tensor> grads)
{
    if (config.kind != state.kind)
        throw std::logic_error("Optimizer state kind does not match its configuration.");
    if (config.kind == OptimizerKind::sgd)
        sgd_step(params, grads, config.lr);
    else
        adam_step(params, grads, state.adam, config.lr, config.beta1, config.beta2, config.eps);
}

} // namespace pdpgan::train
