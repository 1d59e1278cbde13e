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

#ifndef PDPGAN_GAN_HPP
#define PDPGAN_GAN_HPP

#include "pdpgan/autodiff.hpp"
#include "pdpgan/random.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pdpgan::gan
{

enum class Activation
{
    leaky_relu,
    sigmoid,
    linear
};

std::string to_string(Activation a);
Activation activation_from_string(const std::string &name);

// Dense stack description: input width followed by the output width of every layer.
// Hidden layers use `hidden`; the last layer uses `output`.
struct MlpSpec
{
    std::size_t input = 0;
    std::vector<std::size_t> widths;
    Activation hidden = Activation::leaky_relu;
    Activation output = Activation::linear;

    std::size_t output_width() const { return widths.empty() ? input : widths.back(); }
    std::size_t parameter_count() const;
    bool operator==(const MlpSpec &) const = default;
};

struct Architecture
{
    MlpSpec generator;
    MlpSpec discriminator;
    double leaky_slope = 0.2;

    std::size_t noise_dim() const { return generator.input; }
    std::size_t pdp_length() const { return generator.output_width(); }
    void validate() const;
    bool operator==(const Architecture &) const = default;

    // Generator 100 -> 128 -> 128 -> 128 -> 128 -> pdp_length (LeakyReLU x4, Sigmoid),
    // discriminator pdp_length -> 512 -> 256 -> 128 -> 64 -> 1 (LeakyReLU x4, linear).
    static Architecture paper_default(std::size_t pdp_length = 401);
    // Same topology with every hidden layer `width` wide.
    static Architecture uniform(std::size_t noise_dim, std::size_t width, std::size_t pdp_length);
};

// Human-readable differences between two architectures, one entry per differing layer/field.
std::vector<std::string> architecture_diff(const Architecture &expected, const Architecture &actual);

struct DenseLayer
{
    ad::Tensor weight; // [in x out]
    ad::Tensor bias;   // [1 x out]
    bool operator==(const DenseLayer &) const = default;
};

struct Mlp
{
    MlpSpec spec;
    std::vector<DenseLayer> layers;

    // Weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
    static Mlp initialize(const MlpSpec &spec, RandomStream &rng);
    static Mlp zeros(const MlpSpec &spec);

    std::size_t parameter_count() const;
    std::vector<ad::Tensor *> parameters();
    std::vector<const ad::Tensor *> parameters() const;
    bool operator==(const Mlp &) const = default;
};

struct GeneratorNet
{
    Mlp mlp;
    bool operator==(const GeneratorNet &) const = default;
};

struct DiscriminatorNet
{
    Mlp mlp;
    bool operator==(const DiscriminatorNet &) const = default;
};

struct NoiseSpec
{
    std::size_t dim = 100;
    double sigma = 1.0;
};

// Parameters of an Mlp placed on a tape, in layer order (weight, bias, weight, bias, ...).
struct BoundMlp
{
    const MlpSpec *spec = nullptr;
    double leaky_slope = 0.2;
    std::vector<ad::Var> params;
};

BoundMlp bind(ad::Tape &tape, const Mlp &mlp, double leaky_slope, bool trainable);

// Affine-then-activation per layer.
ad::Var forward(const BoundMlp &net, ad::Var x);

// Tape-free inference.
ad::Tensor generator_forward(const GeneratorNet &net, const ad::Tensor &z, double leaky_slope = 0.2);
ad::Tensor discriminator_forward(const DiscriminatorNet &net, const ad::Tensor &x, double leaky_slope = 0.2);

ad::Tensor sample_noise(const NoiseSpec &spec, std::size_t batch, RandomStream &rng);

// lambda * mean_i (||grad_x D(x_i)|| - 1)^2 with ||g|| = sqrt(sum g^2 + 1e-12). The returned node stays
// differentiable with respect to the critic parameters.
ad::Var grad_norm_penalty(const BoundMlp &critic, ad::Var x_tilde, double lambda);

inline constexpr double gradient_norm_eps = 1e-12;

struct Losses
{
    ad::Var d_loss;
    ad::Var g_loss;
};

// WGAN-GP losses, both to be minimized:
//   d_loss = mean D(G(z)) - mean D(x) + penalty at x~ = e x + (1 - e) G(z), e ~ U(0,1) per sample
//   g_loss = -mean D(G(z))
Losses wgan_gp_losses(const BoundMlp &generator, const BoundMlp &critic, const ad::Tensor &x_real, const ad::Tensor &z,
                      double lambda, RandomStream &rng);

// Critic-only half of wgan_gp_losses; the generated batch is taken as a constant.
ad::Var critic_loss(const BoundMlp &critic, ad::Var x_real, ad::Var x_fake, double lambda, RandomStream &rng);

} // namespace pdpgan::gan

#endif
