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

#include "pdpgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdpgan::gan
{

std::string to_string(Activation a)
{
    switch (a)
    {
    case Activation::leaky_relu:
        return "leaky_relu";
    case Activation::sigmoid:
        return "sigmoid";
    case Activation::linear:
        return "linear";
    }
    return "unknown";
}

Activation activation_from_string(const std::string &name)
{
    if (name == "leaky_relu")
        return Activation::leaky_relu;
    if (name == "sigmoid")
        return Activation::sigmoid;
    if (name == "linear")
        return Activation::linear;
    throw std::invalid_argument("Unknown activation '" + name + "'.");
}

std::size_t MlpSpec::parameter_count() const
{
    std::size_t n = 0;
    std::size_t in = input;
    for (std::size_t w : widths)
    {
        n += in * w + w;
        in = w;
    }
    return n;
}

void Architecture::validate() const
{
    if (generator.input == 0 || generator.widths.empty() || discriminator.widths.empty())
        throw std::invalid_argument("Architecture has an empty network.");
    if (discriminator.input != generator.output_width())
        throw std::invalid_argument("Discriminator input width " + std::to_string(discriminator.input) +
                                    " differs from generator output width " +
                                    std::to_string(generator.output_width()) + ".");
    if (discriminator.output_width() != 1)
        throw std::invalid_argument("Discriminator must emit one score per sample.");
    if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
        throw std::invalid_argument("LeakyReLU slope must lie in [0, 1).");
}

Architecture Architecture::paper_default(std::size_t pdp_length)
{
    Architecture a;
    a.generator = {100, {128, 128, 128, 128, pdp_length}, Activation::leaky_relu, Activation::sigmoid};
    a.discriminator = {pdp_length, {512, 256, 128, 64, 1}, Activation::leaky_relu, Activation::linear};
    return a;
}

Architecture Architecture::uniform(std::size_t noise_dim, std::size_t width, std::size_t pdp_length)
{
    Architecture a;
    a.generator = {noise_dim, {width, width, width, width, pdp_length}, Activation::leaky_relu, Activation::sigmoid};
    a.discriminator = {pdp_length, {width, width, width, width, 1}, Activation::leaky_relu, Activation::linear};
    return a;
}

namespace
{
std::string widths_string(const MlpSpec &s)
{
    std::string out = std::to_string(s.input);
    for (auto w : s.widths)
        out += "->" + std::to_string(w);
    return out;
}

void diff_mlp(const std::string &name, const MlpSpec &e, const MlpSpec &a, std::vector<std::string> &out)
{
    if (e.input != a.input)
        out.push_back(name + ".input: expected " + std::to_string(e.input) + ", got " + std::to_string(a.input));
    const std::size_t n = std::max(e.widths.size(), a.widths.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto ew = i < e.widths.size() ? std::to_string(e.widths[i]) : std::string("absent");
        const auto aw = i < a.widths.size() ? std::to_string(a.widths[i]) : std::string("absent");
        if (ew != aw)
            out.push_back(name + ".layer" + std::to_string(i) + ": expected width " + ew + ", got " + aw);
    }
    if (e.hidden != a.hidden)
        out.push_back(name + ".hidden_activation: expected " + to_string(e.hidden) + ", got " + to_string(a.hidden));
    if (e.output != a.output)
        out.push_back(name + ".output_activation: expected " + to_string(e.output) + ", got " + to_string(a.output));
    if (!out.empty() && e.widths != a.widths)
        out.push_back(name + ": expected " + widths_string(e) + ", got " + widths_string(a));
}
} // namespace

std::vector<std::string> architecture_diff(const Architecture &expected, const Architecture &actual)
{
    std::vector<std::string> out;
    diff_mlp("generator", expected.generator, actual.generator, out);
    std::vector<std::string> d;
    diff_mlp("discriminator", expected.discriminator, actual.discriminator, d);
    out.insert(out.end(), d.begin(), d.end());
    if (expected.leaky_slope != actual.leaky_slope)
        out.push_back("leaky_slope: expected " + std::to_string(expected.leaky_slope) + ", got " +
                      std::to_string(actual.leaky_slope));
    return out;
}

Mlp Mlp::zeros(const MlpSpec &spec)
{
    Mlp m;
    m.spec = spec;
    std::size_t in = spec.input;
    for (std::size_t w : spec.widths)
    {
        m.layers.push_back({ad::Tensor::matrix(in, w), ad::Tensor::matrix(1, w)});
        in = w;
    }
    return m;
}

Mlp Mlp::initialize(const MlpSpec &spec, RandomStream &rng)
{
    Mlp m = zeros(spec);
    for (auto &layer : m.layers)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.rows()));
        for (double &w : layer.weight.values())
            w = rng.uniform(-bound, bound);
    }
    return m;
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (const auto &l : layers)
        n += l.weight.size() + l.bias.size();
    return n;
}

std::vector<ad::Tensor *> Mlp::parameters()
{
    std::vector<ad::Tensor *> out;
    for (auto &l : layers)
    {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<const ad::Tensor *> Mlp::parameters() const
{
    std::vector<const ad::Tensor *> out;
    for (const auto &l : layers)
    {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

BoundMlp bind(ad::Tape &tape, const Mlp &mlp, double leaky_slope, bool trainable)
{
    BoundMlp b;
    b.spec = &mlp.spec;
    b.leaky_slope = leaky_slope;
    for (const auto *p : mlp.parameters())
        b.params.push_back(trainable ? tape.variable(*p) : tape.constant(*p));
    return b;
}

namespace
{
ad::Var activate(ad::Var x, Activation a, double slope)
{
    switch (a)
    {
    case Activation::leaky_relu:
        return ad::leaky_relu(x, slope);
    case Activation::sigmoid:
        return ad::sigmoid(x);
    case Activation::linear:
        return x;
    }
    return x;
}

void activate_inplace(ad::Tensor &t, Activation a, double slope)
{
    for (double &v : t.values())
    {
        if (a == Activation::leaky_relu)
            v = ad::leaky_relu(v, slope);
        else if (a == Activation::sigmoid)
            v = ad::sigmoid(v);
    }
}

ad::Tensor mlp_forward(const Mlp &mlp, const ad::Tensor &x, double slope)
{
    if (x.cols() != mlp.spec.input)
        throw ad::ShapeError("Network expects input width " + std::to_string(mlp.spec.input) + ", got " +
                             std::to_string(x.cols()) + ".");
    ad::Tensor h = x;
    for (std::size_t i = 0; i < mlp.layers.size(); ++i)
    {
        const auto &layer = mlp.layers[i];
        ad::Tensor next = ad::matmul(h, layer.weight);
        for (std::size_t r = 0; r < next.rows(); ++r)
            for (std::size_t c = 0; c < next.cols(); ++c)
                next(r, c) += layer.bias[c];
        activate_inplace(next, i + 1 == mlp.layers.size() ? mlp.spec.output : mlp.spec.hidden, slope);
        h = std::move(next);
    }
    return h;
}
} // namespace

ad::Var forward(const BoundMlp &net, ad::Var x)
{
    if (x.value().cols() != net.spec->input)
        throw ad::ShapeError("Network expects input width " + std::to_string(net.spec->input) + ", got " +
                             std::to_string(x.value().cols()) + ".");
    const std::size_t layers = net.params.size() / 2;
    ad::Var h = x;
    for (std::size_t i = 0; i < layers; ++i)
    {
        h = ad::add_bias(ad::matmul(h, net.params[2 * i]), net.params[2 * i + 1]);
        h = activate(h, i + 1 == layers ? net.spec->output : net.spec->hidden, net.leaky_slope);
    }
    return h;
}

ad::Tensor generator_forward(const GeneratorNet &net, const ad::Tensor &z, double leaky_slope)
{
    return mlp_forward(net.mlp, z, leaky_slope);
}

ad::Tensor discriminator_forward(const DiscriminatorNet &net, const ad::Tensor &x, double leaky_slope)
{
    return mlp_forward(net.mlp, x, leaky_slope);
}

ad::Tensor sample_noise(const NoiseSpec &spec, std::size_t batch, RandomStream &rng)
{
    if (batch < 1)
        throw std::invalid_argument("Noise batch must be >= 1.");
    if (spec.dim < 1 || !(spec.sigma > 0.0))
        throw std::invalid_argument("Noise spec needs dim >= 1 and sigma > 0.");
    ad::Tensor z = ad::Tensor::matrix(batch, spec.dim);
    for (double &v : z.values())
        v = rng.normal(0.0, spec.sigma);
    return z;
}

ad::Var grad_norm_penalty(const BoundMlp &critic, ad::Var x_tilde, double lambda)
{
    ad::Tape &tape = *x_tilde.tape();
    if (!x_tilde.requires_grad())
        x_tilde = tape.variable(x_tilde.value());
    const ad::Var scores = forward(critic, x_tilde);
    const ad::Var x_list[] = {x_tilde};
    // Rows are independent samples, so d(sum D)/dx row i is the gradient of D at sample i.
    const ad::Var g = tape.grad(ad::sum(scores), x_list, true)[0];
    const ad::Var deviation = ad::affine(ad::l2_norm_rows(g, gradient_norm_eps), 1.0, -1.0);
    return ad::scalar_mul(ad::mean(ad::square(deviation)), lambda);
}

namespace
{
ad::Tensor interpolation_weights(std::size_t batch, std::size_t width, RandomStream &rng)
{
    ad::Tensor eps = ad::Tensor::matrix(batch, width);
    for (std::size_t i = 0; i < batch; ++i)
    {
        const double e = rng.uniform();
        for (std::size_t j = 0; j < width; ++j)
            eps(i, j) = e;
    }
    return eps;
}

ad::Tensor one_minus(const ad::Tensor &t)
{
    ad::Tensor out = t;
    for (double &v : out.values())
        v = 1.0 - v;
    return out;
}
} // namespace

ad::Var critic_loss(const BoundMlp &critic, ad::Var x_real, ad::Var x_fake, double lambda, RandomStream &rng)
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("Gradient penalty coefficient must be >= 0.");
    if (x_real.shape() != x_fake.shape())
        throw ad::ShapeError("Real batch " + ad::to_string(x_real.shape()) + " and generated batch " +
                             ad::to_string(x_fake.shape()) + " differ.");
    const auto eps = interpolation_weights(x_real.value().rows(), x_real.value().cols(), rng);
    const ad::Var x_tilde = ad::mul_const(x_real, eps) + ad::mul_const(x_fake, one_minus(eps));
    const ad::Var wasserstein = ad::mean(forward(critic, x_fake)) - ad::mean(forward(critic, x_real));
    return wasserstein + grad_norm_penalty(critic, x_tilde, lambda);
}

Losses wgan_gp_losses(const BoundMlp &generator, const BoundMlp &critic, const ad::Tensor &x_real, const ad::Tensor &z,
                      double lambda, RandomStream &rng)
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("Gradient penalty coefficient must be >= 0.");
    if (x_real.rows() != z.rows())
        throw ad::ShapeError("Real batch has " + std::to_string(x_real.rows()) + " rows but noise batch has " +
                             std::to_string(z.rows()) + ".");
    ad::Tape &tape = *critic.params.front().tape();
    const ad::Var real = tape.constant(x_real);
    const ad::Var fake = forward(generator, tape.constant(z));
    Losses out;
    out.d_loss = critic_loss(critic, real, fake, lambda, rng);
    out.g_loss = ad::scalar_mul(ad::mean(forward(critic, fake)), -1.0);
    return out;
}

} // namespace pdpgan::gan
