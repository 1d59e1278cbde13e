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

#include "catch2/catch_amalgamated.hpp"

#include "support/gradcheck.hpp"

#include "pdpgan/checkpoint.hpp"
#include "pdpgan/gan.hpp"

#include <cmath>

using namespace pdpgan;
using ad::Tape;
using ad::Tensor;
using ad::Var;

TEST_CASE("Architecture - default widths and parameter counts")
{
    const auto a = gan::Architecture::paper_default();
    CHECK(a.noise_dim() == 100);
    CHECK(a.pdp_length() == 401);
    CHECK(a.generator.widths == std::vector<std::size_t>{128, 128, 128, 128, 401});
    CHECK(a.discriminator.widths == std::vector<std::size_t>{512, 256, 128, 64, 1});
    CHECK(a.generator.hidden == gan::Activation::leaky_relu);
    CHECK(a.generator.output == gan::Activation::sigmoid);
    CHECK(a.discriminator.output == gan::Activation::linear);
    CHECK(a.leaky_slope == 0.2);
    CHECK(a.generator.parameter_count() == 114193);
    CHECK(a.discriminator.parameter_count() == 378369);
    CHECK_NOTHROW(a.validate());

    auto bad = a;
    bad.discriminator.input = 400;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = a;
    bad.discriminator.widths.back() = 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Architecture diff names the differing layers")
{
    const auto a = gan::Architecture::paper_default();
    CHECK(gan::architecture_diff(a, a).empty());
    auto b = a;
    b.generator.widths[2] = 64;
    const auto d = gan::architecture_diff(a, b);
    REQUIRE_FALSE(d.empty());
    CHECK(d.front().find("generator.layer2") != std::string::npos);
    CHECK(d.front().find("128") != std::string::npos);
    CHECK(d.front().find("64") != std::string::npos);
}

TEST_CASE("Initialization - uniform fan-in bound, zero bias, seeded")
{
    RandomStream r1(5), r2(5);
    const auto spec = gan::Architecture::paper_default().discriminator;
    const auto m1 = gan::Mlp::initialize(spec, r1), m2 = gan::Mlp::initialize(spec, r2);
    CHECK(m1 == m2);
    CHECK(m1.parameter_count() == spec.parameter_count());
    for (const auto &l : m1.layers)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.rows()));
        double lo = 1.0, hi = -1.0;
        for (double w : l.weight.values())
        {
            REQUIRE(std::abs(w) <= bound);
            lo = std::min(lo, w / bound);
            hi = std::max(hi, w / bound);
        }
        for (double b : l.bias.values())
            REQUIRE(b == 0.0);
        if (l.weight.size() > 100)
        {
            CHECK(lo < -0.9);
            CHECK(hi > 0.9);
        }
    }
}

TEST_CASE("Forward pass matches the loop oracle")
{
    RandomStream rng(8);
    const auto arch = gan::Architecture::uniform(6, 9, 12);
    gan::GeneratorNet g{gan::Mlp::initialize(arch.generator, rng)};
    gan::DiscriminatorNet d{gan::Mlp::initialize(arch.discriminator, rng)};
    for (auto *p : g.mlp.parameters())
        for (double &v : p->values())
            v += rng.uniform(-0.1, 0.1); // nonzero biases
    const Tensor z = gan::sample_noise({6, 1.0}, 5, rng);
    const Tensor x = gan::generator_forward(g, z, 0.2);
    const auto want = oracle::mlp_forward(g.mlp, z, 0.2).output;
    REQUIRE(x.shape() == want.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        REQUIRE(std::abs(x[i] - want[i]) <= 1e-13);
        REQUIRE((x[i] > 0.0 && x[i] < 1.0));
    }
    const Tensor s = gan::discriminator_forward(d, x, 0.2);
    const auto sw = oracle::mlp_forward(d.mlp, x, 0.2).output;
    CHECK(s.shape() == ad::Shape{5, 1});
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(s[i] - sw[i]) <= 1e-13);

    // The tape-based forward agrees with the tape-free one.
    Tape tape;
    const auto bound = gan::bind(tape, g.mlp, 0.2, false);
    const Var out = gan::forward(bound, tape.constant(z));
    CHECK(out.value() == x);

    CHECK_THROWS_AS(gan::generator_forward(g, Tensor::matrix(2, 7), 0.2), ad::ShapeError);
}

TEST_CASE("Noise sampling")
{
    RandomStream a(3), b(3);
    const Tensor z1 = gan::sample_noise({100, 1.0}, 2000, a);
    CHECK(z1 == gan::sample_noise({100, 1.0}, 2000, b));
    double m = 0.0, s = 0.0;
    for (double v : z1.values())
        m += v;
    m /= static_cast<double>(z1.size());
    for (double v : z1.values())
        s += (v - m) * (v - m);
    s = std::sqrt(s / static_cast<double>(z1.size()));
    CHECK(std::abs(m) < 0.01);
    CHECK(s == Catch::Approx(1.0).epsilon(0.01));
    CHECK_THROWS_AS(gan::sample_noise({100, 1.0}, 0, a), std::invalid_argument);
}

TEST_CASE("Gradient penalty - linear critic closed form")
{
    // D(x) = x w + b: grad_x D = w for every sample.
    RandomStream rng(4);
    for (int trial = 0; trial < 20; ++trial)
    {
        gan::MlpSpec spec{5, {1}, gan::Activation::leaky_relu, gan::Activation::linear};
        auto mlp = gan::Mlp::initialize(spec, rng);
        for (double &v : mlp.layers[0].weight.values())
            v = rng.uniform(-2.0, 2.0);
        const auto &w = mlp.layers[0].weight;
        double norm = 0.0;
        for (double v : w.values())
            norm += v * v;
        norm = std::sqrt(norm);
        const double lambda = 10.0;

        Tape tape;
        const auto critic = gan::bind(tape, mlp, 0.2, true);
        const Var x = tape.constant(oracle::random_tensor(7, 5, rng));
        const Var p = gan::grad_norm_penalty(critic, x, lambda);
        CHECK(p.value().item() == Catch::Approx(lambda * (norm - 1) * (norm - 1)).epsilon(1e-10));
        const auto g = tape.gradients(p, critic.params);
        for (std::size_t i = 0; i < w.size(); ++i)
            CHECK(std::abs(g[0][i] - 2.0 * lambda * (norm - 1.0) * w[i] / norm) <= 1e-8);
        CHECK(g[1][0] == 0.0);
    }
}

TEST_CASE("WGAN-GP losses - assembly and signs")
{
    RandomStream rng(6);
    const auto arch = gan::Architecture::uniform(4, 8, 10);
    const auto g = gan::Mlp::initialize(arch.generator, rng);
    const auto d = gan::Mlp::initialize(arch.discriminator, rng);
    const Tensor real = oracle::random_tensor(6, 10, rng, 0.0, 1.0);
    const Tensor z = gan::sample_noise({4, 1.0}, 6, rng);

    Tape tape;
    const auto gb = gan::bind(tape, g, 0.2, true);
    const auto db = gan::bind(tape, d, 0.2, true);
    RandomStream eps_a(1), eps_b(1);
    const auto losses = gan::wgan_gp_losses(gb, db, real, z, 10.0, eps_a);

    // Recompute from oracle forwards: fake, scores and the penalty at the same interpolates.
    const Tensor fake = oracle::mlp_forward(g, z, 0.2).output;
    const Tensor s_fake = oracle::mlp_forward(d, fake, 0.2).output;
    const Tensor s_real = oracle::mlp_forward(d, real, 0.2).output;
    double mf = 0.0, mr = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        mf += s_fake[i] / 6.0, mr += s_real[i] / 6.0;
    CHECK(losses.g_loss.value().item() == Catch::Approx(-mf).epsilon(1e-12));

    Tape t2;
    const auto db2 = gan::bind(t2, d, 0.2, false);
    Tensor xt = real;
    for (std::size_t i = 0; i < 6; ++i)
    {
        const double e = eps_b.uniform();
        for (std::size_t j = 0; j < 10; ++j)
            xt(i, j) = e * real(i, j) + (1.0 - e) * fake(i, j);
    }
    const double penalty = gan::grad_norm_penalty(db2, t2.constant(xt), 10.0).value().item();
    CHECK(losses.d_loss.value().item() == Catch::Approx(mf - mr + penalty).epsilon(1e-12));
    CHECK(penalty >= 0.0);

    CHECK_THROWS_AS(gan::wgan_gp_losses(gb, db, real, z, -1.0, eps_a), std::invalid_argument);
    CHECK_THROWS_AS(gan::wgan_gp_losses(gb, db, real, gan::sample_noise({4, 1.0}, 5, rng), 10.0, eps_a),
                    ad::ShapeError);
}

TEST_CASE("Critic loss gradient matches finite differences")
{
    RandomStream rng(12);
    const auto arch = gan::Architecture::uniform(4, 6, 8);
    auto d = gan::Mlp::initialize(arch.discriminator, rng);
    for (int trial = 0; trial < 5; ++trial)
    {
        // Central differences straddling a LeakyReLU kink are meaningless; redraw those batches.
        Tensor real, fake;
        std::uint64_t eps_seed = 0;
        for (;;)
        {
            real = oracle::random_tensor(4, 8, rng, 0.0, 1.0);
            fake = oracle::random_tensor(4, 8, rng, 0.0, 1.0);
            eps_seed = rng.below(1000);
            RandomStream eps(eps_seed);
            Tensor mixed = real;
            for (std::size_t i = 0; i < 4; ++i)
            {
                const double e = eps.uniform();
                for (std::size_t j = 0; j < 8; ++j)
                    mixed(i, j) = e * real(i, j) + (1.0 - e) * fake(i, j);
            }
            double margin = 1.0;
            for (const Tensor *x : {&real, &fake, &mixed})
                margin = std::min(margin, oracle::mlp_forward(d, *x, 0.2).min_abs_preactivation);
            if (margin > 1e-4)
                break;
        }
        const auto params = oracle::get_parameters(d);
        auto f = [&](Tape &tape, const std::vector<Var> &v) {
            gan::BoundMlp b{&d.spec, 0.2, v};
            RandomStream eps(eps_seed);
            return gan::critic_loss(b, tape.constant(real), tape.constant(fake), 10.0, eps);
        };
        const auto r = oracle::check_gradient(f, params);
        INFO(oracle::describe(r));
        CHECK(r.max_rel_error < 1e-5);
    }
}
