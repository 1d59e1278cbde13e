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


// Acceptance runner: `pdpgan_acceptance <A1..A9 | all>` prints one PASS/FAIL line per criterion.

#include "support/gradcheck.hpp"

#include "pdpgan/checkpoint.hpp"
#include "pdpgan/evaluation.hpp"
#include "pdpgan/file_util.hpp"
#include "pdpgan/pipeline.hpp"
#include "pdpgan/synthetic_channel.hpp"
#include "pdpgan/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <thread>

using namespace pdpgan;
using ad::Tape;
using ad::Tensor;
using ad::Var;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

// Runs body(i) for i in [0, n) on up to hardware_concurrency threads. Results do not depend on
// the thread count.
template <class T> std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)> &body)
{
    std::vector<T> out(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                out[i] = body(i);
        });
    for (auto &t : pool)
        t.join();
    return out;
}

// ---------------------------------------------------------------- A1

struct OpCase
{
    const char *name;
    oracle::ScalarFn fn;
    std::vector<Tensor> inputs;
};

std::vector<OpCase> op_cases(RandomStream &rng)
{
    using oracle::random_tensor;
    const Tensor w = random_tensor(3, 4, rng);
    auto weighted = [w](Var v) { return ad::sum(ad::mul_const(v, w)); };
    const Tensor a = random_tensor(3, 4, rng), b = random_tensor(3, 4, rng);
    const Tensor pos = random_tensor(3, 4, rng, 0.5, 2.0);
    Tensor off_kink = random_tensor(3, 4, rng);
    for (double &v : off_kink.values())
        if (std::abs(v) < 1e-3)
            v = 0.5;
    const Tensor k = random_tensor(4, 5, rng), row = random_tensor(1, 4, rng), col = random_tensor(3, 1, rng);
    const Tensor s = Tensor::scalar(rng.uniform(-1.0, 1.0));
    return {
        {"matmul", [](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::matmul(v[0], v[1]))); }, {a, k}},
        {"matmul_ta",
         [](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::matmul(v[0], v[1], true, false))); },
         {a, b}},
        {"matmul_tb",
         [](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::matmul(v[0], v[1], false, true))); },
         {a, b}},
        {"add", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(v[0] + v[1])); }, {a, b}},
        {"sub", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(v[0] - v[1])); }, {a, b}},
        {"mul", [=](Tape &, const std::vector<Var> &v) { return weighted(v[0] * v[1]); }, {a, b}},
        {"div", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::div(v[0], v[1])); }, {a, pos}},
        {"scalar_mul", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(ad::scalar_mul(v[0], -2.5))); },
         {a}},
        {"affine", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(ad::affine(v[0], -1.7, 0.3))); },
         {a}},
        {"mul_const", [=](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::mul_const(v[0], w))); }, {a}},
        {"sum", [](Tape &, const std::vector<Var> &v) { return ad::square(ad::sum(v[0])); }, {a}},
        {"mean", [](Tape &, const std::vector<Var> &v) { return ad::mean(ad::square(v[0])); }, {a}},
        {"square", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(v[0])); }, {a}},
        {"sqrt", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::sqrt(v[0])); }, {pos}},
        {"leaky_relu", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::leaky_relu(v[0], 0.2)); }, {off_kink}},
        {"sigmoid", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::sigmoid(v[0])); }, {a}},
        {"sum_rows", [](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::sum_rows(v[0]))); }, {a}},
        {"sum_cols", [](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::sum_cols(v[0]))); }, {a}},
        {"broadcast_rows",
         [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(ad::broadcast_rows(v[0], 3))); }, {row}},
        {"broadcast_cols",
         [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(ad::broadcast_cols(v[0], 4))); }, {col}},
        {"broadcast_scalar",
         [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(ad::broadcast_scalar(v[0], {3, 4}))); },
         {s}},
        {"add_bias", [=](Tape &, const std::vector<Var> &v) { return weighted(ad::square(ad::add_bias(v[0], v[1]))); },
         {a, row}},
        {"l2_norm_rows",
         [](Tape &, const std::vector<Var> &v) { return ad::sum(ad::square(ad::l2_norm_rows(v[0], 1e-12))); }, {a}},
    };
}

// Smallest |pre-activation| over every LeakyReLU the WGAN-GP losses evaluate.
double loss_kink_margin(const gan::Mlp &g, const gan::Mlp &d, const Tensor &real, const Tensor &z,
                        std::uint64_t eps_seed)
{
    const auto fake = oracle::mlp_forward(g, z, 0.2);
    double m = fake.min_abs_preactivation;
    m = std::min(m, oracle::mlp_forward(d, real, 0.2).min_abs_preactivation);
    m = std::min(m, oracle::mlp_forward(d, fake.output, 0.2).min_abs_preactivation);
    RandomStream eps(eps_seed);
    Tensor xt = real;
    for (std::size_t i = 0; i < real.rows(); ++i)
    {
        const double e = eps.uniform();
        for (std::size_t j = 0; j < real.cols(); ++j)
            xt(i, j) = e * real(i, j) + (1.0 - e) * fake.output(i, j);
    }
    return std::min(m, oracle::mlp_forward(d, xt, 0.2).min_abs_preactivation);
}

constexpr double kink_margin = 1e-4;

Outcome a1()
{
    const auto arch = gan::Architecture::uniform(8, 8, 16);
    double worst = 0.0;
    std::string worst_where;
    std::size_t redraws = 0, checks = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial)
    {
        RandomStream rng(trial);
        for (const auto &c : op_cases(rng))
        {
            const auto r = oracle::check_gradient(c.fn, c.inputs);
            ++checks;
            if (r.max_rel_error > worst)
                worst = r.max_rel_error, worst_where = fmt("trial %llu op %s", (unsigned long long)trial, c.name);
        }

        gan::Mlp g, d;
        Tensor real, z;
        std::uint64_t eps_seed = 0;
        for (;;)
        {
            g = gan::Mlp::initialize(arch.generator, rng);
            d = gan::Mlp::initialize(arch.discriminator, rng);
            for (auto *p : g.parameters())
                for (double &v : p->values())
                    v += rng.uniform(-0.1, 0.1);
            for (auto *p : d.parameters())
                for (double &v : p->values())
                    v += rng.uniform(-0.1, 0.1);
            real = oracle::random_tensor(4, 16, rng, 0.0, 1.0);
            z = gan::sample_noise({8, 1.0}, 4, rng);
            eps_seed = rng.below(1u << 30);
            if (loss_kink_margin(g, d, real, z, eps_seed) >= kink_margin)
                break;
            ++redraws;
        }
        std::vector<Tensor> inputs = oracle::get_parameters(g);
        const std::size_t ng = inputs.size();
        for (auto &t : oracle::get_parameters(d))
            inputs.push_back(t);
        for (int which = 0; which < 2; ++which)
        {
            auto f = [&, which](Tape &, const std::vector<Var> &v) {
                gan::BoundMlp gb{&g.spec, 0.2, {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ng)}};
                gan::BoundMlp db{&d.spec, 0.2, {v.begin() + static_cast<std::ptrdiff_t>(ng), v.end()}};
                RandomStream eps(eps_seed);
                const auto l = gan::wgan_gp_losses(gb, db, real, z, 10.0, eps);
                return which == 0 ? l.d_loss : l.g_loss;
            };
            const auto r = oracle::check_gradient(f, inputs);
            ++checks;
            if (r.max_rel_error > worst)
                worst = r.max_rel_error,
                worst_where = fmt("trial %llu %s", (unsigned long long)trial, which == 0 ? "d_loss" : "g_loss");
        }
    }
    return {worst < 1e-5, fmt("max rel err %.3e (%s) over %zu checks, 100 trials, %zu kink redraws", worst,
                              worst_where.c_str(), checks, redraws)};
}

// ---------------------------------------------------------------- A2

Outcome a2()
{
    RandomStream rng(2);
    double worst_value = 0.0, worst_grad = 0.0, worst_second = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        gan::MlpSpec spec{16, {1}, gan::Activation::leaky_relu, gan::Activation::linear};
        auto mlp = gan::Mlp::initialize(spec, rng);
        for (double &v : mlp.layers[0].weight.values())
            v = rng.uniform(-1.0, 1.0);
        const auto &w = mlp.layers[0].weight;
        double norm = 0.0;
        for (double v : w.values())
            norm += v * v;
        norm = std::sqrt(norm);
        const double lambda = 10.0;
        Tape tape;
        const auto critic = gan::bind(tape, mlp, 0.2, true);
        const Var x = tape.constant(oracle::random_tensor(8, 16, rng));
        const Var p = gan::grad_norm_penalty(critic, x, lambda);
        worst_value = std::max(worst_value, std::abs(p.value().item() - lambda * (norm - 1) * (norm - 1)));
        const auto g = tape.gradients(p, critic.params);
        for (std::size_t i = 0; i < w.size(); ++i)
            worst_grad = std::max(worst_grad, std::abs(g[0][i] - 2.0 * lambda * (norm - 1.0) * w[i] / norm));
        worst_grad = std::max(worst_grad, std::abs(g[1][0]));
    }
    for (int trial = 0; trial < 20; ++trial)
    {
        gan::MlpSpec spec{6, {5, 1}, gan::Activation::leaky_relu, gan::Activation::linear};
        gan::Mlp mlp;
        Tensor x;
        do
        {
            mlp = gan::Mlp::initialize(spec, rng);
            for (auto *p : mlp.parameters())
                for (double &v : p->values())
                    v += rng.uniform(-0.2, 0.2);
            x = oracle::random_tensor(4, 6, rng);
        } while (oracle::mlp_forward(mlp, x, 0.2).min_abs_preactivation < kink_margin);
        auto f = [&](Tape &tape, const std::vector<Var> &v) {
            gan::BoundMlp b{&mlp.spec, 0.2, v};
            return gan::grad_norm_penalty(b, tape.constant(x), 10.0);
        };
        worst_second = std::max(worst_second, oracle::check_gradient(f, oracle::get_parameters(mlp)).max_rel_error);
    }
    return {worst_value <= 1e-8 && worst_grad <= 1e-8 && worst_second < 1e-4,
            fmt("penalty err %.2e, gradient err %.2e (100 linear critics); second-order rel err %.2e (20 nets)",
                worst_value, worst_grad, worst_second)};
}

// ---------------------------------------------------------------- A3

Outcome a3()
{
    // Equal powers at bins 0 and 10 on a 1 ns grid.
    channel::Pdp two;
    two.grid = {401, 1e-9};
    two.powers.assign(401, 0.0);
    two.powers[0] = two.powers[10] = 1.0;
    const double oracle_ns = std::sqrt(((0.0 - 5.0) * (0.0 - 5.0) + (10.0 - 5.0) * (10.0 - 5.0)) / 2.0);
    const double spread_err = std::abs(channel::rms_delay_spread(two) / 1e-9 - oracle_ns);

    // Paths on the IDFT grid: the band-limited PDP reproduces the nearest-bin PDP.
    RandomStream rng(3);
    double ctf_err = 0.0, norm_err = 0.0;
    for (int trial = 0; trial < 20; ++trial)
    {
        const double df = 2.5e6;
        const std::size_t k = 401;
        const double dt = 1.0 / (static_cast<double>(k) * df);
        channel::Cir cir;
        cir.grid = {k, dt};
        const std::size_t n_paths = 1 + rng.below(8);
        for (std::size_t i = 0; i < n_paths; ++i)
            cir.paths.push_back({static_cast<double>(i == 0 ? 0 : 1 + rng.below(300)) * dt, rng.uniform(0.05, 1.0),
                                 rng.uniform(0.0, 6.283185307179586)});
        // Distinct bins keep the coherent sum and the IDFT in agreement.
        std::sort(cir.paths.begin(), cir.paths.end(), [](auto &a, auto &b) { return a.delay < b.delay; });
        cir.paths.erase(std::unique(cir.paths.begin(), cir.paths.end(),
                                    [](auto &a, auto &b) { return a.delay == b.delay; }),
                        cir.paths.end());
        const auto direct = channel::cir_to_pdp(cir);
        const auto ctf = channel::synthesize_ctf(cir.paths, 314e9, df, k);
        const auto via = channel::ctf_to_pdp(ctf, 314e9, (k - 1) * df);
        const double peak = *std::max_element(direct.powers.begin(), direct.powers.end());
        for (std::size_t i = 0; i < k; ++i)
            ctf_err = std::max(ctf_err, std::abs(via.powers[i] - direct.powers[i]) / peak);

        auto [n, params] = channel::minmax_normalize(direct);
        const auto back = channel::denormalize(n, params);
        for (std::size_t i = 0; i < k; ++i)
            norm_err = std::max(norm_err, std::abs(back.powers[i] - direct.powers[i]));
    }
    return {spread_err <= 1e-12 && ctf_err <= 1e-9 && norm_err <= 1e-12,
            fmt("two-path spread err %.2e ns; CTF->PDP rel err %.2e; normalization err %.2e", spread_err, ctf_err,
                norm_err)};
}

// ---------------------------------------------------------------- shared desk setup for A4, A6, A7

synth::StochasticChannelParams desk_params(double power_decay)
{
    synth::StochasticChannelParams p;
    p.num_paths_mean = 20;
    p.delay_rate = 0.25e9;
    p.power_decay = power_decay;
    p.shadow_sigma_db = 4.0;
    p.max_delay = 120e-9;
    p.label = "desk";
    return p;
}

constexpr channel::DelayGrid desk_grid{64, 2e-9};

synth::GeneratedDataset desk_source(std::size_t seed)
{
    synth::DatasetSpec spec;
    spec.grid = desk_grid;
    spec.count = 2000;
    spec.rng_seed = 100 + seed;
    spec.params = desk_params(20e-9);
    return synth::generate_dataset(spec);
}

train::TrainConfig desk_config(std::size_t epochs, std::uint64_t seed)
{
    train::TrainConfig c;
    c.architecture = gan::Architecture::uniform(100, 64, 64);
    c.epochs = epochs;
    c.batch = {train::BatchSize::Kind::fixed, 64};
    c.seed = seed;
    return c;
}

fs::path cache_path(std::size_t seed)
{
    return fs::path(PDPGAN_ACCEPTANCE_CACHE) / ("a6_seed" + std::to_string(seed) + ".ckpt");
}

// A6 model for one seed. A6 always trains and refreshes the cache; A7 reads the cache when it
// holds exactly this run.
gan::Checkpoint desk_pretrained(std::size_t seed, const std::vector<channel::Pdp> &data, bool use_cache)
{
    const auto config = desk_config(2000, 1000 + seed);
    const auto path = cache_path(seed);
    if (use_cache && fs::exists(path))
    {
        try
        {
            auto c = gan::load_checkpoint(path);
            if (c.epoch == config.epochs && c.config_fingerprint == config.fingerprint())
                return c;
        }
        catch (const gan::CheckpointError &)
        {
        }
    }
    auto c = train::train(config, data).checkpoint;
    fs::create_directories(path.parent_path());
    gan::save_checkpoint(c, path);
    return c;
}

// ---------------------------------------------------------------- A4

Outcome a4()
{
    const fs::path manifest_path = fs::path(PDPGAN_SOURCE_DIR) / "configs" / "desk.json";
    const auto m = pipeline::load_manifest(manifest_path);
    const fs::path base = fs::path(PDPGAN_ACCEPTANCE_CACHE) / "a4";
    fs::remove_all(base);
    const auto r1 = pipeline::run_pipeline(m, base / "run1");
    const auto r2 = pipeline::run_pipeline(m, base / "run2");
    std::vector<std::string> differing;
    for (const char *f : {"source.bin", "pretrain.ckpt", "finetune.ckpt", "generated.csv", "generated.csv.json",
                          "eval/report.json", "eval/average_pdp.csv", "eval/ssim_cdf.csv", "eval/delay_spread_cdf.csv",
                          "pretrain_report.csv"})
    {
        auto a = util::read_file(base / "run1" / f), b = util::read_file(base / "run2" / f);
        if (std::string(f) == "pretrain_report.csv")
        {
            // The seconds column is timing; compare the loss columns only.
            auto strip = [](const std::string &s) {
                std::string out;
                std::istringstream in(s);
                std::string line;
                while (std::getline(in, line))
                    out += line.substr(0, line.rfind(',')) + "\n";
                return out;
            };
            a = strip(a), b = strip(b);
        }
        if (a != b)
            differing.push_back(f);
    }
    const bool same_reports = eval::to_json(r1.eval_report) == eval::to_json(r2.eval_report);
    std::string diff;
    for (auto &d : differing)
        diff += " " + d;
    return {differing.empty() && same_reports,
            differing.empty() ? fmt("two runs of %s bitwise identical (RMSE %.4f)", manifest_path.filename().c_str(),
                                    r1.eval_report.rmse_linear)
                              : "differing:" + diff};
}

// ---------------------------------------------------------------- A5

std::size_t closed_form_count(std::size_t in, std::initializer_list<std::size_t> widths)
{
    std::size_t n = 0;
    for (auto w : widths)
        n += (in + 1) * w, in = w;
    return n;
}

Outcome a5()
{
    const auto a = gan::Architecture::paper_default();
    const std::size_t g_expected = closed_form_count(100, {128, 128, 128, 128, 401});
    const std::size_t d_expected = closed_form_count(401, {512, 256, 128, 64, 1});
    RandomStream rng(5);
    gan::Checkpoint c;
    c.architecture = a;
    c.generator.mlp = gan::Mlp::initialize(a.generator, rng);
    c.discriminator.mlp = gan::Mlp::initialize(a.discriminator, rng);
    c.g_optimizer = train::OptimizerState::fresh(train::OptimizerKind::sgd, c.generator.mlp.parameters());
    c.d_optimizer = train::OptimizerState::fresh(train::OptimizerKind::adam, c.discriminator.mlp.parameters());
    for (auto &t : c.d_optimizer.adam.m)
        for (double &v : t.values())
            v = rng.normal();
    c.d_optimizer.adam.step = 3;
    c.epoch = 3;
    std::size_t g_stored = 0, d_stored = 0;
    for (const auto *p : c.generator.mlp.parameters())
        g_stored += p->size();
    for (const auto *p : c.discriminator.mlp.parameters())
        d_stored += p->size();

    const fs::path path = fs::path(PDPGAN_ACCEPTANCE_CACHE) / "a5.ckpt";
    fs::create_directories(path.parent_path());
    gan::save_checkpoint(c, path);
    const auto back = gan::load_checkpoint(path);
    bool bitwise = back == c;
    const auto pa = c.generator.mlp.parameters();
    const auto pb = back.generator.mlp.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i)
        bitwise = bitwise && std::memcmp(pa[i]->values().data(), pb[i]->values().data(), 8 * pa[i]->size()) == 0;
    const auto bytes = gan::serialize(back);
    bitwise = bitwise && std::string(bytes.begin(), bytes.end()) == util::read_file(path);
    fs::remove(path);

    const bool counts = a.generator.parameter_count() == g_expected && g_stored == g_expected &&
                        a.discriminator.parameter_count() == d_expected && d_stored == d_expected;
    return {counts && bitwise, fmt("G %zu (expected %zu), D %zu (expected %zu), round trip %s", g_stored, g_expected,
                                   d_stored, d_expected, bitwise ? "bitwise" : "NOT bitwise")};
}

// ---------------------------------------------------------------- A6

Outcome a6()
{
    struct Seed
    {
        double rmse = 0.0, w1 = 0.0;
    };
    const auto per_seed = parallel_map<Seed>(10, [](std::size_t s) {
        const auto source = desk_source(s);
        const auto ckpt = desk_pretrained(s, source.pdps, false);
        RandomStream rng(7 + s);
        const auto generated = train::generate_pdps(ckpt, 2000, rng);
        Seed r;
        r.rmse = eval::rmse(eval::average_pdp(source.pdps), eval::average_pdp(generated));
        r.w1 = eval::wasserstein_1d(eval::total_power_marginal(source.pdps), eval::total_power_marginal(generated));
        std::printf("  A6 seed %zu: RMSE %.4f, W1 total power %.4f\n", s, r.rmse, r.w1);
        std::fflush(stdout);
        return r;
    });
    std::size_t ok = 0;
    for (const auto &r : per_seed)
        ok += r.rmse < 0.05 && r.w1 < 0.05;
    return {ok >= 8, fmt("%zu/10 seeds with RMSE < 0.05 and W1 < 0.05", ok)};
}

// ---------------------------------------------------------------- A7

double final_window_std(const std::vector<double> &v, std::size_t w)
{
    double m = 0.0, s = 0.0;
    for (std::size_t i = v.size() - w; i < v.size(); ++i)
        m += v[i];
    m /= static_cast<double>(w);
    for (std::size_t i = v.size() - w; i < v.size(); ++i)
        s += (v[i] - m) * (v[i] - m);
    return std::sqrt(s / static_cast<double>(w));
}

Outcome a7()
{
    struct Seed
    {
        bool rmse_better = false, earlier = false;
    };
    const auto per_seed = parallel_map<Seed>(10, [](std::size_t s) {
        const auto source = desk_source(s);
        const auto pretrained = desk_pretrained(s, source.pdps, true);

        synth::DatasetSpec tspec;
        tspec.grid = desk_grid;
        tspec.count = 32;
        tspec.rng_seed = 200 + s;
        tspec.params = desk_params(35e-9);
        const auto target = synth::generate_dataset(tspec).pdps;

        const auto config = desk_config(500, s);
        const auto tuned = train::fine_tune(config, target, pretrained);
        const auto scratch = train::train(config, target);

        const auto mean = eval::average_pdp(target);
        RandomStream g1(7), g2(7);
        const double r_ft = eval::rmse(mean, eval::average_pdp(train::generate_pdps(tuned.checkpoint, 2000, g1)));
        const double r_sc = eval::rmse(mean, eval::average_pdp(train::generate_pdps(scratch.checkpoint, 2000, g2)));
        const double tol = final_window_std(scratch.report.d_loss, 100);
        const auto c_ft = train::convergence_epoch(tuned.report.d_loss, 100, tol);
        const auto c_sc = train::convergence_epoch(scratch.report.d_loss, 100, tol);
        std::printf("  A7 seed %zu: RMSE fine-tuned %.4f scratch %.4f; convergence epoch fine-tuned %zu scratch %zu "
                    "(tol %.4f)\n",
                    s, r_ft, r_sc, c_ft, c_sc, tol);
        std::fflush(stdout);
        return Seed{r_ft < r_sc, c_ft < c_sc};
    });
    std::size_t better = 0, earlier = 0;
    for (const auto &r : per_seed)
        better += r.rmse_better, earlier += r.earlier;
    return {better >= 8 && earlier >= 8,
            fmt("fine-tuned lower RMSE in %zu/10 seeds, earlier convergence in %zu/10 seeds", better, earlier)};
}

// ---------------------------------------------------------------- A8

Outcome a8()
{
    RandomStream rng(8);
    auto random_pdp = [&rng] {
        channel::Pdp p;
        p.grid = {64, 2e-9};
        const double decay = rng.uniform(4.0, 20.0);
        for (std::size_t i = 0; i < 64; ++i)
            p.powers.push_back(std::exp(-static_cast<double>(i) / decay) * rng.uniform(0.2, 1.0));
        return p;
    };
    bool self_one = true, rmse_zero = true, nondecreasing = true;
    double shift_err = 0.0;
    int monotone = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto x = random_pdp();
        self_one = self_one && eval::ssim_1d(x, x) == 1.0;
        rmse_zero = rmse_zero && eval::rmse(x, x) == 0.0 && eval::rmse(x, x, eval::Domain::db) == 0.0;
        const double c = rng.uniform(-0.5, 0.5);
        auto shifted = x;
        for (double &v : shifted.powers)
            v += c;
        shift_err = std::max(shift_err, std::abs(eval::rmse(shifted, x) - std::abs(c)));

        auto light = x, heavy = x;
        for (std::size_t i = 0; i < 64; ++i)
        {
            light.powers[i] += rng.normal(0.0, 0.02);
            heavy.powers[i] += rng.normal(0.0, 0.1);
        }
        monotone += eval::ssim_1d(x, light) > eval::ssim_1d(x, heavy);

        std::vector<channel::Pdp> ref, gen;
        for (int i = 0; i < 15; ++i)
            ref.push_back(random_pdp()), gen.push_back(random_pdp());
        const auto r = eval::evaluate(ref, gen, {eval::Pairing::random, static_cast<std::uint64_t>(trial), 0.6});
        for (const auto *v : {&r.ssim.sorted, &r.delay_spread_reference, &r.delay_spread_generated})
            nondecreasing = nondecreasing && std::is_sorted(v->begin(), v->end());
        double prev = -1.0;
        for (double t = -1.0; t <= 1.0; t += 0.01)
        {
            const double f = 1.0 - r.ssim.fraction_above_threshold(t);
            nondecreasing = nondecreasing && f >= prev;
            prev = f;
        }
    }
    const bool pass = self_one && rmse_zero && shift_err <= 1e-15 && monotone >= 95 && nondecreasing;
    return {pass, fmt("ssim(x,x)=1 %s; rmse(a,a)=0 %s; max |rmse(a+c,a)-|c|| %.1e; noise monotone %d/100; CDFs "
                      "nondecreasing %s",
                      self_one ? "yes" : "no", rmse_zero ? "yes" : "no", shift_err, monotone,
                      nondecreasing ? "yes" : "no")};
}

// ---------------------------------------------------------------- A9

Outcome a9()
{
    const auto arch = gan::Architecture::paper_default();
    const train::TrainConfig defaults;
    int d_down = 0, g_down = 0;
    std::string trace;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        RandomStream rng(900 + s);
        auto g = gan::Mlp::initialize(arch.generator, rng);
        auto d = gan::Mlp::initialize(arch.discriminator, rng);
        synth::DatasetSpec spec;
        spec.count = 64;
        spec.rng_seed = s;
        const auto data = synth::generate_dataset(spec).pdps;
        Tensor real = Tensor::matrix(64, 401);
        for (std::size_t i = 0; i < 64; ++i)
            for (std::size_t j = 0; j < 401; ++j)
                real(i, j) = data[i].powers[j];
        const Tensor z = gan::sample_noise({100, 1.0}, 64, rng);
        const std::uint64_t eps_seed = rng.below(1u << 30);

        auto losses = [&](bool d_trainable, bool g_trainable, std::vector<Tensor> *grads) {
            Tape tape;
            const auto gb = gan::bind(tape, g, arch.leaky_slope, g_trainable);
            const auto db = gan::bind(tape, d, arch.leaky_slope, d_trainable);
            RandomStream eps(eps_seed);
            const auto l = gan::wgan_gp_losses(gb, db, real, z, defaults.lambda, eps);
            if (grads)
                *grads = d_trainable ? tape.gradients(l.d_loss, db.params) : tape.gradients(l.g_loss, gb.params);
            return std::pair{l.d_loss.value().item(), l.g_loss.value().item()};
        };

        // Discriminator Adam step, generator frozen.
        std::vector<Tensor> grads;
        const double d_before = losses(true, false, &grads).first;
        auto d_state = train::OptimizerState::fresh(defaults.d_optimizer.kind, d.parameters());
        train::apply_update(defaults.d_optimizer, d_state, d.parameters(), grads);
        const double d_after = losses(false, false, nullptr).first;
        d_down += d_after < d_before;

        // Generator SGD step, discriminator frozen.
        const double g_before = losses(false, true, &grads).second;
        auto g_state = train::OptimizerState::fresh(defaults.g_optimizer.kind, g.parameters());
        train::apply_update(defaults.g_optimizer, g_state, g.parameters(), grads);
        const double g_after = losses(false, false, nullptr).second;
        g_down += g_after < g_before;
        std::printf("  A9 seed %llu: d_loss %.6g -> %.6g, g_loss %.9g -> %.9g\n", (unsigned long long)s, d_before,
                    d_after, g_before, g_after);
    }
    return {d_down >= 9 && g_down >= 9, fmt("d_loss decreased in %d/10 seeds, g_loss decreased in %d/10 seeds", d_down,
                                            g_down)};
}

} // namespace

int main(int argc, char **argv)
{
    const std::map<std::string, std::function<Outcome()>> criteria = {
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
        {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}};
    if (argc != 2 || (criteria.count(argv[1]) == 0 && std::string(argv[1]) != "all"))
    {
        std::fprintf(stderr, "usage: %s <A1..A9 | all>\n", argv[0]);
        return 2;
    }
    bool all_pass = true;
    for (const auto &[id, run] : criteria)
    {
        if (std::string(argv[1]) != "all" && id != argv[1])
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s: %s [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
