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

#include "pdpgan/training.hpp"
#include "pdpgan/file_util.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace pdpgan::train
{

std::size_t BatchSize::resolve(std::size_t dataset_size) const
{
    switch (kind)
    {
    case Kind::full:
        return dataset_size;
    case Kind::fixed:
        return std::min(size, dataset_size);
    case Kind::automatic:
        break;
    }
    return dataset_size <= 64 ? dataset_size : 64;
}

void TrainConfig::validate(bool allow_zero_epochs) const
{
    architecture.validate();
    if (epochs < 1 && !allow_zero_epochs)
        throw std::invalid_argument("epochs must be >= 1.");
    if (!(g_optimizer.lr >= 0.0) || !(d_optimizer.lr >= 0.0))
        throw std::invalid_argument("Learning rates must be non-negative.");
    if (n_critic < 1)
        throw std::invalid_argument("n_critic must be >= 1.");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("Gradient penalty coefficient must be >= 0.");
    if (batch.kind == BatchSize::Kind::fixed && batch.size < 1)
        throw std::invalid_argument("Batch size must be >= 1.");
    if (!(noise_sigma > 0.0))
        throw std::invalid_argument("Noise sigma must be > 0.");
    if (convergence_window < 2)
        throw std::invalid_argument("Convergence window must be >= 2.");
}

namespace
{
nlohmann::json to_json(const OptimizerConfig &o)
{
    return {{"kind", to_string(o.kind)}, {"lr", o.lr}, {"beta1", o.beta1}, {"beta2", o.beta2}, {"eps", o.eps}};
}

OptimizerConfig optimizer_from_json(const nlohmann::json &j, OptimizerConfig o)
{
    if (j.contains("kind"))
        o.kind = optimizer_from_string(j.at("kind").get<std::string>());
    o.lr = j.value("lr", o.lr);
    o.beta1 = j.value("beta1", o.beta1);
    o.beta2 = j.value("beta2", o.beta2);
    o.eps = j.value("eps", o.eps);
    return o;
}

std::string batch_to_string(const BatchSize &b)
{
    switch (b.kind)
    {
    case BatchSize::Kind::full:
        return "full";
    case BatchSize::Kind::fixed:
        return std::to_string(b.size);
    case BatchSize::Kind::automatic:
        break;
    }
    return "auto";
}
} // namespace

nlohmann::json to_json(const TrainConfig &c)
{
    nlohmann::json j;
    j["architecture"] = gan::to_json(c.architecture);
    j["epochs"] = c.epochs;
    j["batch_size"] = batch_to_string(c.batch);
    j["lambda"] = c.lambda;
    j["g_optimizer"] = to_json(c.g_optimizer);
    j["d_optimizer"] = to_json(c.d_optimizer);
    j["n_critic"] = c.n_critic;
    j["seed"] = c.seed;
    j["snapshot_every"] = c.snapshot_every;
    j["noise_sigma"] = c.noise_sigma;
    j["convergence_window"] = c.convergence_window;
    j["convergence_tol"] = c.convergence_tol;
    return j;
}

TrainConfig train_config_from_json(const nlohmann::json &j, const TrainConfig &defaults)
{
    TrainConfig c = defaults;
    if (j.contains("architecture"))
        c.architecture = gan::architecture_from_json(j.at("architecture"));
    c.epochs = j.value("epochs", c.epochs);
    if (j.contains("batch_size"))
    {
        const auto &b = j.at("batch_size");
        if (b.is_number_unsigned())
            c.batch = {BatchSize::Kind::fixed, b.get<std::size_t>()};
        else if (b == "full")
            c.batch = {BatchSize::Kind::full, 0};
        else if (b == "auto")
            c.batch = {BatchSize::Kind::automatic, 64};
        else if (b.is_string())
            c.batch = {BatchSize::Kind::fixed, std::stoull(b.get<std::string>())};
        else
            throw std::invalid_argument("batch_size must be a positive integer, \"full\" or \"auto\".");
    }
    c.lambda = j.value("lambda", c.lambda);
    if (j.contains("g_optimizer"))
        c.g_optimizer = optimizer_from_json(j.at("g_optimizer"), c.g_optimizer);
    if (j.contains("d_optimizer"))
        c.d_optimizer = optimizer_from_json(j.at("d_optimizer"), c.d_optimizer);
    c.n_critic = j.value("n_critic", c.n_critic);
    c.seed = j.value("seed", c.seed);
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.convergence_window = j.value("convergence_window", c.convergence_window);
    c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
    return c;
}

std::string TrainConfig::fingerprint() const
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(to_json(*this).dump())));
    return buf;
}

DivergenceError::DivergenceError(std::size_t epoch, gan::Checkpoint last_good, TrainReport partial)
    : std::runtime_error("divergence at epoch " + std::to_string(epoch)), epoch_(epoch),
      last_good_(std::move(last_good)), partial_(std::move(partial))
{
}

namespace
{
ad::Tensor stack_rows(const std::vector<channel::Pdp> &data, std::span<const std::size_t> rows)
{
    const std::size_t width = data.front().powers.size();
    ad::Tensor out = ad::Tensor::matrix(rows.size(), width);
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(data[rows[r]].powers.begin(), data[rows[r]].powers.end(), out.values().begin() + r * width);
    return out;
}

void check_dataset(const TrainConfig &config, const std::vector<channel::Pdp> &data)
{
    if (data.empty())
        throw std::invalid_argument("Training dataset is empty.");
    const std::size_t len = config.architecture.pdp_length();
    const auto grid = data.front().grid;
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        if (data[i].powers.size() != len)
            throw std::invalid_argument("Sample " + std::to_string(i) + " has " + std::to_string(data[i].powers.size()) +
                                        " bins; the architecture expects " + std::to_string(len) + ".");
        if (!(data[i].grid == grid))
            throw std::invalid_argument("Sample " + std::to_string(i) + " uses a different delay grid.");
    }
}

double critic_step(const TrainConfig &config, gan::Checkpoint &state, const ad::Tensor &real_batch, RandomStream &rng)
{
    const auto &arch = config.architecture;
    ad::Tape tape;
    const auto gen = gan::bind(tape, state.generator.mlp, arch.leaky_slope, false);
    const auto critic = gan::bind(tape, state.discriminator.mlp, arch.leaky_slope, true);
    const auto z = gan::sample_noise({arch.noise_dim(), config.noise_sigma}, real_batch.rows(), rng);
    const ad::Var fake = gan::forward(gen, tape.constant(z));
    const ad::Var loss = gan::critic_loss(critic, tape.constant(real_batch), fake, config.lambda, rng);
    const double value = loss.value().item();
    if (!std::isfinite(value))
        return value;
    const auto grads = tape.gradients(loss, critic.params);
    auto params = state.discriminator.mlp.parameters();
    apply_update(config.d_optimizer, state.d_optimizer, params, grads);
    return value;
}

double generator_step(const TrainConfig &config, gan::Checkpoint &state, std::size_t batch, RandomStream &rng)
{
    const auto &arch = config.architecture;
    ad::Tape tape;
    const auto gen = gan::bind(tape, state.generator.mlp, arch.leaky_slope, true);
    const auto critic = gan::bind(tape, state.discriminator.mlp, arch.leaky_slope, false);
    const auto z = gan::sample_noise({arch.noise_dim(), config.noise_sigma}, batch, rng);
    const ad::Var fake = gan::forward(gen, tape.constant(z));
    const ad::Var loss = ad::scalar_mul(ad::mean(gan::forward(critic, fake)), -1.0);
    const double value = loss.value().item();
    if (!std::isfinite(value))
        return value;
    const auto grads = tape.gradients(loss, gen.params);
    auto params = state.generator.mlp.parameters();
    apply_update(config.g_optimizer, state.g_optimizer, params, grads);
    return value;
}

TrainResult run_loop(const TrainConfig &config, const std::vector<channel::Pdp> &data, gan::Checkpoint state,
                     const SnapshotFn &snapshot)
{
    const RandomStream root(config.seed);
    const RandomStream epoch_root = root.split("epochs");
    const std::size_t n = data.size();
    const std::size_t batch = config.batch.resolve(n);
    const std::uint64_t start_epoch = state.epoch;

    std::vector<std::size_t> order(n);
    TrainReport report;
    report.d_loss.reserve(config.epochs);
    report.g_loss.reserve(config.epochs);
    report.seconds.reserve(config.epochs);

    for (std::size_t e = 0; e < config.epochs; ++e)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const gan::Checkpoint last_good = state;
        // Keyed by the absolute epoch so that a resumed run continues the same stream.
        RandomStream rng = epoch_root.split(start_epoch + e);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng.engine());

        double d_sum = 0.0, g_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < n; begin += batch)
        {
            const std::size_t end = std::min(n, begin + batch);
            const auto rows = std::span<const std::size_t>(order).subspan(begin, end - begin);
            const ad::Tensor real = stack_rows(data, rows);
            double d_value = 0.0;
            for (std::size_t k = 0; k < config.n_critic; ++k)
            {
                d_value = critic_step(config, state, real, rng);
                if (!std::isfinite(d_value))
                    break;
            }
            const double g_value = std::isfinite(d_value) ? generator_step(config, state, rows.size(), rng) : d_value;
            if (!std::isfinite(d_value) || !std::isfinite(g_value))
            {
                report.convergence_window = config.convergence_window;
                report.convergence_tol = config.convergence_tol;
                throw DivergenceError(e, last_good, report);
            }
            d_sum += d_value;
            g_sum += g_value;
            ++batches;
        }
        state.epoch = start_epoch + e + 1;
        report.d_loss.push_back(d_sum / static_cast<double>(batches));
        report.g_loss.push_back(g_sum / static_cast<double>(batches));
        report.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

        if (config.snapshot_every > 0 && snapshot && (e + 1) % config.snapshot_every == 0)
            snapshot(state);
    }

    report.convergence_window = config.convergence_window;
    report.convergence_tol = config.convergence_tol;
    report.convergence_epoch = report.epochs_run() >= config.convergence_window
                                   ? convergence_epoch(report.d_loss, config.convergence_window, config.convergence_tol)
                                   : report.epochs_run();
    state.config_fingerprint = config.fingerprint();
    return {std::move(state), std::move(report)};
}

gan::Checkpoint fresh_state(const TrainConfig &config, double grid_spacing)
{
    const RandomStream root(config.seed);
    auto g_rng = root.split("generator-init");
    auto d_rng = root.split("discriminator-init");
    gan::Checkpoint c;
    c.architecture = config.architecture;
    c.generator.mlp = gan::Mlp::initialize(config.architecture.generator, g_rng);
    c.discriminator.mlp = gan::Mlp::initialize(config.architecture.discriminator, d_rng);
    c.g_optimizer = OptimizerState::fresh(config.g_optimizer.kind, c.generator.mlp.parameters());
    c.d_optimizer = OptimizerState::fresh(config.d_optimizer.kind, c.discriminator.mlp.parameters());
    c.grid_spacing = grid_spacing;
    return c;
}

void require_architecture(const TrainConfig &config, const gan::Checkpoint &ckpt)
{
    const auto diff = gan::architecture_diff(config.architecture, ckpt.architecture);
    if (diff.empty())
        return;
    std::string msg = "Checkpoint architecture does not match the configuration:";
    for (const auto &d : diff)
        msg += "\n  " + d;
    throw std::invalid_argument(msg);
}
} // namespace

TrainResult train(const TrainConfig &config, const std::vector<channel::Pdp> &dataset,
                  const std::optional<gan::Checkpoint> &init, const SnapshotFn &snapshot)
{
    config.validate();
    check_dataset(config, dataset);
    gan::Checkpoint state;
    if (init)
    {
        require_architecture(config, *init);
        state = *init;
        if (state.g_optimizer.kind != config.g_optimizer.kind)
            state.g_optimizer = OptimizerState::fresh(config.g_optimizer.kind, state.generator.mlp.parameters());
        if (state.d_optimizer.kind != config.d_optimizer.kind)
            state.d_optimizer = OptimizerState::fresh(config.d_optimizer.kind, state.discriminator.mlp.parameters());
    }
    else
    {
        state = fresh_state(config, dataset.front().grid.spacing);
    }
    state.grid_spacing = dataset.front().grid.spacing;
    return run_loop(config, dataset, std::move(state), snapshot);
}

TrainResult fine_tune(const TrainConfig &config, const std::vector<channel::Pdp> &target,
                      const gan::Checkpoint &source, const SnapshotFn &snapshot)
{
    config.validate(true);
    require_architecture(config, source);
    check_dataset(config, target);
    if (config.epochs == 0)
    {
        TrainResult r{source, {}};
        r.report.convergence_window = config.convergence_window;
        r.report.convergence_tol = config.convergence_tol;
        return r;
    }
    gan::Checkpoint state = source;
    state.g_optimizer = OptimizerState::fresh(config.g_optimizer.kind, state.generator.mlp.parameters());
    state.d_optimizer = OptimizerState::fresh(config.d_optimizer.kind, state.discriminator.mlp.parameters());
    state.grid_spacing = target.front().grid.spacing;
    return run_loop(config, target, std::move(state), snapshot);
}

std::size_t convergence_epoch(std::span<const double> d_loss, std::size_t window, double tol)
{
    if (window < 2)
        throw std::invalid_argument("Convergence window must be >= 2.");
    if (window > d_loss.size())
        throw std::invalid_argument("Convergence window " + std::to_string(window) + " exceeds the history length " +
                                    std::to_string(d_loss.size()) + ".");
    const double w = static_cast<double>(window);
    for (std::size_t e = 0; e + window <= d_loss.size(); ++e)
    {
        const auto slice = d_loss.subspan(e, window);
        const double mean = std::accumulate(slice.begin(), slice.end(), 0.0) / w;
        double ss = 0.0;
        for (double v : slice)
            ss += (v - mean) * (v - mean);
        if (std::sqrt(ss / w) < tol)
            return e;
    }
    return d_loss.size();
}

std::size_t convergence_epoch(const TrainReport &report, std::size_t window, double tol)
{
    return convergence_epoch(report.d_loss, window, tol);
}

std::vector<channel::Pdp> generate_pdps(const gan::Checkpoint &ckpt, std::size_t count, RandomStream &rng,
                                        double noise_sigma)
{
    const auto &arch = ckpt.architecture;
    const auto z = gan::sample_noise({arch.noise_dim(), noise_sigma}, count, rng);
    const auto x = gan::generator_forward(ckpt.generator, z, arch.leaky_slope);
    std::vector<channel::Pdp> out(count);
    const std::size_t len = arch.pdp_length();
    for (std::size_t i = 0; i < count; ++i)
    {
        out[i].grid = {len, ckpt.grid_spacing};
        out[i].normalized = true;
        out[i].powers.assign(x.values().begin() + i * len, x.values().begin() + (i + 1) * len);
    }
    return out;
}

void write_report_csv(const TrainReport &report, const std::filesystem::path &path)
{
    std::string s = "epoch,g_loss,d_loss,seconds\n";
    for (std::size_t e = 0; e < report.epochs_run(); ++e)
    {
        s += std::to_string(e) + "," + util::format_double(report.g_loss[e]) + "," +
             util::format_double(report.d_loss[e]) + "," + util::format_double(report.seconds[e]) + "\n";
    }
    util::write_file_atomic(path, s);
}

TrainReport read_report_csv(const std::filesystem::path &path)
{
    std::istringstream in(util::read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "epoch,g_loss,d_loss,seconds")
        throw std::runtime_error("'" + path.string() + "' is not a training report (bad header).");
    TrainReport r;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        double fields[4];
        const char *p = line.data();
        const char *end = line.data() + line.size();
        for (int f = 0; f < 4; ++f)
        {
            const auto res = std::from_chars(p, end, fields[f]);
            if (res.ec != std::errc() || (f < 3 && (res.ptr == end || *res.ptr != ',')))
                throw std::runtime_error("Malformed report line " + std::to_string(line_no) + ".");
            p = res.ptr + 1;
        }
        r.g_loss.push_back(fields[1]);
        r.d_loss.push_back(fields[2]);
        r.seconds.push_back(fields[3]);
    }
    return r;
}

nlohmann::json report_summary(const TrainReport &report)
{
    nlohmann::json j;
    j["epochs_run"] = report.epochs_run();
    j["final_g_loss"] = report.g_loss.empty() ? 0.0 : report.g_loss.back();
    j["final_d_loss"] = report.d_loss.empty() ? 0.0 : report.d_loss.back();
    j["convergence_epoch"] = report.convergence_epoch;
    j["convergence_window"] = report.convergence_window;
    j["convergence_tol"] = report.convergence_tol;
    j["total_seconds"] = std::accumulate(report.seconds.begin(), report.seconds.end(), 0.0);
    j["checkpoint"] = report.checkpoint_path;
    return j;
}

} // namespace pdpgan::train
