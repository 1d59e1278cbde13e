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

#ifndef PDPGAN_TRAINING_HPP
#define PDPGAN_TRAINING_HPP

#include "pdpgan/channel_core.hpp"
#include "pdpgan/checkpoint.hpp"
#include "pdpgan/gan.hpp"
#include "pdpgan/optimizers.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpgan::train
{

struct BatchSize
{
    enum class Kind
    {
        automatic, // whole dataset when it has <= 64 samples, otherwise 64
        full,
        fixed
    };
    Kind kind = Kind::automatic;
    std::size_t size = 64;

    std::size_t resolve(std::size_t dataset_size) const;
    bool operator==(const BatchSize &) const = default;
};

struct TrainConfig
{
    gan::Architecture architecture = gan::Architecture::paper_default();
    std::size_t epochs = 10000;
    BatchSize batch;
    double lambda = 10.0;
    OptimizerConfig g_optimizer{OptimizerKind::sgd, 2e-4, 0.5, 0.9, 1e-8};
    OptimizerConfig d_optimizer{OptimizerKind::adam, 2e-4, 0.5, 0.9, 1e-8};
    std::size_t n_critic = 1;
    std::uint64_t seed = 0;
    std::size_t snapshot_every = 0; // 0 disables snapshots
    double noise_sigma = 1.0;

    // Used for the convergence estimate stored in the report.
    std::size_t convergence_window = 100;
    double convergence_tol = 0.05;

    // Zero epochs are only meaningful when continuing from a checkpoint.
    void validate(bool allow_zero_epochs = false) const;
    // Hex digest of the JSON form.
    std::string fingerprint() const;

    bool operator==(const TrainConfig &) const = default;
};

nlohmann::json to_json(const TrainConfig &config);
// Fields absent from `j` keep the values in `defaults`.
TrainConfig train_config_from_json(const nlohmann::json &j, const TrainConfig &defaults = {});

struct TrainReport
{
    std::vector<double> g_loss;
    std::vector<double> d_loss;
    std::vector<double> seconds; // wall-clock per epoch
    std::size_t convergence_epoch = 0;
    std::size_t convergence_window = 0;
    double convergence_tol = 0.0;
    std::string checkpoint_path;

    std::size_t epochs_run() const { return d_loss.size(); }
};

struct TrainResult
{
    gan::Checkpoint checkpoint;
    TrainReport report;
};

// Thrown when a loss turns non-finite. Carries the checkpoint from the start of the failing
// epoch and the history recorded so far.
class DivergenceError : public std::runtime_error
{
  public:
    DivergenceError(std::size_t epoch, gan::Checkpoint last_good, TrainReport partial);

    std::size_t epoch() const { return epoch_; }
    const gan::Checkpoint &last_good() const { return last_good_; }
    const TrainReport &partial_report() const { return partial_; }

  private:
    std::size_t epoch_;
    gan::Checkpoint last_good_;
    TrainReport partial_;
};

using SnapshotFn = std::function<void(const gan::Checkpoint &)>;

// Fresh networks from config.seed, or continue from `init` including its optimizer state.
TrainResult train(const TrainConfig &config, const std::vector<channel::Pdp> &dataset,
                  const std::optional<gan::Checkpoint> &init = std::nullopt, const SnapshotFn &snapshot = {});

// Transfers both networks from `source`; optimizer state starts fresh. Zero epochs return
// `source` unchanged.
TrainResult fine_tune(const TrainConfig &config, const std::vector<channel::Pdp> &target,
                      const gan::Checkpoint &source, const SnapshotFn &snapshot = {});

// First epoch e whose window [e, e + window) of d_loss has population standard deviation
// below tol; the history length when no window qualifies.
std::size_t convergence_epoch(std::span<const double> d_loss, std::size_t window, double tol);
std::size_t convergence_epoch(const TrainReport &report, std::size_t window, double tol);

// Generator samples as PDPs on a grid of the checkpoint's spacing (values in (0, 1)).
std::vector<channel::Pdp> generate_pdps(const gan::Checkpoint &ckpt, std::size_t count, RandomStream &rng,
                                        double noise_sigma = 1.0);

// CSV columns: epoch,g_loss,d_loss,seconds
void write_report_csv(const TrainReport &report, const std::filesystem::path &path);
TrainReport read_report_csv(const std::filesystem::path &path);
nlohmann::json report_summary(const TrainReport &report);

} // namespace pdpgan::train

#endif
