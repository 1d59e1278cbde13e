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

#ifndef PDPGAN_PIPELINE_HPP
#define PDPGAN_PIPELINE_HPP

#include "pdpgan/dataset_io.hpp"
#include "pdpgan/evaluation.hpp"
#include "pdpgan/training.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace pdpgan::pipeline
{

// Invalid or incomplete manifest, including references to files that do not exist.
class ManifestError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// A training stage produced a non-finite loss. The last finite state was saved to checkpoint_path().
class StageDiverged : public std::runtime_error
{
  public:
    StageDiverged(const std::string &stage, std::size_t epoch, std::filesystem::path checkpoint);
    const std::string &stage() const { return stage_; }
    std::size_t epoch() const { return epoch_; }
    const std::filesystem::path &checkpoint_path() const { return checkpoint_; }

  private:
    std::string stage_;
    std::size_t epoch_;
    std::filesystem::path checkpoint_;
};

// Either an existing dataset file or a synthetic draw.
struct DataSource
{
    std::optional<std::filesystem::path> dataset;
    std::optional<synth::StochasticChannelParams> params;
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

struct ExperimentManifest
{
    std::string name;
    std::filesystem::path manifest_path;
    std::filesystem::path run_dir;
    channel::DelayGrid grid;
    DataSource source;
    DataSource target;
    train::TrainConfig pretrain;
    train::TrainConfig finetune;
    std::size_t generate_count = 0;
    std::uint64_t generate_seed = 0;
    eval::EvalOptions eval;
    nlohmann::json raw;

    // Every file the manifest refers to.
    std::vector<std::filesystem::path> referenced_files() const;
};

// Relative paths resolve against the manifest's directory. Throws ManifestError for missing
// fields, missing seeds and missing referenced files.
ExperimentManifest load_manifest(const std::filesystem::path &path);

struct PipelineResult
{
    std::filesystem::path run_dir;
    std::filesystem::path source_dataset;
    std::filesystem::path pretrain_checkpoint;
    std::filesystem::path finetune_checkpoint;
    std::filesystem::path generated_dataset;
    std::filesystem::path eval_dir;
    train::TrainReport pretrain_report;
    train::TrainReport finetune_report;
    eval::EvalReport eval_report;
};

using LogFn = std::function<void(const std::string &)>;

// simulate source -> pretrain -> fine-tune on target -> generate -> evaluate against target.
// Artifacts land under `run_dir` (the manifest's run_dir when empty) next to a copy of the manifest.
PipelineResult run_pipeline(const ExperimentManifest &manifest, const std::filesystem::path &run_dir = {},
                            const LogFn &log = {});

// Loads a dataset file or draws the synthetic set described by `source`.
io::PdpDataset materialize(const DataSource &source, const channel::DelayGrid &grid);

} // namespace pdpgan::pipeline

#endif
