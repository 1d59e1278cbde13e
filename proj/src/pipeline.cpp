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

#include "pdpgan/pipeline.hpp"
#include "pdpgan/file_util.hpp"

namespace pdpgan::pipeline
{

StageDiverged::StageDiverged(const std::string &stage, std::size_t epoch, std::filesystem::path checkpoint)
    : std::runtime_error(stage + " diverged at epoch " + std::to_string(epoch) + "; last good checkpoint: " +
                         checkpoint.string()),
      stage_(stage), epoch_(epoch), checkpoint_(std::move(checkpoint))
{
}

namespace
{
namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve(const fs::path &base, const std::string &p)
{
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::uint64_t require_seed(const json &j, const std::string &where)
{
    if (!j.contains("seed") || !j.at("seed").is_number_unsigned())
        throw ManifestError(where + ": an explicit non-negative integer \"seed\" is required.");
    return j.at("seed").get<std::uint64_t>();
}

DataSource parse_source(const json &j, const fs::path &base, const std::string &where)
{
    DataSource s;
    if (j.contains("dataset"))
    {
        s.dataset = resolve(base, j.at("dataset").get<std::string>());
        return s;
    }
    if (j.contains("params_file"))
    {
        const auto file = resolve(base, j.at("params_file").get<std::string>());
        if (!fs::exists(file))
            throw ManifestError(where + ": referenced file '" + file.string() + "' does not exist.");
        s.params = io::load_params(file);
    }
    else if (j.contains("params"))
    {
        s.params = io::params_from_json(j.at("params"));
    }
    else
    {
        throw ManifestError(where + ": needs \"dataset\", \"params\" or \"params_file\".");
    }
    s.count = j.at("count").get<std::size_t>();
    if (s.count == 0)
        throw ManifestError(where + ": count must be >= 1.");
    s.seed = require_seed(j, where);
    return s;
}

gan::Architecture parse_architecture(const json &j, std::size_t pdp_length)
{
    if (j.contains("generator"))
        return gan::architecture_from_json(j);
    auto a = gan::Architecture::uniform(j.value("noise_dim", std::size_t{100}), j.at("width").get<std::size_t>(),
                                        pdp_length);
    a.leaky_slope = j.value("leaky_slope", a.leaky_slope);
    return a;
}

train::TrainConfig parse_stage(const json &j, const gan::Architecture &arch, const std::string &where)
{
    train::TrainConfig defaults;
    defaults.architecture = arch;
    const std::uint64_t seed = require_seed(j, where);
    auto c = train::train_config_from_json(j, defaults);
    c.seed = seed;
    if (!(c.architecture == arch))
        throw ManifestError(where + ": the stage may not override the architecture.");
    return c;
}
} // namespace

std::vector<fs::path> ExperimentManifest::referenced_files() const
{
    std::vector<fs::path> out;
    for (const auto *s : {&source, &target})
        if (s->dataset)
            for (auto &f : io::dataset_files(*s->dataset))
                out.push_back(f);
    return out;
}

ExperimentManifest load_manifest(const fs::path &path)
{
    if (!fs::exists(path))
        throw ManifestError("manifest '" + path.string() + "' does not exist.");
    ExperimentManifest m;
    m.manifest_path = path;
    const fs::path base = fs::absolute(path).parent_path();
    try
    {
        m.raw = json::parse(util::read_file(path));
        const json &j = m.raw;
        m.name = j.value("name", path.stem().string());
        m.run_dir = resolve(base, j.value("run_dir", std::string("runs/") + m.name));
        m.grid.num_points = j.at("grid").at("num_points").get<std::size_t>();
        m.grid.spacing = j.at("grid").at("spacing_s").get<double>();
        m.grid.validate();
        m.source = parse_source(j.at("source"), base, "source");
        m.target = parse_source(j.at("target"), base, "target");
        const auto arch = parse_architecture(j.at("architecture"), m.grid.num_points);
        if (arch.pdp_length() != m.grid.num_points)
            throw ManifestError("architecture produces " + std::to_string(arch.pdp_length()) +
                                "-bin PDPs but the grid has " + std::to_string(m.grid.num_points) + " points.");
        m.pretrain = parse_stage(j.at("pretrain"), arch, "pretrain");
        m.finetune = parse_stage(j.at("finetune"), arch, "finetune");
        m.pretrain.validate();
        m.finetune.validate(true);
        m.generate_count = j.at("generate").at("count").get<std::size_t>();
        if (m.generate_count == 0)
            throw ManifestError("generate: count must be >= 1.");
        m.generate_seed = require_seed(j.at("generate"), "generate");
        const json &e = j.at("eval");
        const std::string pairing = e.value("pairing", std::string("random"));
        if (pairing == "random")
            m.eval.pairing = eval::Pairing::random;
        else if (pairing == "identity")
            m.eval.pairing = eval::Pairing::identity;
        else
            throw ManifestError("eval: pairing must be \"random\" or \"identity\".");
        m.eval.seed = require_seed(e, "eval");
        m.eval.threshold = e.value("threshold", eval::default_ssim_threshold);
    }
    catch (const json::exception &e)
    {
        throw ManifestError("manifest '" + path.string() + "': " + e.what());
    }
    catch (const ManifestError &)
    {
        throw;
    }
    catch (const std::invalid_argument &e)
    {
        throw ManifestError("manifest '" + path.string() + "': " + e.what());
    }
    for (const auto &f : m.referenced_files())
        if (!fs::exists(f))
            throw ManifestError("manifest '" + path.string() + "': referenced file '" + f.string() +
                                "' does not exist.");
    return m;
}

io::PdpDataset materialize(const DataSource &source, const channel::DelayGrid &grid)
{
    if (source.dataset)
    {
        auto d = io::load_dataset(*source.dataset);
        if (!(d.header.grid == grid))
            throw ManifestError("dataset '" + source.dataset->string() + "' uses " +
                                std::to_string(d.header.grid.num_points) + " x " +
                                util::format_double(d.header.grid.spacing) + " s, manifest grid is " +
                                std::to_string(grid.num_points) + " x " + util::format_double(grid.spacing) + " s.");
        if (!d.header.normalized)
            throw ManifestError("dataset '" + source.dataset->string() + "' is not min-max normalized.");
        return d;
    }
    synth::DatasetSpec spec;
    spec.params = *source.params;
    spec.count = source.count;
    spec.grid = grid;
    spec.rng_seed = source.seed;
    return io::from_generated(synth::generate_dataset(spec), spec);
}

namespace
{
train::TrainResult run_stage(const std::string &stage, const fs::path &run_dir,
                             const std::function<train::TrainResult()> &body)
{
    try
    {
        return body();
    }
    catch (const train::DivergenceError &e)
    {
        const auto path = run_dir / (stage + "_last_good.ckpt");
        gan::save_checkpoint(e.last_good(), path);
        throw StageDiverged(stage, e.epoch(), path);
    }
}
} // namespace

PipelineResult run_pipeline(const ExperimentManifest &m, const fs::path &run_dir_override, const LogFn &log)
{
    auto say = [&](const std::string &s) {
        if (log)
            log(s);
    };
    PipelineResult r;
    r.run_dir = run_dir_override.empty() ? m.run_dir : run_dir_override;
    fs::create_directories(r.run_dir);

    // Validate the target before spending time on the source.
    const io::PdpDataset target = materialize(m.target, m.grid);
    util::write_file_atomic(r.run_dir / "manifest.json", m.raw.dump(2) + "\n");

    say("source: building dataset");
    const io::PdpDataset source = materialize(m.source, m.grid);
    r.source_dataset = r.run_dir / "source.bin";
    io::save_dataset(source, r.source_dataset);

    say("pretrain: " + std::to_string(m.pretrain.epochs) + " epochs on " + std::to_string(source.size()) + " PDPs");
    auto pre = run_stage("pretrain", r.run_dir, [&] { return train::train(m.pretrain, source.pdps); });
    r.pretrain_checkpoint = r.run_dir / "pretrain.ckpt";
    gan::save_checkpoint(pre.checkpoint, r.pretrain_checkpoint);
    pre.report.checkpoint_path = r.pretrain_checkpoint.string();
    train::write_report_csv(pre.report, r.run_dir / "pretrain_report.csv");

    say("finetune: " + std::to_string(m.finetune.epochs) + " epochs on " + std::to_string(target.size()) + " PDPs");
    auto fine =
        run_stage("finetune", r.run_dir, [&] { return train::fine_tune(m.finetune, target.pdps, pre.checkpoint); });
    r.finetune_checkpoint = r.run_dir / "finetune.ckpt";
    gan::save_checkpoint(fine.checkpoint, r.finetune_checkpoint);
    fine.report.checkpoint_path = r.finetune_checkpoint.string();
    train::write_report_csv(fine.report, r.run_dir / "finetune_report.csv");

    say("generate: " + std::to_string(m.generate_count) + " PDPs");
    RandomStream gen_rng(m.generate_seed);
    io::PdpDataset generated;
    generated.header.grid = m.grid;
    generated.header.normalized = true;
    generated.header.provenance = "generator: " + r.finetune_checkpoint.filename().string();
    generated.header.seed = m.generate_seed;
    generated.pdps = train::generate_pdps(fine.checkpoint, m.generate_count, gen_rng, m.finetune.noise_sigma);
    r.generated_dataset = r.run_dir / "generated.csv";
    io::save_dataset(generated, r.generated_dataset);

    say("eval: generated vs target");
    r.eval_report = eval::evaluate(target.pdps, generated.pdps, m.eval);
    r.eval_dir = r.run_dir / "eval";
    eval::write_report(r.eval_report, r.eval_dir);

    r.pretrain_report = std::move(pre.report);
    r.finetune_report = std::move(fine.report);
    const json summary = {{"name", m.name},
                          {"pretrain", train::report_summary(r.pretrain_report)},
                          {"finetune", train::report_summary(r.finetune_report)},
                          {"rmse_linear", r.eval_report.rmse_linear},
                          {"ssim_fraction_above_threshold", r.eval_report.ssim.fraction_above}};
    util::write_file_atomic(r.run_dir / "summary.json", summary.dump(2) + "\n");
    return r;
}

} // namespace pdpgan::pipeline
