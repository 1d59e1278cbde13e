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

// Command-line front end: simulate, import-ctf, train, generate, eval, pipeline, report.
// Exit codes: 0 success, 2 usage or validation, 3 numeric divergence, 1 other runtime failure.

#include "pdpgan/checkpoint.hpp"
#include "pdpgan/dataset_io.hpp"
#include "pdpgan/evaluation.hpp"
#include "pdpgan/file_util.hpp"
#include "pdpgan/pipeline.hpp"
#include "pdpgan/synthetic_channel.hpp"
#include "pdpgan/training.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace pdpgan;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;
constexpr int exit_divergence = 3;

// Input that fails validation; maps to exit code 2.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

void report_error(const std::string &kind, const std::string &message, int code,
                  const nlohmann::json &extra = nlohmann::json::object())
{
    nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
    for (auto it = extra.begin(); it != extra.end(); ++it)
        j[it.key()] = it.value();
    std::cerr << j.dump() << "\n";
}

void require_file(const fs::path &p, const std::string &flag)
{
    if (!fs::exists(p))
        throw UsageError(flag + ": '" + p.string() + "' does not exist");
}

void require_dataset(const fs::path &p, const std::string &flag)
{
    for (const auto &f : io::dataset_files(p))
        require_file(f, flag);
}

nlohmann::json read_json(const fs::path &p, const std::string &flag)
{
    require_file(p, flag);
    try
    {
        return nlohmann::json::parse(util::read_file(p));
    }
    catch (const nlohmann::json::exception &e)
    {
        throw UsageError(flag + ": '" + p.string() + "' is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs
{
    std::string params_file, fit_from, out;
    std::size_t count = 10000;
    std::uint64_t seed = 0;
    std::size_t num_points = 401;
    double spacing = 1e-9;
    unsigned threads = 1;
};

int run_simulate(const SimulateArgs &a)
{
    if (a.count == 0)
        throw UsageError("--count must be >= 1");
    synth::DatasetSpec spec;
    spec.count = a.count;
    spec.rng_seed = a.seed;
    spec.grid = {a.num_points, a.spacing};
    if (!a.params_file.empty())
    {
        require_file(a.params_file, "--params");
        spec.params = io::load_params(a.params_file);
    }
    else if (!a.fit_from.empty())
    {
        require_dataset(a.fit_from, "--fit-from");
        const auto measured = io::load_dataset(a.fit_from);
        spec.grid = measured.header.grid;
        spec.params = synth::fit_params(measured.pdps);
        spec.params.label = "fitted to " + fs::path(a.fit_from).filename().string();
        // Paths past the grid span are never observable; keep the fit inside it.
        spec.params.max_delay = std::min(spec.params.max_delay, spec.grid.delay_of(spec.grid.num_points - 1));
    }
    spec.params.validate(spec.grid);
    const auto generated = synth::generate_dataset(spec, a.threads);
    io::save_dataset(io::from_generated(generated, spec), a.out);
    std::cout << nlohmann::json({{"written", a.out}, {"rows", a.count}, {"params", io::to_json(spec.params)}}).dump()
              << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- import-ctf

struct ImportArgs
{
    std::vector<std::string> inputs;
    double band_start = 0.0, band_width = 0.0;
    std::string out;
};

int run_import(const ImportArgs &a)
{
    std::vector<fs::path> paths;
    for (const auto &p : a.inputs)
    {
        require_file(p, "input");
        paths.emplace_back(p);
    }
    auto d = io::import_ctf(paths, a.band_start, a.band_width);
    io::save_dataset(d, a.out);
    std::cout << nlohmann::json({{"written", a.out}, {"rows", d.size()}, {"num_points", d.header.grid.num_points}})
                     .dump()
              << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- train

struct TrainArgs
{
    std::string data, out, init, config, report;
    std::size_t epochs = 10000;
    std::uint64_t seed = 0;
    std::size_t snapshot_every = 0;
    bool epochs_given = false;
};

int run_train(const TrainArgs &a, CLI::App *cmd)
{
    require_dataset(a.data, "--data");
    if (!a.init.empty())
        require_file(a.init, "--init");
    const auto data = io::load_dataset(a.data);
    if (!data.header.normalized)
        throw UsageError("--data: '" + a.data + "' is not min-max normalized");

    std::optional<gan::Checkpoint> init;
    if (!a.init.empty())
        init = gan::load_checkpoint(a.init);

    train::TrainConfig defaults;
    defaults.architecture =
        init ? init->architecture : gan::Architecture::paper_default(data.header.grid.num_points);
    train::TrainConfig config = defaults;
    if (!a.config.empty())
        config = train::train_config_from_json(read_json(a.config, "--config"), defaults);
    if (cmd->count("--epochs") > 0 || a.config.empty())
        config.epochs = a.epochs;
    config.seed = a.seed;
    if (a.snapshot_every > 0)
        config.snapshot_every = a.snapshot_every;
    if (config.architecture.pdp_length() != data.header.grid.num_points)
        throw UsageError("architecture produces " + std::to_string(config.architecture.pdp_length()) +
                         "-bin PDPs; the dataset has " + std::to_string(data.header.grid.num_points));

    const fs::path out(a.out);
    const fs::path report = a.report.empty() ? fs::path(a.out + ".report.csv") : fs::path(a.report);
    train::SnapshotFn snapshot = [&](const gan::Checkpoint &c) {
        gan::save_checkpoint(c, fs::path(a.out + ".epoch" + std::to_string(c.epoch)));
    };

    train::TrainResult result;
    try
    {
        if (init)
            result = train::fine_tune(config, data.pdps, *init, snapshot);
        else
            result = train::train(config, data.pdps, std::nullopt, snapshot);
    }
    catch (const train::DivergenceError &e)
    {
        const fs::path last_good(a.out + ".last_good");
        gan::save_checkpoint(e.last_good(), last_good);
        train::write_report_csv(e.partial_report(), report);
        std::cout << "last good checkpoint: " << last_good.string() << "\n";
        report_error("divergence", e.what(), exit_divergence,
                     {{"epoch", e.epoch()}, {"last_good_checkpoint", last_good.string()}});
        return exit_divergence;
    }
    gan::save_checkpoint(result.checkpoint, out);
    result.report.checkpoint_path = out.string();
    train::write_report_csv(result.report, report);
    util::write_file_atomic(fs::path(report.string() + ".json"), train::report_summary(result.report).dump(2) + "\n");
    std::cout << train::report_summary(result.report).dump() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs
{
    std::string ckpt, out, config;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::size_t num_points = 0;
    double noise_sigma = 1.0;
};

int run_generate(const GenerateArgs &a)
{
    if (a.count == 0)
        throw UsageError("--count must be >= 1");
    require_file(a.ckpt, "--ckpt");
    const auto ckpt = gan::load_checkpoint(a.ckpt);
    if (!a.config.empty())
    {
        const auto j = read_json(a.config, "--config");
        if (!j.contains("architecture"))
            throw UsageError("--config: '" + a.config + "' has no architecture");
        const auto expected = gan::architecture_from_json(j.at("architecture"));
        const auto diff = gan::architecture_diff(expected, ckpt.architecture);
        if (!diff.empty())
        {
            std::string msg = "checkpoint architecture does not match --config:";
            for (const auto &d : diff)
                msg += "\n  " + d;
            report_error("architecture_mismatch", msg, exit_usage, {{"diff", diff}});
            return exit_usage;
        }
    }
    if (a.num_points != 0 && a.num_points != ckpt.architecture.pdp_length())
    {
        const std::string d = "generator output layer: expected width " + std::to_string(a.num_points) +
                              ", checkpoint has " + std::to_string(ckpt.architecture.pdp_length());
        report_error("architecture_mismatch", d, exit_usage, {{"diff", {d}}});
        return exit_usage;
    }
    RandomStream rng(a.seed);
    io::PdpDataset d;
    d.header.grid = {ckpt.architecture.pdp_length(), ckpt.grid_spacing};
    d.header.normalized = true;
    d.header.provenance = "generator: " + fs::path(a.ckpt).filename().string();
    d.header.seed = a.seed;
    d.pdps = train::generate_pdps(ckpt, a.count, rng, a.noise_sigma);
    io::save_dataset(d, a.out);
    std::cout << nlohmann::json({{"written", a.out}, {"rows", a.count}}).dump() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- eval

struct EvalArgs
{
    std::string reference, generated, out, pairing = "random";
    std::optional<std::uint64_t> seed;
    double threshold = eval::default_ssim_threshold;
};

int run_eval(const EvalArgs &a)
{
    require_dataset(a.reference, "--reference");
    require_dataset(a.generated, "--generated");
    eval::EvalOptions opt;
    opt.threshold = a.threshold;
    if (a.pairing == "identity")
        opt.pairing = eval::Pairing::identity;
    else if (!a.seed)
        throw UsageError("--seed is required for random pairing");
    opt.seed = a.seed.value_or(0);

    const auto ref = io::load_dataset(a.reference);
    const auto gen = io::load_dataset(a.generated);
    if (!(ref.header.grid == gen.header.grid))
        throw UsageError("delay grids differ: reference " + std::to_string(ref.header.grid.num_points) + " x " +
                         util::format_double(ref.header.grid.spacing) + " s, generated " +
                         std::to_string(gen.header.grid.num_points) + " x " +
                         util::format_double(gen.header.grid.spacing) + " s");
    const auto report = eval::evaluate(ref.pdps, gen.pdps, opt);
    eval::write_report(report, a.out);
    std::cout << nlohmann::json({{"rmse_linear", report.rmse_linear},
                                 {"rmse_db", report.rmse_db},
                                 {"ssim_fraction_above_threshold", report.ssim.fraction_above},
                                 {"wasserstein_total_power", report.wasserstein_total_power},
                                 {"report", (fs::path(a.out) / "report.json").string()}})
                     .dump()
              << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- pipeline / report

int run_pipeline_cmd(const std::string &manifest_path, const std::string &run_dir)
{
    const auto manifest = pipeline::load_manifest(manifest_path);
    try
    {
        const auto r = pipeline::run_pipeline(manifest, run_dir, [](const std::string &s) { std::cerr << s << "\n"; });
        std::cout << nlohmann::json({{"run_dir", r.run_dir.string()},
                                     {"rmse_linear", r.eval_report.rmse_linear},
                                     {"ssim_fraction_above_threshold", r.eval_report.ssim.fraction_above},
                                     {"report", (r.eval_dir / "report.json").string()}})
                         .dump()
                  << "\n";
    }
    catch (const pipeline::StageDiverged &e)
    {
        std::cout << "last good checkpoint: " << e.checkpoint_path().string() << "\n";
        report_error("divergence", e.what(), exit_divergence,
                     {{"stage", e.stage()}, {"epoch", e.epoch()}, {"last_good_checkpoint", e.checkpoint_path()}});
        return exit_divergence;
    }
    return exit_ok;
}

int run_report(const std::string &run_dir)
{
    const fs::path dir(run_dir);
    const auto report = read_json(dir / "eval" / "report.json", "--run-dir");
    std::cout << "run: " << dir.string() << "\n";
    if (fs::exists(dir / "summary.json"))
    {
        const auto s = read_json(dir / "summary.json", "--run-dir");
        for (const char *stage : {"pretrain", "finetune"})
            if (s.contains(stage))
                std::cout << stage << ": " << s[stage]["epochs_run"] << " epochs, final d_loss "
                          << s[stage]["final_d_loss"] << ", convergence epoch " << s[stage]["convergence_epoch"]
                          << ", " << s[stage]["total_seconds"] << " s\n";
    }
    std::cout << "average-PDP RMSE (linear): " << report["rmse_linear"] << "\n"
              << "average-PDP RMSE (dB): " << report["rmse_db"] << "\n"
              << "SSIM fraction above " << report["ssim"]["threshold"] << ": "
              << report["ssim"]["fraction_above_threshold"] << "\n"
              << "SSIM median: " << report["ssim"]["quantiles"]["0.5"] << "\n"
              << "delay spread median [s]: reference " << report["delay_spread_s"]["reference_quantiles"]["0.5"]
              << ", generated " << report["delay_spread_s"]["generated_quantiles"]["0.5"] << "\n"
              << "W1 total power: " << report["wasserstein_total_power"] << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"pdpgan: learn, generate and evaluate multipath power delay profiles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pdpgan 1.0.0");

    const std::string seed_help = "RNG seed (required; no entropy-based default)";

    SimulateArgs sim;
    auto *c_sim = app.add_subcommand("simulate", "Draw a synthetic PDP dataset");
    auto *o_params = c_sim->add_option("--params", sim.params_file, "Channel parameter JSON");
    c_sim->add_option("--fit-from", sim.fit_from, "Fit channel parameters to this dataset first")->excludes(o_params);
    c_sim->add_option("--count", sim.count, "Number of channels")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, seed_help)->required();
    c_sim->add_option("--out", sim.out, "Output dataset (.bin selects the binary variant)")->required();
    c_sim->add_option("--num-points", sim.num_points, "Delay bins")->capture_default_str();
    c_sim->add_option("--spacing", sim.spacing, "Delay bin spacing [s]")->capture_default_str();
    c_sim->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();

    ImportArgs imp;
    auto *c_imp = app.add_subcommand("import-ctf", "Convert CTF files into a normalized PDP dataset");
    c_imp->add_option("inputs", imp.inputs, "CTF CSV files or directories")->required();
    c_imp->add_option("--band-start", imp.band_start, "Band start [Hz]")->required();
    c_imp->add_option("--band-width", imp.band_width, "Band width [Hz]")->required();
    c_imp->add_option("--out", imp.out, "Output dataset")->required();

    TrainArgs tr;
    auto *c_train = app.add_subcommand("train", "Train a WGAN-GP (fine-tune when --init is given)");
    c_train->add_option("--data", tr.data, "Training dataset")->required();
    c_train->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
    c_train->add_option("--seed", tr.seed, seed_help)->required();
    c_train->add_option("--out", tr.out, "Output checkpoint")->required();
    c_train->add_option("--init", tr.init, "Source checkpoint to fine-tune");
    c_train->add_option("--config", tr.config, "Training configuration JSON");
    c_train->add_option("--report", tr.report, "Loss history CSV (default <out>.report.csv)");
    c_train->add_option("--snapshot-every", tr.snapshot_every, "Write <out>.epochN every N epochs");

    GenerateArgs gen;
    auto *c_gen = app.add_subcommand("generate", "Sample PDPs from a generator checkpoint");
    c_gen->add_option("--ckpt", gen.ckpt, "Checkpoint")->required();
    c_gen->add_option("--count", gen.count, "Number of PDPs")->required();
    c_gen->add_option("--seed", gen.seed, seed_help)->required();
    c_gen->add_option("--out", gen.out, "Output dataset")->required();
    c_gen->add_option("--config", gen.config, "Expected architecture (training configuration JSON)");
    c_gen->add_option("--num-points", gen.num_points, "Expected PDP length");
    c_gen->add_option("--noise-sigma", gen.noise_sigma, "Latent noise standard deviation")->capture_default_str();

    EvalArgs ev;
    std::uint64_t eval_seed = 0;
    auto *c_eval = app.add_subcommand("eval", "Compare generated PDPs with reference PDPs");
    c_eval->add_option("--reference", ev.reference, "Reference dataset")->required();
    c_eval->add_option("--generated", ev.generated, "Generated dataset")->required();
    c_eval->add_option("--out", ev.out, "Report directory")->required();
    auto *o_eval_seed = c_eval->add_option("--seed", eval_seed, "Seed for random SSIM pairing");
    c_eval->add_option("--pairing", ev.pairing, "random | identity")
        ->check(CLI::IsMember({"random", "identity"}))
        ->capture_default_str();
    c_eval->add_option("--threshold", ev.threshold, "SSIM threshold")->capture_default_str();

    std::string manifest, run_dir;
    auto *c_pipe = app.add_subcommand("pipeline", "Run simulate, pretrain, fine-tune, generate and eval");
    c_pipe->add_option("--manifest", manifest, "Experiment manifest JSON")->required();
    c_pipe->add_option("--run-dir", run_dir, "Override the manifest's run directory");

    std::string report_dir;
    auto *c_report = app.add_subcommand("report", "Summarize a pipeline run directory");
    c_report->add_option("--run-dir", report_dir, "Run directory")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        report_error("usage", e.what(), exit_usage);
        return exit_usage;
    }

    try
    {
        if (*c_sim)
            return run_simulate(sim);
        if (*c_imp)
            return run_import(imp);
        if (*c_train)
            return run_train(tr, c_train);
        if (*c_gen)
            return run_generate(gen);
        if (*c_eval)
        {
            if (*o_eval_seed)
                ev.seed = eval_seed;
            return run_eval(ev);
        }
        if (*c_pipe)
            return run_pipeline_cmd(manifest, run_dir);
        if (*c_report)
            return run_report(report_dir);
    }
    catch (const UsageError &e)
    {
        report_error("usage", e.what(), exit_usage);
        return exit_usage;
    }
    catch (const pipeline::ManifestError &e)
    {
        report_error("manifest", e.what(), exit_usage);
        return exit_usage;
    }
    catch (const io::DatasetError &e)
    {
        report_error("dataset", e.what(), exit_usage);
        return exit_usage;
    }
    catch (const gan::CheckpointError &e)
    {
        report_error("checkpoint", e.what(), exit_usage);
        return exit_usage;
    }
    catch (const std::invalid_argument &e)
    {
        report_error("validation", e.what(), exit_usage);
        return exit_usage;
    }
    catch (const std::out_of_range &e)
    {
        report_error("validation", e.what(), exit_usage);
        return exit_usage;
    }
    catch (const std::exception &e)
    {
        report_error("runtime", e.what(), exit_runtime);
        return exit_runtime;
    }
    return exit_runtime;
}
