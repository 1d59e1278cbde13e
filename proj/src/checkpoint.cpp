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

#include "pdpgan/checkpoint.hpp"
#include "pdpgan/file_util.hpp"

#include <cstring>

namespace pdpgan::gan
{

namespace
{
constexpr char magic[8] = {'P', 'D', 'P', 'G', 'C', 'K', 'P', 'T'};
constexpr std::size_t prefix_size = 24;

nlohmann::json to_json(const MlpSpec &s)
{
    return {{"input", s.input},
            {"widths", s.widths},
            {"hidden_activation", to_string(s.hidden)},
            {"output_activation", to_string(s.output)}};
}

MlpSpec mlp_from_json(const nlohmann::json &j)
{
    MlpSpec s;
    s.input = j.at("input").get<std::size_t>();
    s.widths = j.at("widths").get<std::vector<std::size_t>>();
    s.hidden = activation_from_string(j.at("hidden_activation").get<std::string>());
    s.output = activation_from_string(j.at("output_activation").get<std::string>());
    return s;
}

struct NamedTensor
{
    std::string name;
    const ad::Tensor *tensor;
};

std::vector<NamedTensor> tensor_list(const Checkpoint &c)
{
    std::vector<NamedTensor> out;
    auto add_mlp = [&](const std::string &prefix, const Mlp &m) {
        for (std::size_t i = 0; i < m.layers.size(); ++i)
        {
            out.push_back({prefix + ".layer" + std::to_string(i) + ".weight", &m.layers[i].weight});
            out.push_back({prefix + ".layer" + std::to_string(i) + ".bias", &m.layers[i].bias});
        }
    };
    auto add_adam = [&](const std::string &prefix, const train::OptimizerState &s) {
        if (s.kind != train::OptimizerKind::adam)
            return;
        for (std::size_t i = 0; i < s.adam.m.size(); ++i)
        {
            out.push_back({prefix + ".adam.m" + std::to_string(i), &s.adam.m[i]});
            out.push_back({prefix + ".adam.v" + std::to_string(i), &s.adam.v[i]});
        }
    };
    add_mlp("generator", c.generator.mlp);
    add_mlp("discriminator", c.discriminator.mlp);
    add_adam("optimizer.generator", c.g_optimizer);
    add_adam("optimizer.discriminator", c.d_optimizer);
    return out;
}

nlohmann::json optimizer_json(const train::OptimizerState &s)
{
    nlohmann::json j = {{"kind", train::to_string(s.kind)}};
    if (s.kind == train::OptimizerKind::adam)
        j["step"] = s.adam.step;
    return j;
}

void check_mlp(const std::string &name, const Mlp &m)
{
    if (m.layers.size() != m.spec.widths.size())
        throw CheckpointError(name + ": " + std::to_string(m.layers.size()) + " layers stored, architecture declares " +
                              std::to_string(m.spec.widths.size()) + ".");
    std::size_t in = m.spec.input;
    for (std::size_t i = 0; i < m.layers.size(); ++i)
    {
        const std::size_t w = m.spec.widths[i];
        const ad::Shape ws{in, w}, bs{1, w};
        if (m.layers[i].weight.shape() != ws || m.layers[i].bias.shape() != bs)
            throw CheckpointError(name + ".layer" + std::to_string(i) + ": stored shapes " +
                                  ad::to_string(m.layers[i].weight.shape()) + "/" +
                                  ad::to_string(m.layers[i].bias.shape()) + " do not match architecture " +
                                  ad::to_string(ws) + "/" + ad::to_string(bs) + ".");
        in = w;
    }
}
} // namespace

nlohmann::json to_json(const Architecture &a)
{
    return {{"generator", to_json(a.generator)},
            {"discriminator", to_json(a.discriminator)},
            {"leaky_slope", a.leaky_slope}};
}

Architecture architecture_from_json(const nlohmann::json &j)
{
    Architecture a;
    a.generator = mlp_from_json(j.at("generator"));
    a.discriminator = mlp_from_json(j.at("discriminator"));
    a.leaky_slope = j.value("leaky_slope", 0.2);
    a.validate();
    return a;
}

void Checkpoint::validate() const
{
    architecture.validate();
    if (!(generator.mlp.spec == architecture.generator) || !(discriminator.mlp.spec == architecture.discriminator))
        throw CheckpointError("Network specs disagree with the architecture descriptor.");
    check_mlp("generator", generator.mlp);
    check_mlp("discriminator", discriminator.mlp);
}

std::vector<std::uint8_t> serialize(const Checkpoint &ckpt)
{
    ckpt.validate();
    const auto tensors = tensor_list(ckpt);

    nlohmann::json header;
    header["format"] = "pdpgan-checkpoint";
    header["version"] = Checkpoint::format_version;
    header["architecture"] = to_json(ckpt.architecture);
    header["epoch"] = ckpt.epoch;
    header["config_fingerprint"] = ckpt.config_fingerprint;
    header["grid_spacing_s"] = ckpt.grid_spacing;
    header["optimizers"] = {{"generator", optimizer_json(ckpt.g_optimizer)},
                            {"discriminator", optimizer_json(ckpt.d_optimizer)}};
    std::size_t total = 0;
    nlohmann::json list = nlohmann::json::array();
    for (const auto &t : tensors)
    {
        list.push_back({{"name", t.name}, {"shape", t.tensor->shape()}});
        total += t.tensor->size();
    }
    header["tensors"] = std::move(list);
    header["payload_values"] = total;
    const std::string text = header.dump();

    std::vector<std::uint8_t> out;
    out.reserve(prefix_size + text.size() + 8 * total);
    out.insert(out.end(), magic, magic + sizeof(magic));
    util::append_u32(out, Checkpoint::format_version);
    util::append_u32(out, 0);
    util::append_u64(out, text.size());
    out.insert(out.end(), text.begin(), text.end());
    for (const auto &t : tensors)
        for (double v : t.tensor->values())
            util::append_f64(out, v);
    return out;
}

Checkpoint deserialize(const std::vector<std::uint8_t> &bytes)
{
    if (bytes.size() < prefix_size || std::memcmp(bytes.data(), magic, sizeof(magic)) != 0)
        throw CheckpointError("Not a pdpgan checkpoint (bad magic).");
    const auto version = util::read_u32(bytes.data() + 8);
    if (version != Checkpoint::format_version)
        throw CheckpointError("unsupported version " + std::to_string(version) + " (expected " +
                              std::to_string(Checkpoint::format_version) + ").");
    const auto header_len = util::read_u64(bytes.data() + 16);
    if (header_len > bytes.size() - prefix_size)
        throw CheckpointError("Checkpoint header length exceeds file size.");

    nlohmann::json header;
    try
    {
        header = nlohmann::json::parse(bytes.begin() + prefix_size,
                                       bytes.begin() + static_cast<std::ptrdiff_t>(prefix_size + header_len));
    }
    catch (const nlohmann::json::exception &e)
    {
        throw CheckpointError(std::string("Malformed checkpoint header: ") + e.what());
    }

    Checkpoint c;
    try
    {
        if (header.at("format").get<std::string>() != "pdpgan-checkpoint")
            throw CheckpointError("Header format tag is not 'pdpgan-checkpoint'.");
        c.architecture = architecture_from_json(header.at("architecture"));
        c.epoch = header.at("epoch").get<std::uint64_t>();
        c.config_fingerprint = header.at("config_fingerprint").get<std::string>();
        c.grid_spacing = header.at("grid_spacing_s").get<double>();
        c.generator.mlp = Mlp::zeros(c.architecture.generator);
        c.discriminator.mlp = Mlp::zeros(c.architecture.discriminator);
        const auto &opt = header.at("optimizers");
        auto load_opt = [](const nlohmann::json &j, Mlp &m) {
            train::OptimizerState s = train::OptimizerState::fresh(
                train::optimizer_from_string(j.at("kind").get<std::string>()), m.parameters());
            if (s.kind == train::OptimizerKind::adam)
                s.adam.step = j.at("step").get<std::uint64_t>();
            return s;
        };
        c.g_optimizer = load_opt(opt.at("generator"), c.generator.mlp);
        c.d_optimizer = load_opt(opt.at("discriminator"), c.discriminator.mlp);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw CheckpointError(std::string("Malformed checkpoint header: ") + e.what());
    }
    catch (const std::invalid_argument &e)
    {
        throw CheckpointError(std::string("Invalid checkpoint header: ") + e.what());
    }

    // The expected tensor list follows from the architecture; the stored list must agree.
    const auto expected = tensor_list(c);
    std::size_t total = 0;
    try
    {
        const auto &stored = header.at("tensors");
        if (stored.size() != expected.size())
            throw CheckpointError("Checkpoint lists " + std::to_string(stored.size()) +
                                  " tensors, architecture implies " + std::to_string(expected.size()) + ".");
        for (std::size_t i = 0; i < expected.size(); ++i)
        {
            const auto name = stored[i].at("name").get<std::string>();
            const auto shape = stored[i].at("shape").get<ad::Shape>();
            if (name != expected[i].name || shape != expected[i].tensor->shape())
                throw CheckpointError("Tensor " + std::to_string(i) + " is '" + name + "' " + ad::to_string(shape) +
                                      ", expected '" + expected[i].name + "' " +
                                      ad::to_string(expected[i].tensor->shape()) + ".");
            total += expected[i].tensor->size();
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw CheckpointError(std::string("Malformed checkpoint tensor list: ") + e.what());
    }
    const std::size_t payload_offset = prefix_size + header_len;
    if (bytes.size() - payload_offset != 8 * total)
        throw CheckpointError("Checkpoint payload holds " + std::to_string(bytes.size() - payload_offset) +
                              " bytes, expected " + std::to_string(8 * total) + ".");

    const std::uint8_t *p = bytes.data() + payload_offset;
    for (const auto &t : expected)
    {
        auto *dst = const_cast<ad::Tensor *>(t.tensor);
        for (double &v : dst->values())
        {
            v = util::read_f64(p);
            p += 8;
        }
    }
    c.validate();
    return c;
}

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path)
{
    util::write_file_atomic(path, serialize(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path &path)
{
    std::string text;
    try
    {
        text = util::read_file(path);
    }
    catch (const std::runtime_error &e)
    {
        throw CheckpointError(e.what());
    }
    try
    {
        return deserialize(std::vector<std::uint8_t>(text.begin(), text.end()));
    }
    catch (const CheckpointError &e)
    {
        throw CheckpointError(path.string() + ": " + e.what());
    }
}

} // namespace pdpgan::gan
