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

#ifndef PDPGAN_CHECKPOINT_HPP
#define PDPGAN_CHECKPOINT_HPP

#include "pdpgan/gan.hpp"
#include "pdpgan/optimizers.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpgan::gan
{

// Container layout (all integers little-endian):
//
//   offset 0   8 bytes   magic "PDPGCKPT"
//   offset 8   u32       format version (currently 1)
//   offset 12  u32       reserved, 0
//   offset 16  u64       header length H in bytes
//   offset 24  H bytes   UTF-8 JSON header
//   offset 24+H          payload: IEEE-754 binary64 values, little-endian, concatenated in the
//                        order of header["tensors"], each tensor row-major
//
// Tensor order: generator layers (weight [in x out], bias [1 x out]) in layer order, then the
// discriminator layers, then Adam moments (m_0, v_0, m_1, v_1, ...) for each network whose
// optimizer is Adam, generator first. docs/formats.md shows a complete header.
struct Checkpoint
{
    static constexpr std::uint32_t format_version = 1;

    Architecture architecture;
    GeneratorNet generator;
    DiscriminatorNet discriminator;
    train::OptimizerState g_optimizer;
    train::OptimizerState d_optimizer;
    std::uint64_t epoch = 0;
    std::string config_fingerprint;
    double grid_spacing = 1e-9; // delay spacing of the PDPs the model was trained on [s]

    void validate() const;
    bool operator==(const Checkpoint &) const = default;
};

class CheckpointError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> serialize(const Checkpoint &ckpt);
Checkpoint deserialize(const std::vector<std::uint8_t> &bytes);

// Writes through a temporary file and an atomic rename.
void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

nlohmann::json to_json(const Architecture &a);
Architecture architecture_from_json(const nlohmann::json &j);

} // namespace pdpgan::gan

#endif
