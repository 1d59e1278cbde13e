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

#ifndef PDPGAN_DATASET_IO_HPP
#define PDPGAN_DATASET_IO_HPP

#include "pdpgan/channel_core.hpp"
#include "pdpgan/synthetic_channel.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpgan::io
{

inline constexpr std::uint32_t dataset_format_version = 1;

struct DatasetHeader
{
    std::uint32_t version = dataset_format_version;
    channel::DelayGrid grid;
    bool normalized = true;
    std::string provenance;
    std::string params_fingerprint; // empty when the data did not come from the synthetic generator
    std::optional<std::uint64_t> seed;
    std::optional<synth::StochasticChannelParams> params;

    bool operator==(const DatasetHeader &) const = default;
};

struct PdpDataset
{
    DatasetHeader header;
    std::vector<channel::Pdp> pdps;
    std::vector<channel::NormParams> norm; // empty, or one entry per row

    // Row lengths, grids, flags and value ranges agree with the header.
    void validate() const;
    std::size_t size() const { return pdps.size(); }
};

class DatasetError : public std::runtime_error
{
  public:
    enum class Kind
    {
        io,
        unsupported_version,
        malformed_header,
        row_length,
        malformed_value,
        invalid_value
    };

    // `row` is 0-based; `line` (text) or byte `offset` (binary) locate the problem in the file.
    DatasetError(Kind kind, const std::string &message, std::optional<std::size_t> row = std::nullopt,
                 std::optional<std::size_t> line = std::nullopt, std::optional<std::size_t> offset = std::nullopt);

    Kind kind() const { return kind_; }
    std::optional<std::size_t> row() const { return row_; }
    std::optional<std::size_t> line() const { return line_; }
    std::optional<std::size_t> offset() const { return offset_; }

  private:
    Kind kind_;
    std::optional<std::size_t> row_, line_, offset_;
};

enum class DatasetFormat
{
    csv,   // <path> holds one PDP per line, <path>.json holds the header
    binary // magic, version, JSON header and packed little-endian doubles in one file
};

// ".bin" selects the binary variant, anything else the CSV variant.
DatasetFormat format_for_path(const std::filesystem::path &path);

void save_dataset(const PdpDataset &dataset, const std::filesystem::path &path);
void save_dataset(const PdpDataset &dataset, const std::filesystem::path &path, DatasetFormat format);

// The binary variant is recognized by its magic bytes, independent of the extension.
PdpDataset load_dataset(const std::filesystem::path &path);

// Paths that make up a stored dataset (the body, plus the sidecar for CSV).
std::vector<std::filesystem::path> dataset_files(const std::filesystem::path &path);

nlohmann::json header_to_json(const DatasetHeader &header, std::size_t num_rows);

PdpDataset from_generated(const synth::GeneratedDataset &generated, const synth::DatasetSpec &spec);

nlohmann::json to_json(const synth::StochasticChannelParams &params);
synth::StochasticChannelParams params_from_json(const nlohmann::json &j);
void save_params(const synth::StochasticChannelParams &params, const std::filesystem::path &path);
synth::StochasticChannelParams load_params(const std::filesystem::path &path);

// CTF file: CSV lines "real,imag", one per frequency sample, plus a sidecar <file>.json holding
// {"start_frequency_hz", "spacing_hz", "channel_id"}.
struct CtfRecord
{
    channel::ChannelTransferFunction ctf;
    std::string channel_id;
};

CtfRecord load_ctf(const std::filesystem::path &path);
void save_ctf(const CtfRecord &record, const std::filesystem::path &path);

// Each file becomes one min-max normalized PDP; a directory argument expands to its *.csv
// files in name order.
PdpDataset import_ctf(const std::vector<std::filesystem::path> &paths, double band_start, double band_width);

} // namespace pdpgan::io

#endif
