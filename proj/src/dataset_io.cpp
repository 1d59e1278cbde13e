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

#include "pdpgan/dataset_io.hpp"
#include "pdpgan/file_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace pdpgan::io
{

namespace
{
constexpr char magic[8] = {'P', 'D', 'P', 'G', 'D', 'S', 'E', 'T'};
constexpr std::size_t prefix_size = 24;

std::string where(std::optional<std::size_t> row, std::optional<std::size_t> line, std::optional<std::size_t> offset)
{
    std::string s;
    if (row)
        s += " [row " + std::to_string(*row) + "]";
    if (line)
        s += " [line " + std::to_string(*line) + "]";
    if (offset)
        s += " [offset " + std::to_string(*offset) + "]";
    return s;
}

std::filesystem::path sidecar_of(const std::filesystem::path &path)
{
    return std::filesystem::path(path.string() + ".json");
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Parses "v0,v1,...". Returns false with `bad` set to the failing field on malformed input.
bool parse_row(std::string_view line, std::vector<double> &out, std::size_t &bad)
{
    out.clear();
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    const char *p = line.data();
    const char *end = p + line.size();
    if (p == end)
        return true;
    while (true)
    {
        while (p < end && *p == ' ')
            ++p;
        double v = 0.0;
        const auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc())
        {
            bad = out.size();
            return false;
        }
        out.push_back(v);
        p = res.ptr;
        while (p < end && *p == ' ')
            ++p;
        if (p == end)
            return true;
        if (*p != ',')
        {
            bad = out.size() - 1;
            return false;
        }
        ++p;
    }
}

DatasetHeader header_from_json(const nlohmann::json &j, std::size_t &num_rows, std::optional<std::size_t> offset)
{
    DatasetHeader h;
    try
    {
        if (j.at("format").get<std::string>() != "pdpgan-pdp-dataset")
            throw DatasetError(DatasetError::Kind::malformed_header, "format tag is not 'pdpgan-pdp-dataset'",
                               std::nullopt, std::nullopt, offset);
        h.version = j.at("version").get<std::uint32_t>();
        if (h.version != dataset_format_version)
            throw DatasetError(DatasetError::Kind::unsupported_version,
                               "unsupported version " + std::to_string(h.version) + " (expected " +
                                   std::to_string(dataset_format_version) + ")",
                               std::nullopt, std::nullopt, offset);
        h.grid.num_points = j.at("num_points").get<std::size_t>();
        h.grid.spacing = j.at("spacing_s").get<double>();
        num_rows = j.at("num_rows").get<std::size_t>();
        h.normalized = j.at("normalized").get<bool>();
        h.provenance = j.value("provenance", std::string());
        h.params_fingerprint = j.value("params_fingerprint", std::string());
        if (j.contains("seed") && !j.at("seed").is_null())
            h.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("params") && !j.at("params").is_null())
            h.params = params_from_json(j.at("params"));
        h.grid.validate();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw DatasetError(DatasetError::Kind::malformed_header, std::string("malformed header: ") + e.what(),
                           std::nullopt, std::nullopt, offset);
    }
    catch (const std::invalid_argument &e)
    {
        throw DatasetError(DatasetError::Kind::malformed_header, std::string("invalid header: ") + e.what(),
                           std::nullopt, std::nullopt, offset);
    }
    return h;
}

std::vector<channel::NormParams> norm_from_json(const nlohmann::json &j, std::size_t num_rows)
{
    std::vector<channel::NormParams> out;
    if (!j.contains("norm") || j.at("norm").is_null())
        return out;
    try
    {
        const auto &arr = j.at("norm");
        if (arr.size() != num_rows)
            throw DatasetError(DatasetError::Kind::malformed_header,
                               "norm holds " + std::to_string(arr.size()) + " entries for " +
                                   std::to_string(num_rows) + " rows");
        for (const auto &e : arr)
            out.push_back({e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<bool>()});
    }
    catch (const nlohmann::json::exception &e)
    {
        throw DatasetError(DatasetError::Kind::malformed_header, std::string("malformed norm entry: ") + e.what());
    }
    return out;
}

void check_values(const PdpDataset &d, bool line_numbers)
{
    for (std::size_t r = 0; r < d.pdps.size(); ++r)
    {
        const auto &p = d.pdps[r].powers;
        if (p.size() != d.header.grid.num_points)
            throw DatasetError(DatasetError::Kind::row_length,
                               "row has " + std::to_string(p.size()) + " values, expected " +
                                   std::to_string(d.header.grid.num_points),
                               r, line_numbers ? std::optional<std::size_t>(r + 1) : std::nullopt);
        for (std::size_t i = 0; i < p.size(); ++i)
        {
            const double v = p[i];
            const bool bad = !std::isfinite(v) || v < 0.0 || (d.header.normalized && v > 1.0);
            if (bad)
                throw DatasetError(DatasetError::Kind::invalid_value,
                                   "value " + util::format_double(v) + " in column " + std::to_string(i) +
                                       (d.header.normalized ? " is outside [0, 1]" : " is negative or non-finite"),
                                   r, line_numbers ? std::optional<std::size_t>(r + 1) : std::nullopt);
        }
    }
}

PdpDataset assemble(const DatasetHeader &h, std::vector<std::vector<double>> rows)
{
    PdpDataset d;
    d.header = h;
    d.pdps.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
        d.pdps[r].powers = std::move(rows[r]);
        d.pdps[r].grid = h.grid;
        d.pdps[r].normalized = h.normalized;
    }
    return d;
}

PdpDataset load_binary(const std::string &bytes)
{
    const auto *u = reinterpret_cast<const std::uint8_t *>(bytes.data());
    const auto version = util::read_u32(u + 8);
    if (version != dataset_format_version)
        throw DatasetError(DatasetError::Kind::unsupported_version,
                           "unsupported version " + std::to_string(version) + " (expected " +
                               std::to_string(dataset_format_version) + ")",
                           std::nullopt, std::nullopt, 8);
    const auto header_len = util::read_u64(u + 16);
    if (header_len > bytes.size() - prefix_size)
        throw DatasetError(DatasetError::Kind::malformed_header, "header length exceeds file size", std::nullopt,
                           std::nullopt, 16);
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(bytes.begin() + prefix_size,
                                  bytes.begin() + static_cast<std::ptrdiff_t>(prefix_size + header_len));
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw DatasetError(DatasetError::Kind::malformed_header, std::string("malformed header: ") + e.what(),
                           std::nullopt, std::nullopt, prefix_size + e.byte);
    }
    std::size_t num_rows = 0;
    const DatasetHeader h = header_from_json(j, num_rows, prefix_size);
    const std::size_t payload = prefix_size + header_len;
    const std::size_t row_bytes = 8 * h.grid.num_points;
    const std::size_t available = bytes.size() - payload;
    if (available != num_rows * row_bytes)
    {
        const std::size_t full_rows = available / row_bytes;
        throw DatasetError(DatasetError::Kind::row_length,
                           "payload holds " + std::to_string(available) + " bytes, expected " +
                               std::to_string(num_rows * row_bytes),
                           std::min(full_rows, num_rows), std::nullopt, payload + full_rows * row_bytes);
    }
    std::vector<std::vector<double>> rows(num_rows, std::vector<double>(h.grid.num_points));
    const std::uint8_t *p = u + payload;
    for (auto &row : rows)
        for (double &v : row)
        {
            v = util::read_f64(p);
            p += 8;
        }
    PdpDataset d = assemble(h, std::move(rows));
    d.norm = norm_from_json(j, num_rows);
    check_values(d, false);
    return d;
}

PdpDataset load_csv(const std::filesystem::path &path)
{
    const auto side = sidecar_of(path);
    if (!std::filesystem::exists(side))
        throw DatasetError(DatasetError::Kind::io, "missing header sidecar '" + side.string() + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(util::read_file(side));
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw DatasetError(DatasetError::Kind::malformed_header,
                           "malformed header '" + side.string() + "': " + e.what(), std::nullopt, std::nullopt,
                           e.byte);
    }
    std::size_t num_rows = 0;
    const DatasetHeader h = header_from_json(j, num_rows, std::nullopt);

    const std::string body = util::read_file(path);
    std::vector<std::vector<double>> rows;
    rows.reserve(num_rows);
    std::vector<double> values;
    std::size_t line_no = 0, pos = 0;
    while (pos < body.size())
    {
        std::size_t nl = body.find('\n', pos);
        if (nl == std::string::npos)
            nl = body.size();
        const std::string_view line(body.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        std::size_t bad = 0;
        if (!parse_row(line, values, bad))
            throw DatasetError(DatasetError::Kind::malformed_value,
                               "cannot parse value in column " + std::to_string(bad), rows.size(), line_no);
        if (values.size() != h.grid.num_points)
            throw DatasetError(DatasetError::Kind::row_length,
                               "row has " + std::to_string(values.size()) + " values, expected " +
                                   std::to_string(h.grid.num_points),
                               rows.size(), line_no);
        rows.push_back(values);
    }
    if (rows.size() != num_rows)
        throw DatasetError(DatasetError::Kind::row_length,
                           "body holds " + std::to_string(rows.size()) + " rows, header declares " +
                               std::to_string(num_rows),
                           rows.size(), line_no);
    PdpDataset d = assemble(h, std::move(rows));
    d.norm = norm_from_json(j, num_rows);
    check_values(d, true);
    return d;
}
} // namespace

DatasetError::DatasetError(Kind kind, const std::string &message, std::optional<std::size_t> row,
                           std::optional<std::size_t> line, std::optional<std::size_t> offset)
    : std::runtime_error(message + where(row, line, offset)), kind_(kind), row_(row), line_(line), offset_(offset)
{
}

void PdpDataset::validate() const
{
    header.grid.validate();
    if (!norm.empty() && norm.size() != pdps.size())
        throw DatasetError(DatasetError::Kind::malformed_header,
                           "norm holds " + std::to_string(norm.size()) + " entries for " +
                               std::to_string(pdps.size()) + " rows");
    for (std::size_t r = 0; r < pdps.size(); ++r)
        if (!(pdps[r].grid == header.grid) || pdps[r].normalized != header.normalized)
            throw DatasetError(DatasetError::Kind::invalid_value, "grid or normalization flag disagrees with header", r);
    check_values(*this, false);
}

DatasetFormat format_for_path(const std::filesystem::path &path)
{
    return path.extension() == ".bin" ? DatasetFormat::binary : DatasetFormat::csv;
}

nlohmann::json header_to_json(const DatasetHeader &h, std::size_t num_rows)
{
    nlohmann::json j;
    j["format"] = "pdpgan-pdp-dataset";
    j["version"] = h.version;
    j["num_points"] = h.grid.num_points;
    j["spacing_s"] = h.grid.spacing;
    j["num_rows"] = num_rows;
    j["normalized"] = h.normalized;
    j["provenance"] = h.provenance;
    j["params_fingerprint"] = h.params_fingerprint;
    j["seed"] = h.seed ? nlohmann::json(*h.seed) : nlohmann::json(nullptr);
    if (h.params)
        j["params"] = to_json(*h.params);
    return j;
}

void save_dataset(const PdpDataset &dataset, const std::filesystem::path &path)
{
    save_dataset(dataset, path, format_for_path(path));
}

void save_dataset(const PdpDataset &dataset, const std::filesystem::path &path, DatasetFormat format)
{
    dataset.validate();
    nlohmann::json j = header_to_json(dataset.header, dataset.pdps.size());
    if (!dataset.norm.empty())
    {
        auto arr = nlohmann::json::array();
        for (const auto &n : dataset.norm)
            arr.push_back({n.min, n.max, n.degenerate});
        j["norm"] = std::move(arr);
    }

    if (format == DatasetFormat::binary)
    {
        const std::string text = j.dump();
        std::vector<std::uint8_t> out;
        out.reserve(prefix_size + text.size() + 8 * dataset.pdps.size() * dataset.header.grid.num_points);
        out.insert(out.end(), magic, magic + sizeof(magic));
        util::append_u32(out, dataset.header.version);
        util::append_u32(out, 0);
        util::append_u64(out, text.size());
        out.insert(out.end(), text.begin(), text.end());
        for (const auto &p : dataset.pdps)
            for (double v : p.powers)
                util::append_f64(out, v);
        util::write_file_atomic(path, out);
        return;
    }

    std::string body;
    body.reserve(dataset.pdps.size() * dataset.header.grid.num_points * 20);
    for (const auto &p : dataset.pdps)
    {
        for (std::size_t i = 0; i < p.powers.size(); ++i)
        {
            if (i)
                body += ',';
            body += util::format_double(p.powers[i]);
        }
        body += '\n';
    }
    util::write_file_atomic(path, body);
    util::write_file_atomic(sidecar_of(path), j.dump(2) + "\n");
}

PdpDataset load_dataset(const std::filesystem::path &path)
{
    if (!std::filesystem::exists(path))
        throw DatasetError(DatasetError::Kind::io, "dataset '" + path.string() + "' does not exist");
    std::string head;
    {
        std::FILE *f = std::fopen(path.c_str(), "rb");
        if (!f)
            throw DatasetError(DatasetError::Kind::io, "cannot open '" + path.string() + "'");
        char buf[sizeof(magic)];
        const std::size_t n = std::fread(buf, 1, sizeof(buf), f);
        std::fclose(f);
        head.assign(buf, n);
    }
    try
    {
        if (head.size() == sizeof(magic) && std::memcmp(head.data(), magic, sizeof(magic)) == 0)
        {
            const std::string bytes = util::read_file(path);
            if (bytes.size() < prefix_size)
                throw DatasetError(DatasetError::Kind::malformed_header, "truncated binary prefix", std::nullopt,
                                   std::nullopt, bytes.size());
            return load_binary(bytes);
        }
        return load_csv(path);
    }
    catch (const DatasetError &e)
    {
        throw DatasetError(e.kind(), "'" + path.string() + "': " + e.what(), e.row(), e.line(), e.offset());
    }
}

std::vector<std::filesystem::path> dataset_files(const std::filesystem::path &path)
{
    if (format_for_path(path) == DatasetFormat::binary)
        return {path};
    return {path, sidecar_of(path)};
}

PdpDataset from_generated(const synth::GeneratedDataset &generated, const synth::DatasetSpec &spec)
{
    PdpDataset d;
    d.header.grid = spec.grid;
    d.header.normalized = true;
    d.header.provenance = "synthetic: " + spec.params.label;
    d.header.params_fingerprint = hex64(synth::fingerprint(spec.params));
    d.header.seed = spec.rng_seed;
    d.header.params = spec.params;
    d.pdps = generated.pdps;
    d.norm = generated.norm;
    return d;
}

nlohmann::json to_json(const synth::StochasticChannelParams &p)
{
    return {{"num_paths_mean", p.num_paths_mean}, {"delay_rate_hz", p.delay_rate},
            {"power_decay_s", p.power_decay},     {"shadow_sigma_db", p.shadow_sigma_db},
            {"max_delay_s", p.max_delay},         {"label", p.label}};
}

synth::StochasticChannelParams params_from_json(const nlohmann::json &j)
{
    synth::StochasticChannelParams p;
    p.num_paths_mean = j.value("num_paths_mean", p.num_paths_mean);
    p.delay_rate = j.value("delay_rate_hz", p.delay_rate);
    p.power_decay = j.value("power_decay_s", p.power_decay);
    p.shadow_sigma_db = j.value("shadow_sigma_db", p.shadow_sigma_db);
    p.max_delay = j.value("max_delay_s", p.max_delay);
    p.label = j.value("label", p.label);
    p.validate();
    return p;
}

void save_params(const synth::StochasticChannelParams &params, const std::filesystem::path &path)
{
    util::write_file_atomic(path, to_json(params).dump(2) + "\n");
}

synth::StochasticChannelParams load_params(const std::filesystem::path &path)
{
    try
    {
        return params_from_json(nlohmann::json::parse(util::read_file(path)));
    }
    catch (const nlohmann::json::exception &e)
    {
        throw std::invalid_argument("'" + path.string() + "': malformed channel parameters: " + e.what());
    }
}

CtfRecord load_ctf(const std::filesystem::path &path)
{
    const auto side = sidecar_of(path);
    if (!std::filesystem::exists(side))
        throw DatasetError(DatasetError::Kind::io, "'" + path.string() + "': missing CTF sidecar '" + side.string() + "'");
    CtfRecord rec;
    try
    {
        const auto j = nlohmann::json::parse(util::read_file(side));
        rec.ctf.start_frequency = j.at("start_frequency_hz").get<double>();
        rec.ctf.frequency_spacing = j.at("spacing_hz").get<double>();
        rec.channel_id = j.value("channel_id", path.stem().string());
    }
    catch (const nlohmann::json::exception &e)
    {
        throw DatasetError(DatasetError::Kind::malformed_header, "'" + side.string() + "': " + e.what());
    }
    const std::string body = util::read_file(path);
    std::vector<double> values;
    std::size_t line_no = 0, pos = 0;
    while (pos < body.size())
    {
        std::size_t nl = body.find('\n', pos);
        if (nl == std::string::npos)
            nl = body.size();
        const std::string_view line(body.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        std::size_t bad = 0;
        if (!parse_row(line, values, bad) || values.size() != 2)
            throw DatasetError(DatasetError::Kind::malformed_value,
                               "'" + path.string() + "': expected 'real,imag'", rec.ctf.samples.size(), line_no);
        rec.ctf.samples.emplace_back(values[0], values[1]);
    }
    rec.ctf.validate();
    return rec;
}

void save_ctf(const CtfRecord &record, const std::filesystem::path &path)
{
    std::string body;
    for (const auto &s : record.ctf.samples)
        body += util::format_double(s.real()) + "," + util::format_double(s.imag()) + "\n";
    util::write_file_atomic(path, body);
    const nlohmann::json j = {{"start_frequency_hz", record.ctf.start_frequency},
                              {"spacing_hz", record.ctf.frequency_spacing},
                              {"channel_id", record.channel_id}};
    util::write_file_atomic(sidecar_of(path), j.dump(2) + "\n");
}

PdpDataset import_ctf(const std::vector<std::filesystem::path> &paths, double band_start, double band_width)
{
    std::vector<std::filesystem::path> files;
    for (const auto &p : paths)
    {
        if (std::filesystem::is_directory(p))
        {
            std::vector<std::filesystem::path> found;
            for (const auto &e : std::filesystem::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    found.push_back(e.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        }
        else
        {
            files.push_back(p);
        }
    }
    if (files.empty())
        throw std::invalid_argument("import_ctf: no CTF files given.");

    PdpDataset d;
    d.header.normalized = true;
    d.header.provenance = "ctf import";
    for (std::size_t i = 0; i < files.size(); ++i)
    {
        const CtfRecord rec = load_ctf(files[i]);
        channel::Pdp pdp;
        try
        {
            pdp = channel::ctf_to_pdp(rec.ctf, band_start, band_width);
        }
        catch (const std::out_of_range &e)
        {
            throw std::out_of_range("'" + files[i].string() + "': " + e.what());
        }
        auto [normalized, params] = channel::minmax_normalize(pdp);
        if (i == 0)
            d.header.grid = normalized.grid;
        else if (!(normalized.grid == d.header.grid))
            throw std::invalid_argument("'" + files[i].string() + "': delay grid differs from the first file.");
        d.pdps.push_back(std::move(normalized));
        d.norm.push_back(params);
    }
    return d;
}

} // namespace pdpgan::io
