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

#ifndef PDPGAN_FILE_UTIL_HPP
#define PDPGAN_FILE_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pdpgan::util
{

// Little-endian encoding independent of the host byte order.
void append_u32(std::vector<std::uint8_t> &out, std::uint32_t v);
void append_u64(std::vector<std::uint8_t> &out, std::uint64_t v);
void append_f64(std::vector<std::uint8_t> &out, double v);
std::uint32_t read_u32(const std::uint8_t *p);
std::uint64_t read_u64(const std::uint8_t *p);
double read_f64(const std::uint8_t *p);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path &path, const std::string &bytes);
void write_file_atomic(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes);

// Throws std::runtime_error when the file cannot be opened.
std::string read_file(const std::filesystem::path &path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace pdpgan::util

#endif
