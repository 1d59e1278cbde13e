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

#ifndef PDPGAN_RANDOM_HPP
#define PDPGAN_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace pdpgan
{

// Seedable, splittable random stream. Child streams are derived from (seed, key) through a
// SplitMix64 mix, so the same key always yields the same child regardless of how much the
// parent has been consumed or in which order children are created.
class RandomStream
{
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    RandomStream split(std::uint64_t key) const;
    RandomStream split(std::string_view name) const;

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal(double mean = 0.0, double stddev = 1.0) { return std::normal_distribution<double>(mean, stddev)(engine_); }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
    std::uint64_t poisson(double mean);
    std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

    std::mt19937_64 &engine() { return engine_; }

    static std::uint64_t mix(std::uint64_t x);

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// FNV-1a, used for labels and configuration fingerprints.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 14695981039346656037ULL);

} // namespace pdpgan

#endif
