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

#ifndef PDPGAN_SYNTHETIC_CHANNEL_HPP
#define PDPGAN_SYNTHETIC_CHANNEL_HPP

#include "pdpgan/channel_core.hpp"
#include "pdpgan/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdpgan::synth
{

// Exponential-decay clustered multipath recipe (Saleh-Valenzuela style):
//  - path count  L = max(1, Poisson(num_paths_mean))
//  - delays      tau_0 = 0, tau_l = tau_{l-1} + Exp(delay_rate), truncated at max_delay
//  - powers      exp(-tau / power_decay) * 10^(X / 10), X ~ N(0, shadow_sigma_db^2)
//  - gains       sqrt(power), rescaled so that sum(gain^2) = 1
//  - phases      U[0, 2 pi)
struct StochasticChannelParams
{
    double num_paths_mean = 60.0;
    double delay_rate = 0.25e9;  // 1/s
    double power_decay = 20e-9;  // s
    double shadow_sigma_db = 4.0;
    double max_delay = 400e-9;   // s
    std::string label = "exponential-decay multipath";

    // Without a grid only the signs and ranges are checked.
    void validate() const;
    void validate(const channel::DelayGrid &grid) const;
    bool operator==(const StochasticChannelParams &) const = default;
};

// Stable 64-bit digest of the numeric fields (label excluded).
std::uint64_t fingerprint(const StochasticChannelParams &params);

struct DatasetSpec
{
    StochasticChannelParams params;
    std::size_t count = 10000;
    channel::DelayGrid grid;
    std::uint64_t rng_seed = 0;
};

struct GeneratedDataset
{
    std::vector<channel::Pdp> pdps; // min-max normalized
    std::vector<channel::NormParams> norm;
};

channel::Cir sample_cir(const StochasticChannelParams &params, const channel::DelayGrid &grid, RandomStream &rng);

// Channel i draws from rng.split(i), so the result does not depend on evaluation order.
// `threads` = 0 picks std::thread::hardware_concurrency().
GeneratedDataset generate_dataset(const DatasetSpec &spec, unsigned threads = 1);

struct FitOptions
{
    double floor_db = -40.0;
    double min_power_decay = 0.5e-9;
    double max_power_decay = 1e-6;
    double min_delay_rate = 1e6;
    double max_delay_rate = 1e10;
};

// Method-of-moments estimate of the generator parameters from a PDP set:
//  - power_decay from a least-squares slope of log(mean peak-relative power) over delay, using
//    the bins whose mean lies above the floor
//  - num_paths_mean as the mean count of above-floor bins per PDP
//  - delay_rate as (count - 1) / (delay extent of the above-floor bins), averaged per PDP
//  - shadow_sigma_db as the spread of per-bin dB residuals around the fitted decay
//  - max_delay as the largest above-floor delay observed
// Throws std::domain_error("empty fit support") when no bin clears the floor.
StochasticChannelParams fit_params(const std::vector<channel::Pdp> &pdps, const FitOptions &options = {});

} // namespace pdpgan::synth

#endif
