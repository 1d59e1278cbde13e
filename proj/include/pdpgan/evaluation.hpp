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

#ifndef PDPGAN_EVALUATION_HPP
#define PDPGAN_EVALUATION_HPP

#include "pdpgan/channel_core.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pdpgan::eval
{

enum class Domain
{
    linear,
    db // 10 log10(max(p, 1e-10))
};

inline constexpr double db_floor = 1e-10;
inline constexpr std::size_t ssim_window = 11;
inline constexpr double default_ssim_threshold = 0.6;

// Per-bin arithmetic mean. Throws std::invalid_argument on an empty set or a grid mismatch.
channel::Pdp average_pdp(const std::vector<channel::Pdp> &pdps);

// sqrt(mean_i (a_i - b_i)^2) on the chosen domain.
double rmse(const channel::Pdp &reference, const channel::Pdp &generated, Domain domain = Domain::linear);

// Mean over sliding windows (length 11, stride 1, uniform weights) of
// (2 mu_a mu_b + C1)(2 s_ab + C2) / ((mu_a^2 + mu_b^2 + C1)(s_a^2 + s_b^2 + C2)),
// C1 = (0.01 R)^2, C2 = (0.03 R)^2.
double ssim_1d(std::span<const double> a, std::span<const double> b, double dynamic_range = 1.0);
double ssim_1d(const channel::Pdp &a, const channel::Pdp &b, double dynamic_range = 1.0);

enum class Pairing
{
    random,  // each generated PDP meets a reference PDP drawn uniformly with the given seed
    identity // generated[i] meets reference[i]; sets must be equally large
};

struct SsimCdf
{
    std::vector<double> values; // per pair, in generated order
    std::vector<double> sorted;
    double threshold = default_ssim_threshold;
    double fraction_above = 0.0;

    // Fraction of values strictly greater than t.
    double fraction_above_threshold(double t) const;
};

SsimCdf ssim_cdf(const std::vector<channel::Pdp> &reference, const std::vector<channel::Pdp> &generated,
                 Pairing pairing, std::uint64_t seed = 0, double threshold = default_ssim_threshold);

// Sorted RMS delay spreads [s]. A zero-power member raises std::domain_error naming its index.
std::vector<double> delay_spread_cdf(const std::vector<channel::Pdp> &pdps);

// Exact W1 between the empirical distributions: integral over u in (0, 1) of |Qa(u) - Qb(u)|.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

// Per-PDP mean bin power, the scalar marginal compared by wasserstein_total_power.
std::vector<double> total_power_marginal(const std::vector<channel::Pdp> &pdps);

struct EvalOptions
{
    Pairing pairing = Pairing::random;
    std::uint64_t seed = 0;
    double threshold = default_ssim_threshold;
};

struct EvalReport
{
    double rmse_linear = 0.0;
    double rmse_db = 0.0;
    channel::Pdp reference_average;
    channel::Pdp generated_average;
    SsimCdf ssim;
    std::vector<double> delay_spread_reference;
    std::vector<double> delay_spread_generated;
    double wasserstein_total_power = 0.0;
    double wasserstein_delay_spread = 0.0; // in seconds
    std::size_t reference_count = 0;
    std::size_t generated_count = 0;
    EvalOptions options;
};

EvalReport evaluate(const std::vector<channel::Pdp> &reference, const std::vector<channel::Pdp> &generated,
                    const EvalOptions &options);

nlohmann::json to_json(const EvalReport &report);

// Writes report.json, average_pdp.csv, ssim_cdf.csv and delay_spread_cdf.csv into `dir`.
void write_report(const EvalReport &report, const std::filesystem::path &dir);

} // namespace pdpgan::eval

#endif
