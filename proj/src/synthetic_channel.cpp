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

#include "pdpgan/synthetic_channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace pdpgan::synth
{

void StochasticChannelParams::validate() const
{
    if (!(num_paths_mean >= 1.0))
        throw std::invalid_argument("num_paths_mean must be >= 1.");
    if (!(delay_rate > 0.0))
        throw std::invalid_argument("delay_rate must be > 0.");
    if (!(power_decay > 0.0))
        throw std::invalid_argument("power_decay must be > 0.");
    if (!(shadow_sigma_db >= 0.0))
        throw std::invalid_argument("shadow_sigma_db must be >= 0.");
    if (!(max_delay >= 0.0))
        throw std::invalid_argument("max_delay must be >= 0.");
}

void StochasticChannelParams::validate(const channel::DelayGrid &grid) const
{
    grid.validate();
    validate();
    if (max_delay > grid.span())
        throw std::invalid_argument("max_delay must lie within the grid span.");
}

std::uint64_t fingerprint(const StochasticChannelParams &params)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (double v : {params.num_paths_mean, params.delay_rate, params.power_decay, params.shadow_sigma_db, params.max_delay})
    {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b)
        {
            h ^= (bits >> (8 * b)) & 0xFFU;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

channel::Cir sample_cir(const StochasticChannelParams &params, const channel::DelayGrid &grid, RandomStream &rng)
{
    params.validate(grid);

    const auto count = std::max<std::uint64_t>(1, rng.poisson(params.num_paths_mean));
    const double span = grid.span();

    channel::Cir cir;
    cir.grid = grid;
    cir.paths.reserve(count);

    double delay = 0.0;
    double total = 0.0;
    for (std::uint64_t l = 0; l < count; ++l)
    {
        if (l > 0)
            delay += rng.exponential(params.delay_rate);
        if (delay > params.max_delay || delay >= span)
            break;
        double power = std::exp(-delay / params.power_decay);
        if (params.shadow_sigma_db > 0.0)
            power *= std::pow(10.0, rng.normal(0.0, params.shadow_sigma_db) / 10.0);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        cir.paths.push_back({delay, power, phase});
        total += power;
    }

    const double scale = 1.0 / total;
    for (auto &p : cir.paths)
        p.gain = std::sqrt(p.gain * scale);
    return cir;
}

GeneratedDataset generate_dataset(const DatasetSpec &spec, unsigned threads)
{
    if (spec.count < 1)
        throw std::invalid_argument("Dataset count must be >= 1.");
    spec.params.validate(spec.grid);

    GeneratedDataset out;
    out.pdps.resize(spec.count);
    out.norm.resize(spec.count);

    const RandomStream root(spec.rng_seed);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            auto rng = root.split(static_cast<std::uint64_t>(i));
            auto [pdp, norm] = channel::minmax_normalize(channel::cir_to_pdp(sample_cir(spec.params, spec.grid, rng)));
            out.pdps[i] = std::move(pdp);
            out.norm[i] = norm;
        }
    };

    if (threads == 0)
        threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.count));
    if (threads <= 1)
    {
        work(0, spec.count);
        return out;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (spec.count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t)
    {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(spec.count, begin + chunk);
        if (begin < end)
            pool.emplace_back(work, begin, end);
    }
    return out;
}

StochasticChannelParams fit_params(const std::vector<channel::Pdp> &pdps, const FitOptions &options)
{
    if (pdps.empty())
        throw std::invalid_argument("fit_params needs at least one PDP.");
    const auto grid = pdps.front().grid;
    const std::size_t n = grid.num_points;
    for (const auto &p : pdps)
    {
        if (!(p.grid == grid) || p.powers.size() != n)
            throw std::invalid_argument("fit_params requires PDPs on a common delay grid.");
    }
    const double floor_lin = std::pow(10.0, options.floor_db / 10.0);

    std::vector<double> mean_rel(n, 0.0);
    double count_sum = 0.0;
    double rate_sum = 0.0;
    std::size_t rate_samples = 0;
    std::size_t used = 0;
    double max_extent = 0.0;

    for (const auto &p : pdps)
    {
        const double peak = *std::max_element(p.powers.begin(), p.powers.end());
        if (!(peak > 0.0))
            continue;
        ++used;
        std::size_t count = 0;
        std::size_t first = n;
        std::size_t last = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double rel = p.powers[i] / peak;
            mean_rel[i] += rel;
            if (rel >= floor_lin)
            {
                ++count;
                first = std::min(first, i);
                last = i;
            }
        }
        count_sum += static_cast<double>(count);
        max_extent = std::max(max_extent, grid.delay_of(last));
        if (count >= 2 && last > first)
        {
            rate_sum += static_cast<double>(count - 1) / (grid.delay_of(last) - grid.delay_of(first));
            ++rate_samples;
        }
    }
    if (used == 0)
        throw std::domain_error("empty fit support");
    for (auto &m : mean_rel)
        m /= static_cast<double>(used);

    // Least-squares line through log mean power over the above-floor support.
    const double mean_peak = *std::max_element(mean_rel.begin(), mean_rel.end());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (mean_rel[i] > 0.0 && mean_rel[i] >= floor_lin * mean_peak)
        {
            const double x = grid.delay_of(i);
            const double y = std::log(mean_rel[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
    }
    if (m == 0)
        throw std::domain_error("empty fit support");

    StochasticChannelParams out;
    out.label = "fitted";
    double decay = options.min_power_decay;
    if (m >= 2)
    {
        const double md = static_cast<double>(m);
        const double denom = md * sxx - sx * sx;
        const double slope = (md * sxy - sx * sy) / denom;
        decay = slope < 0.0 ? -1.0 / slope : options.max_power_decay;
    }
    out.power_decay = std::clamp(decay, options.min_power_decay, options.max_power_decay);

    const double rate = rate_samples > 0 ? rate_sum / static_cast<double>(rate_samples) : options.max_delay_rate;
    out.delay_rate = std::clamp(rate, options.min_delay_rate, options.max_delay_rate);
    out.num_paths_mean = std::max(1.0, count_sum / static_cast<double>(used));
    out.max_delay = std::min(grid.span(), std::max(max_extent, grid.spacing));

    // Spread of per-bin dB levels around the fitted decay; a constant offset per PDP is removed
    // by measuring each bin relative to its own PDP peak.
    const double db_per_s = 10.0 * std::numbers::log10e / out.power_decay;
    double r_sum = 0.0, r_sq = 0.0;
    std::size_t r_n = 0;
    for (const auto &p : pdps)
    {
        const double peak = *std::max_element(p.powers.begin(), p.powers.end());
        if (!(peak > 0.0))
            continue;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double rel = p.powers[i] / peak;
            if (rel >= floor_lin)
            {
                const double r = 10.0 * std::log10(rel) + db_per_s * grid.delay_of(i);
                r_sum += r;
                r_sq += r * r;
                ++r_n;
            }
        }
    }
    double sigma = 0.0;
    if (r_n >= 2)
    {
        const double mean = r_sum / static_cast<double>(r_n);
        sigma = std::sqrt(std::max(0.0, r_sq / static_cast<double>(r_n) - mean * mean));
    }
    out.shadow_sigma_db = sigma;
    return out;
}

} // namespace pdpgan::synth
