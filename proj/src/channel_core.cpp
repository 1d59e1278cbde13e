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

#include "pdpgan/channel_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pdpgan::channel
{

void DelayGrid::validate() const
{
    if (num_points < 2)
        throw std::invalid_argument("Delay grid needs at least 2 points, got " + std::to_string(num_points) + ".");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("Delay grid spacing must be positive and finite.");
}

void Cir::validate() const
{
    grid.validate();
    const double span = grid.span();
    for (std::size_t l = 0; l < paths.size(); ++l)
    {
        const auto &p = paths[l];
        const auto where = "Path " + std::to_string(l) + ": ";
        if (!(p.delay >= 0.0) || !(p.delay < span))
            throw std::invalid_argument(where + "delay " + std::to_string(p.delay) + " s is outside the grid [0, " +
                                        std::to_string(span) + ") s.");
        if (!(p.gain >= 0.0) || !std::isfinite(p.gain))
            throw std::invalid_argument(where + "gain must be finite and non-negative.");
        if (!(p.phase >= 0.0) || !(p.phase < 2.0 * std::numbers::pi))
            throw std::invalid_argument(where + "phase must lie in [0, 2 pi).");
    }
}

void Pdp::validate() const
{
    grid.validate();
    if (powers.size() != grid.num_points)
        throw std::invalid_argument("PDP has " + std::to_string(powers.size()) + " bins but the grid has " +
                                    std::to_string(grid.num_points) + " points.");
    for (std::size_t i = 0; i < powers.size(); ++i)
    {
        const double p = powers[i];
        if (!std::isfinite(p) || p < 0.0)
            throw std::invalid_argument("PDP bin " + std::to_string(i) + " is negative or not finite.");
        if (normalized && p > 1.0)
            throw std::invalid_argument("Normalized PDP bin " + std::to_string(i) + " exceeds 1.");
    }
}

double Pdp::total_power() const
{
    double s = 0.0;
    for (double p : powers)
        s += p;
    return s;
}

double ChannelTransferFunction::stop_frequency() const
{
    return start_frequency + static_cast<double>(samples.size() - 1) * frequency_spacing;
}

void ChannelTransferFunction::validate() const
{
    if (samples.empty())
        throw std::invalid_argument("Channel transfer function has no samples.");
    if (!(frequency_spacing > 0.0) || !std::isfinite(frequency_spacing))
        throw std::invalid_argument("Frequency spacing must be positive and finite.");
}

Pdp cir_to_pdp(const Cir &cir)
{
    cir.validate();
    const std::size_t n = cir.grid.num_points;
    std::vector<std::complex<double>> bins(n);
    for (const auto &p : cir.paths)
    {
        // Nearest bin; delays in the last half-bin before the span round up and are clamped.
        auto b = static_cast<std::size_t>(std::llround(p.delay / cir.grid.spacing));
        b = std::min(b, n - 1);
        bins[b] += std::polar(p.gain, p.phase);
    }

    Pdp out;
    out.grid = cir.grid;
    out.powers.resize(n);
    std::transform(bins.begin(), bins.end(), out.powers.begin(), [](const auto &c) { return std::norm(c); });
    return out;
}

std::pair<Pdp, NormParams> minmax_normalize(const Pdp &pdp)
{
    if (pdp.powers.empty())
        throw std::invalid_argument("Cannot normalize an empty PDP.");
    const auto [lo, hi] = std::minmax_element(pdp.powers.begin(), pdp.powers.end());
    NormParams params{*lo, *hi, *hi == *lo};

    Pdp out;
    out.grid = pdp.grid;
    out.normalized = true;
    out.powers.resize(pdp.powers.size(), 0.0);
    if (!params.degenerate)
    {
        const double range = params.max - params.min;
        for (std::size_t i = 0; i < pdp.powers.size(); ++i)
            out.powers[i] = (pdp.powers[i] - params.min) / range;
        // The extremes map to exactly 0 and 1.
        out.powers[static_cast<std::size_t>(lo - pdp.powers.begin())] = 0.0;
        out.powers[static_cast<std::size_t>(hi - pdp.powers.begin())] = 1.0;
    }
    return {std::move(out), params};
}

Pdp denormalize(const Pdp &pdp, const NormParams &params)
{
    Pdp out;
    out.grid = pdp.grid;
    out.normalized = false;
    out.powers.resize(pdp.powers.size());
    if (params.degenerate)
    {
        std::fill(out.powers.begin(), out.powers.end(), params.min);
        return out;
    }
    const double range = params.max - params.min;
    for (std::size_t i = 0; i < pdp.powers.size(); ++i)
        out.powers[i] = pdp.powers[i] * range + params.min;
    return out;
}

namespace
{
double checked_total(const Pdp &pdp)
{
    const double total = pdp.total_power();
    if (!(total > 0.0))
        throw std::domain_error("zero total power");
    return total;
}
} // namespace

double mean_delay(const Pdp &pdp)
{
    const double total = checked_total(pdp);
    double acc = 0.0;
    for (std::size_t i = 0; i < pdp.powers.size(); ++i)
        acc += pdp.grid.delay_of(i) * pdp.powers[i];
    return acc / total;
}

double rms_delay_spread(const Pdp &pdp)
{
    const double total = checked_total(pdp);
    const double mean = mean_delay(pdp);
    double acc = 0.0;
    for (std::size_t i = 0; i < pdp.powers.size(); ++i)
    {
        const double d = pdp.grid.delay_of(i) - mean;
        acc += d * d * pdp.powers[i];
    }
    return std::sqrt(acc / total);
}

Pdp ctf_to_pdp(const ChannelTransferFunction &ctf, double band_start, double band_width, const WindowFunction &window)
{
    ctf.validate();
    if (!(band_width > 0.0))
        throw std::invalid_argument("Band width must be positive.");

    // Relative slack so that band edges that coincide with samples survive rounding.
    constexpr double edge_tol = 1e-6;
    const double df = ctf.frequency_spacing;
    const double band_stop = band_start + band_width;
    if (band_start < ctf.start_frequency - edge_tol * df || band_stop > ctf.stop_frequency() + edge_tol * df)
        throw std::out_of_range("Requested band [" + std::to_string(band_start) + ", " + std::to_string(band_stop) +
                                "] Hz lies outside the measured span [" + std::to_string(ctf.start_frequency) + ", " +
                                std::to_string(ctf.stop_frequency()) + "] Hz.");

    const auto first = static_cast<long long>(std::ceil((band_start - ctf.start_frequency) / df - edge_tol));
    const auto last = static_cast<long long>(std::floor((band_stop - ctf.start_frequency) / df + edge_tol));
    const long long count = last - first + 1;
    if (count < 2)
        throw std::invalid_argument("Band selects fewer than 2 frequency samples.");

    const auto k_total = static_cast<std::size_t>(count);
    const auto offset = static_cast<std::size_t>(std::max(0LL, first));

    auto *buf = fftw_alloc_complex(k_total);
    for (std::size_t k = 0; k < k_total; ++k)
    {
        std::complex<double> s = ctf.samples[offset + k];
        if (window)
            s *= window(k, k_total);
        buf[k][0] = s.real();
        buf[k][1] = s.imag();
    }
    // FFTW_BACKWARD is the unnormalized inverse transform; scale by 1/K below.
    // Only fftw_execute is re-entrant; planning and destruction are serialized.
    static std::mutex planner_mutex;
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(k_total), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex);
        fftw_destroy_plan(plan);
    }

    Pdp out;
    out.grid = {k_total, 1.0 / (static_cast<double>(k_total) * df)};
    out.powers.resize(k_total);
    const double scale = 1.0 / static_cast<double>(k_total);
    for (std::size_t n = 0; n < k_total; ++n)
    {
        const double re = buf[n][0] * scale;
        const double im = buf[n][1] * scale;
        out.powers[n] = re * re + im * im;
    }
    fftw_free(buf);
    return out;
}

ChannelTransferFunction synthesize_ctf(std::span<const MultipathComponent> paths, double start_frequency,
                                       double frequency_spacing, std::size_t num_samples)
{
    ChannelTransferFunction ctf;
    ctf.start_frequency = start_frequency;
    ctf.frequency_spacing = frequency_spacing;
    ctf.samples.resize(num_samples);
    for (std::size_t k = 0; k < num_samples; ++k)
    {
        const double f = start_frequency + static_cast<double>(k) * frequency_spacing;
        std::complex<double> acc{};
        for (const auto &p : paths)
        {
            // Reduce the phase argument modulo 1 cycle before scaling by 2 pi to keep precision at THz carriers.
            const double cycles = std::fmod(f * p.delay, 1.0);
            acc += std::polar(p.gain, p.phase - 2.0 * std::numbers::pi * cycles);
        }
        ctf.samples[k] = acc;
    }
    return ctf;
}

} // namespace pdpgan::channel
