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

#ifndef PDPGAN_CHANNEL_CORE_HPP
#define PDPGAN_CHANNEL_CORE_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pdpgan::channel
{

// Uniform delay axis: bin i sits at i * spacing seconds.
struct DelayGrid
{
    std::size_t num_points = 401;
    double spacing = 1.0e-9; // seconds

    double span() const { return static_cast<double>(num_points) * spacing; }
    double delay_of(std::size_t bin) const { return static_cast<double>(bin) * spacing; }
    void validate() const;

    bool operator==(const DelayGrid &) const = default;
};

// One propagation path: h(t) contribution gain * exp(j * phase) * delta(t - delay).
struct MultipathComponent
{
    double delay = 0.0; // seconds, >= 0
    double gain = 0.0;  // linear amplitude, >= 0
    double phase = 0.0; // radians, [0, 2 pi)
};

struct Cir
{
    std::vector<MultipathComponent> paths;
    DelayGrid grid;

    // Throws std::invalid_argument naming the first offending path.
    void validate() const;
};

struct Pdp
{
    std::vector<double> powers;
    DelayGrid grid;
    bool normalized = false;

    void validate() const;
    double total_power() const;
};

// Affine parameters of a min-max normalization. A degenerate range (max == min)
// maps every bin to zero and inverts to the constant `min`.
struct NormParams
{
    double min = 0.0;
    double max = 0.0;
    bool degenerate = false;

    bool operator==(const NormParams &) const = default;
};

struct ChannelTransferFunction
{
    std::vector<std::complex<double>> samples;
    double start_frequency = 0.0;   // Hz, frequency of samples[0]
    double frequency_spacing = 0.0; // Hz

    double stop_frequency() const;
    void validate() const;
};

// Optional spectral taper applied before the inverse transform, w(k, K) for k in [0, K).
using WindowFunction = std::function<double(std::size_t, std::size_t)>;

// Coherent per-bin accumulation of the paths followed by |.|^2. Paths are assigned to the
// nearest bin; delays at or beyond the grid span are rejected.
Pdp cir_to_pdp(const Cir &cir);

std::pair<Pdp, NormParams> minmax_normalize(const Pdp &pdp);
Pdp denormalize(const Pdp &pdp, const NormParams &params);

// Power-weighted first moment of the delay axis [s].
double mean_delay(const Pdp &pdp);

// Square root of the power-weighted second central moment of the delay axis [s].
double rms_delay_spread(const Pdp &pdp);

// Selects the samples inside [band_start, band_start + band_width], inverse-transforms the K
// selected samples and returns |h[n]|^2 on a grid of K points spaced 1 / (K * frequency_spacing).
// With 2.5 MHz spacing and a 1 GHz band this yields 401 points.
Pdp ctf_to_pdp(const ChannelTransferFunction &ctf, double band_start, double band_width,
               const WindowFunction &window = {});

// Forward model: H(f_k) = sum_l gain_l * exp(j phase_l) * exp(-j 2 pi f_k delay_l).
ChannelTransferFunction synthesize_ctf(std::span<const MultipathComponent> paths, double start_frequency,
                                       double frequency_spacing, std::size_t num_samples);

} // namespace pdpgan::channel

#endif
