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

#include "pdpgan/evaluation.hpp"
#include "pdpgan/file_util.hpp"
#include "pdpgan/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pdpgan::eval
{

namespace
{
void require_same_grid(const channel::Pdp &a, const channel::Pdp &b, const char *what)
{
    if (!(a.grid == b.grid) || a.powers.size() != b.powers.size())
        throw std::invalid_argument(std::string(what) + ": delay grids differ (" + std::to_string(a.powers.size()) +
                                    " x " + util::format_double(a.grid.spacing) + " s vs " +
                                    std::to_string(b.powers.size()) + " x " + util::format_double(b.grid.spacing) +
                                    " s).");
}

double to_db(double p)
{
    return 10.0 * std::log10(std::max(p, db_floor));
}
} // namespace

channel::Pdp average_pdp(const std::vector<channel::Pdp> &pdps)
{
    if (pdps.empty())
        throw std::invalid_argument("average_pdp: empty set.");
    channel::Pdp out;
    out.grid = pdps.front().grid;
    out.normalized = pdps.front().normalized;
    out.powers.assign(pdps.front().powers.size(), 0.0);
    for (const auto &p : pdps)
    {
        require_same_grid(pdps.front(), p, "average_pdp");
        out.normalized = out.normalized && p.normalized;
        for (std::size_t i = 0; i < p.powers.size(); ++i)
            out.powers[i] += p.powers[i];
    }
    const double n = static_cast<double>(pdps.size());
    for (double &v : out.powers)
        v /= n;
    return out;
}

double rmse(const channel::Pdp &reference, const channel::Pdp &generated, Domain domain)
{
    require_same_grid(reference, generated, "rmse");
    if (reference.powers.empty())
        throw std::invalid_argument("rmse: empty PDP.");
    double acc = 0.0;
    for (std::size_t i = 0; i < reference.powers.size(); ++i)
    {
        double a = reference.powers[i], b = generated.powers[i];
        if (domain == Domain::db)
            a = to_db(a), b = to_db(b);
        acc += (a - b) * (a - b);
    }
    return std::sqrt(acc / static_cast<double>(reference.powers.size()));
}

double ssim_1d(std::span<const double> a, std::span<const double> b, double dynamic_range)
{
    if (a.size() != b.size())
        throw std::invalid_argument("ssim_1d: lengths differ (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ").");
    if (a.size() < ssim_window)
        throw std::invalid_argument("ssim_1d: length " + std::to_string(a.size()) + " is shorter than the window (" +
                                    std::to_string(ssim_window) + ").");
    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    const double w = static_cast<double>(ssim_window);
    const std::size_t count = a.size() - ssim_window + 1;

    double total = 0.0;
    for (std::size_t s = 0; s < count; ++s)
    {
        double mu_a = 0.0, mu_b = 0.0;
        for (std::size_t k = s; k < s + ssim_window; ++k)
            mu_a += a[k], mu_b += b[k];
        mu_a /= w;
        mu_b /= w;
        double var_a = 0.0, var_b = 0.0, cov = 0.0;
        for (std::size_t k = s; k < s + ssim_window; ++k)
        {
            const double da = a[k] - mu_a, db = b[k] - mu_b;
            var_a += da * da;
            var_b += db * db;
            cov += da * db;
        }
        var_a /= w;
        var_b /= w;
        cov /= w;
        total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                 ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
    return total / static_cast<double>(count);
}

double ssim_1d(const channel::Pdp &a, const channel::Pdp &b, double dynamic_range)
{
    require_same_grid(a, b, "ssim_1d");
    return ssim_1d(std::span<const double>(a.powers), std::span<const double>(b.powers), dynamic_range);
}

double SsimCdf::fraction_above_threshold(double t) const
{
    if (sorted.empty())
        return 0.0;
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

SsimCdf ssim_cdf(const std::vector<channel::Pdp> &reference, const std::vector<channel::Pdp> &generated,
                 Pairing pairing, std::uint64_t seed, double threshold)
{
    if (reference.empty() || generated.empty())
        throw std::invalid_argument("ssim_cdf: empty set.");
    if (pairing == Pairing::identity && reference.size() != generated.size())
        throw std::invalid_argument("ssim_cdf: identity pairing needs equally large sets (" +
                                    std::to_string(reference.size()) + " vs " + std::to_string(generated.size()) +
                                    ").");
    RandomStream rng(seed);
    SsimCdf out;
    out.threshold = threshold;
    out.values.reserve(generated.size());
    for (std::size_t i = 0; i < generated.size(); ++i)
    {
        const std::size_t r = pairing == Pairing::identity ? i : static_cast<std::size_t>(rng.below(reference.size()));
        out.values.push_back(ssim_1d(reference[r], generated[i]));
    }
    out.sorted = out.values;
    std::sort(out.sorted.begin(), out.sorted.end());
    out.fraction_above = out.fraction_above_threshold(threshold);
    return out;
}

std::vector<double> delay_spread_cdf(const std::vector<channel::Pdp> &pdps)
{
    if (pdps.empty())
        throw std::invalid_argument("delay_spread_cdf: empty set.");
    std::vector<double> out;
    out.reserve(pdps.size());
    for (std::size_t i = 0; i < pdps.size(); ++i)
    {
        try
        {
            out.push_back(channel::rms_delay_spread(pdps[i]));
        }
        catch (const std::domain_error &e)
        {
            throw std::domain_error("delay_spread_cdf: PDP " + std::to_string(i) + ": " + e.what());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("wasserstein_1d: empty sample.");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    // Walk the merged quantile breakpoints i/na and j/nb; positions are compared as integers.
    const std::uint64_t na = sa.size(), nb = sb.size();
    std::size_t i = 0, j = 0;
    std::uint64_t pos = 0; // current quantile times na * nb
    double total = 0.0;
    while (i < na && j < nb)
    {
        const std::uint64_t end_a = (i + 1) * nb, end_b = (j + 1) * na;
        const std::uint64_t end = std::min(end_a, end_b);
        total += static_cast<double>(end - pos) * std::abs(sa[i] - sb[j]);
        pos = end;
        if (end_a == end)
            ++i;
        if (end_b == end)
            ++j;
    }
    return total / (static_cast<double>(na) * static_cast<double>(nb));
}

std::vector<double> total_power_marginal(const std::vector<channel::Pdp> &pdps)
{
    std::vector<double> out;
    out.reserve(pdps.size());
    for (const auto &p : pdps)
        out.push_back(p.powers.empty() ? 0.0 : p.total_power() / static_cast<double>(p.powers.size()));
    return out;
}

EvalReport evaluate(const std::vector<channel::Pdp> &reference, const std::vector<channel::Pdp> &generated,
                    const EvalOptions &options)
{
    if (reference.empty() || generated.empty())
        throw std::invalid_argument("evaluate: empty set.");
    require_same_grid(reference.front(), generated.front(), "evaluate");

    EvalReport r;
    r.options = options;
    r.reference_count = reference.size();
    r.generated_count = generated.size();
    r.reference_average = average_pdp(reference);
    r.generated_average = average_pdp(generated);
    r.rmse_linear = rmse(r.reference_average, r.generated_average, Domain::linear);
    r.rmse_db = rmse(r.reference_average, r.generated_average, Domain::db);
    r.ssim = ssim_cdf(reference, generated, options.pairing, options.seed, options.threshold);
    r.delay_spread_reference = delay_spread_cdf(reference);
    r.delay_spread_generated = delay_spread_cdf(generated);
    r.wasserstein_total_power = wasserstein_1d(total_power_marginal(reference), total_power_marginal(generated));
    r.wasserstein_delay_spread = wasserstein_1d(r.delay_spread_reference, r.delay_spread_generated);
    return r;
}

namespace
{
double quantile(const std::vector<double> &sorted, double q)
{
    // Lower empirical quantile: smallest value whose CDF reaches q.
    const auto n = static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil(q * n));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    return sorted[k - 1];
}

nlohmann::json quantiles(const std::vector<double> &sorted)
{
    nlohmann::json j = nlohmann::json::object();
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9})
        j[util::format_double(q)] = quantile(sorted, q);
    return j;
}
} // namespace

nlohmann::json to_json(const EvalReport &r)
{
    nlohmann::json j;
    j["format"] = "pdpgan-eval-report";
    j["reference_count"] = r.reference_count;
    j["generated_count"] = r.generated_count;
    j["rmse_linear"] = r.rmse_linear;
    j["rmse_db"] = r.rmse_db;
    j["ssim"] = {{"pairing", r.options.pairing == Pairing::identity ? "identity" : "random"},
                 {"seed", r.options.seed},
                 {"window", ssim_window},
                 {"threshold", r.ssim.threshold},
                 {"fraction_above_threshold", r.ssim.fraction_above},
                 {"mean", r.ssim.values.empty() ? 0.0
                                                : std::accumulate(r.ssim.values.begin(), r.ssim.values.end(), 0.0) /
                                                      static_cast<double>(r.ssim.values.size())},
                 {"quantiles", quantiles(r.ssim.sorted)},
                 {"values", r.ssim.values}};
    j["delay_spread_s"] = {{"reference_quantiles", quantiles(r.delay_spread_reference)},
                           {"generated_quantiles", quantiles(r.delay_spread_generated)},
                           {"wasserstein", r.wasserstein_delay_spread}};
    j["wasserstein_total_power"] = r.wasserstein_total_power;
    j["grid"] = {{"num_points", r.reference_average.grid.num_points},
                 {"spacing_s", r.reference_average.grid.spacing}};
    return j;
}

void write_report(const EvalReport &r, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    util::write_file_atomic(dir / "report.json", to_json(r).dump(2) + "\n");

    std::string avg = "delay_s,reference,generated\n";
    for (std::size_t i = 0; i < r.reference_average.powers.size(); ++i)
        avg += util::format_double(r.reference_average.grid.delay_of(i)) + "," +
               util::format_double(r.reference_average.powers[i]) + "," +
               util::format_double(r.generated_average.powers[i]) + "\n";
    util::write_file_atomic(dir / "average_pdp.csv", avg);

    std::string ssim = "ssim,cdf\n";
    const auto n = static_cast<double>(r.ssim.sorted.size());
    for (std::size_t i = 0; i < r.ssim.sorted.size(); ++i)
        ssim += util::format_double(r.ssim.sorted[i]) + "," + util::format_double(static_cast<double>(i + 1) / n) + "\n";
    util::write_file_atomic(dir / "ssim_cdf.csv", ssim);

    std::string ds = "set,delay_spread_s,cdf\n";
    auto emit = [&](const char *name, const std::vector<double> &v) {
        const auto m = static_cast<double>(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            ds += std::string(name) + "," + util::format_double(v[i]) + "," +
                  util::format_double(static_cast<double>(i + 1) / m) + "\n";
    };
    emit("reference", r.delay_spread_reference);
    emit("generated", r.delay_spread_generated);
    util::write_file_atomic(dir / "delay_spread_cdf.csv", ds);
}

} // namespace pdpgan::eval
