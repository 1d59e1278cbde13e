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


#include "catch2/catch_amalgamated.hpp"

#include "pdpgan/evaluation.hpp"
#include "pdpgan/random.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace pdpgan;

namespace
{
channel::Pdp random_pdp(RandomStream &rng, std::size_t n = 64, double spacing = 1e-9)
{
    channel::Pdp p;
    p.grid = {n, spacing};
    const double decay = rng.uniform(5.0, 20.0);
    for (std::size_t i = 0; i < n; ++i)
        p.powers.push_back(std::exp(-static_cast<double>(i) / decay) * rng.uniform(0.3, 1.0));
    return p;
}

std::vector<channel::Pdp> random_set(RandomStream &rng, std::size_t count, std::size_t n = 64)
{
    std::vector<channel::Pdp> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(random_pdp(rng, n));
    return out;
}

// Plain windowed SSIM written out term by term.
double ssim_oracle(const std::vector<double> &a, const std::vector<double> &b)
{
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const std::size_t w = 11;
    double acc = 0.0;
    for (std::size_t s = 0; s + w <= a.size(); ++s)
    {
        long double ma = 0, mb = 0;
        for (std::size_t k = s; k < s + w; ++k)
            ma += a[k], mb += b[k];
        ma /= w, mb /= w;
        long double va = 0, vb = 0, cab = 0;
        for (std::size_t k = s; k < s + w; ++k)
        {
            va += (a[k] - ma) * (a[k] - ma);
            vb += (b[k] - mb) * (b[k] - mb);
            cab += (a[k] - ma) * (b[k] - mb);
        }
        va /= w, vb /= w, cab /= w;
        acc += static_cast<double>((2 * ma * mb + c1) * (2 * cab + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2)));
    }
    return acc / static_cast<double>(a.size() - w + 1);
}

// W1 as the integral of |Fa - Fb| over the merged support.
double w1_oracle(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> xs = a;
    xs.insert(xs.end(), b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    long double total = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    {
        const double x = xs[i];
        const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / a.size();
        const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / b.size();
        total += std::abs(fa - fb) * (xs[i + 1] - x);
    }
    return static_cast<double>(total);
}
} // namespace

TEST_CASE("rmse - identities")
{
    RandomStream rng(1);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto a = random_pdp(rng);
        CHECK(eval::rmse(a, a) == 0.0);
        CHECK(eval::rmse(a, a, eval::Domain::db) == 0.0);
        const double c = rng.uniform(-0.5, 0.5);
        auto b = a;
        for (double &v : b.powers)
            v += c;
        CHECK(eval::rmse(b, a) == Catch::Approx(std::abs(c)).margin(1e-15));
    }
    channel::Pdp tiny;
    tiny.grid = {2, 1e-9};
    tiny.powers = {0.0, 1.0};
    channel::Pdp one = tiny;
    one.powers = {1.0, 1.0};
    // 10 log10(1e-10) = -100 dB against 0 dB in one of two bins.
    CHECK(eval::rmse(tiny, one, eval::Domain::db) == Catch::Approx(100.0 / std::sqrt(2.0)));
    one.grid.num_points = 3;
    one.powers.push_back(0.0);
    CHECK_THROWS_AS(eval::rmse(tiny, one), std::invalid_argument);
}

TEST_CASE("average_pdp")
{
    RandomStream rng(2);
    const auto set = random_set(rng, 7);
    const auto avg = eval::average_pdp(set);
    for (std::size_t i = 0; i < 64; ++i)
    {
        double s = 0;
        for (const auto &p : set)
            s += p.powers[i];
        CHECK(avg.powers[i] == Catch::Approx(s / 7.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(eval::average_pdp({}), std::invalid_argument);
    auto mixed = set;
    mixed.push_back(random_pdp(rng, 32));
    CHECK_THROWS_AS(eval::average_pdp(mixed), std::invalid_argument);
}

TEST_CASE("ssim_1d - self similarity and oracle agreement")
{
    RandomStream rng(3);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto a = random_pdp(rng), b = random_pdp(rng);
        CHECK(eval::ssim_1d(a, a) == 1.0);
        CHECK(eval::ssim_1d(a, b) == Catch::Approx(ssim_oracle(a.powers, b.powers)).epsilon(1e-12));
        CHECK(eval::ssim_1d(a, b) == Catch::Approx(eval::ssim_1d(b, a)).epsilon(1e-14));
        CHECK(eval::ssim_1d(a, b) <= 1.0);
    }
    const std::vector<double> short_a(5, 0.5);
    CHECK_THROWS_AS(eval::ssim_1d(short_a, short_a), std::invalid_argument);
}

TEST_CASE("ssim_1d - more noise, lower similarity")
{
    RandomStream rng(4);
    int holds = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto x = random_pdp(rng);
        auto light = x, heavy = x;
        for (std::size_t i = 0; i < x.powers.size(); ++i)
        {
            light.powers[i] += rng.normal(0.0, 0.02);
            heavy.powers[i] += rng.normal(0.0, 0.1);
        }
        holds += eval::ssim_1d(x, light) > eval::ssim_1d(x, heavy);
    }
    CHECK(holds >= 95);
}

TEST_CASE("ssim_cdf - pairing and ordering")
{
    RandomStream rng(5);
    const auto ref = random_set(rng, 20), gen = random_set(rng, 30);
    const auto a = eval::ssim_cdf(ref, gen, eval::Pairing::random, 9);
    const auto b = eval::ssim_cdf(ref, gen, eval::Pairing::random, 9);
    CHECK(a.values == b.values);
    CHECK(a.values.size() == 30);
    CHECK(std::is_sorted(a.sorted.begin(), a.sorted.end()));
    CHECK(a.fraction_above == a.fraction_above_threshold(0.6));
    std::size_t above = 0;
    for (double v : a.values)
        above += v > 0.6;
    CHECK(a.fraction_above == Catch::Approx(above / 30.0));
    // Each value is the SSIM against some reference member.
    for (std::size_t i = 0; i < gen.size(); ++i)
    {
        bool found = false;
        for (const auto &r : ref)
            found = found || eval::ssim_1d(r, gen[i]) == a.values[i];
        CHECK(found);
    }

    const auto id = eval::ssim_cdf(ref, ref, eval::Pairing::identity);
    for (double v : id.values)
        CHECK(v == 1.0);
    CHECK(id.fraction_above == 1.0);
    CHECK_THROWS_AS(eval::ssim_cdf(ref, gen, eval::Pairing::identity), std::invalid_argument);
}

TEST_CASE("delay_spread_cdf - sorted, matches per-PDP spreads, rejects empty power")
{
    RandomStream rng(6);
    auto set = random_set(rng, 25);
    const auto cdf = eval::delay_spread_cdf(set);
    CHECK(std::is_sorted(cdf.begin(), cdf.end()));
    std::vector<double> direct;
    for (const auto &p : set)
        direct.push_back(channel::rms_delay_spread(p));
    std::sort(direct.begin(), direct.end());
    CHECK(cdf == direct);

    std::fill(set[3].powers.begin(), set[3].powers.end(), 0.0);
    CHECK_THROWS_WITH(eval::delay_spread_cdf(set), Catch::Matchers::ContainsSubstring("3"));
}

TEST_CASE("wasserstein_1d - oracle and properties")
{
    RandomStream rng(7);
    for (int trial = 0; trial < 100; ++trial)
    {
        std::vector<double> a(1 + rng.below(30)), b(1 + rng.below(30));
        for (double &v : a)
            v = rng.normal();
        for (double &v : b)
            v = rng.normal(0.3, 2.0);
        const double w = eval::wasserstein_1d(a, b);
        CHECK(w == Catch::Approx(w1_oracle(a, b)).epsilon(1e-10).margin(1e-12));
        CHECK(w == Catch::Approx(eval::wasserstein_1d(b, a)).epsilon(1e-12));
        CHECK(eval::wasserstein_1d(a, a) == 0.0);
        // Shifting one side by c moves W1 by exactly |c| when the sets coincide.
        auto shifted = a;
        for (double &v : shifted)
            v += 0.25;
        CHECK(eval::wasserstein_1d(a, shifted) == Catch::Approx(0.25).epsilon(1e-12));
    }
    CHECK_THROWS_AS(eval::wasserstein_1d(std::vector<double>{}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("total_power_marginal is the mean bin power")
{
    RandomStream rng(8);
    const auto set = random_set(rng, 4);
    const auto m = eval::total_power_marginal(set);
    REQUIRE(m.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
    {
        double s = 0;
        for (double v : set[i].powers)
            s += v;
        CHECK(m[i] == Catch::Approx(s / 64.0).epsilon(1e-14));
    }
}

TEST_CASE("evaluate - report content and files")
{
    RandomStream rng(9);
    const auto ref = random_set(rng, 12), gen = random_set(rng, 15);
    const auto r = eval::evaluate(ref, gen, {eval::Pairing::random, 4, 0.6});
    CHECK(r.rmse_linear == eval::rmse(eval::average_pdp(ref), eval::average_pdp(gen)));
    CHECK(r.rmse_db == eval::rmse(eval::average_pdp(ref), eval::average_pdp(gen), eval::Domain::db));
    CHECK(r.reference_count == 12);
    CHECK(r.generated_count == 15);
    CHECK(r.wasserstein_total_power ==
          eval::wasserstein_1d(eval::total_power_marginal(ref), eval::total_power_marginal(gen)));
    const auto j = eval::to_json(r);
    CHECK(j.dump() == eval::to_json(eval::evaluate(ref, gen, {eval::Pairing::random, 4, 0.6})).dump());
    CHECK_FALSE(j.contains("seconds"));

    const auto dir = std::filesystem::temp_directory_path() / "pdpgan_eval_test";
    std::filesystem::remove_all(dir);
    eval::write_report(r, dir);
    for (const char *f : {"report.json", "average_pdp.csv", "ssim_cdf.csv", "delay_spread_cdf.csv"})
        CHECK(std::filesystem::exists(dir / f));

    // CDF columns in the CSV are nondecreasing.
    std::ifstream in(dir / "ssim_cdf.csv");
    std::string line;
    std::getline(in, line);
    double prev_x = -1e300, prev_f = 0.0;
    while (std::getline(in, line))
    {
        const auto comma = line.find(',');
        const double x = std::stod(line.substr(0, comma)), f = std::stod(line.substr(comma + 1));
        CHECK(x >= prev_x);
        CHECK(f >= prev_f);
        prev_x = x, prev_f = f;
    }
    CHECK(prev_f == 1.0);
    std::filesystem::remove_all(dir);
}
