//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file stats.test.cc
//---------------------------------------------------------------------------//
#include "ltube/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "ltube/parallel.hpp"
#include "ltube/rng.hpp"

namespace ltube
{
namespace test
{
//---------------------------------------------------------------------------//
TEST(SumTest, pairwise_accuracy)
{
    std::vector<double> x(1 << 20, 0.1);
    long double exact = 0.1L * static_cast<long double>(x.size());
    double const naive = std::accumulate(x.begin(), x.end(), 0.0);
    double const pw = pairwise_sum(x);
    EXPECT_LT(std::abs(pw - static_cast<double>(exact)),
              std::abs(naive - static_cast<double>(exact)));
    EXPECT_NEAR(static_cast<double>(exact), pw, 1e-9);
}

TEST(SumTest, mean_variance)
{
    std::vector<double> x{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(2.5, mean(x));
    EXPECT_DOUBLE_EQ(5.0 / 3, variance(x));
}

//---------------------------------------------------------------------------//
TEST(NormalTest, quantile_round_trip)
{
    for (double z : {-5.0, -1.96, -0.3, 0.0, 1.0, 2.5758})
        EXPECT_NEAR(z, normal_quantile(normal_cdf(z)), 1e-9);
    EXPECT_NEAR(1.959964, two_sided_z(0.95), 1e-6);
}

TEST(KolmogorovTest, tail)
{
    EXPECT_NEAR(0.01, kolmogorov_sf(1.6276), 1e-4);
    EXPECT_NEAR(0.05, kolmogorov_sf(1.3581), 1e-4);
    EXPECT_EQ(1.0, kolmogorov_sf(0));
    EXPECT_NEAR(1.6276 / 100, ks_critical(10000, 0.01), 1e-5);
}

//---------------------------------------------------------------------------//
TEST(KsTest, quantile_sample)
{
    // Sample at (i - 1/2)/n attains the minimum distance 1/(2n)
    std::size_t const n = 1000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    EXPECT_NEAR(0.5 / n, ks_distance(EmpiricalCDF{x}, uniform01_cdf), 1e-15);
}

TEST(KsTest, constant_sample)
{
    std::vector<double> x(100, 0.3);
    EXPECT_GE(ks_distance(EmpiricalCDF{x}, uniform01_cdf), 0.5);
}

TEST(KsTest, uniform_sample)
{
    Xoshiro256pp rng{1, 0};
    std::vector<double> x(100000);
    for (auto& v : x)
        v = generate_open_unit(rng);
    double const d = ks_distance(EmpiricalCDF{x}, uniform01_cdf);
    EXPECT_LT(d, ks_critical(x.size(), 0.01));
    EXPECT_GT(ks_pvalue(d, x.size()), 0.01);
}

//---------------------------------------------------------------------------//
TEST(EcdfTest, limits_and_continuity)
{
    EmpiricalCDF f{std::vector<double>{3, 1, 2, 2}};
    double const inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(0.0, f(-inf));
    EXPECT_EQ(1.0, f(inf));
    EXPECT_EQ(0.25, f(1));
    EXPECT_EQ(0.75, f(2));
    EXPECT_EQ(0.25, f(1.999));
    EXPECT_EQ(2.0, f.median());
    EXPECT_EQ(1.0, f.quantile(0));
    EXPECT_EQ(3.0, f.quantile(1));
}

//---------------------------------------------------------------------------//
TEST(RatioTest, identity)
{
    std::vector<double> x{0.5, 1.5, 2.0, 0.1};
    auto r = ratio_estimator_ci(x, x);
    EXPECT_DOUBLE_EQ(1.0, r.estimate);
    EXPECT_NEAR(0.0, r.std_error, 1e-15);
    EXPECT_DOUBLE_EQ(1.0, r.lower);
    EXPECT_DOUBLE_EQ(1.0, r.upper);
}

TEST(RatioTest, scaled)
{
    Xoshiro256pp rng{2, 0};
    std::vector<double> den(1000), num(1000);
    for (std::size_t i = 0; i < den.size(); ++i)
    {
        den[i] = generate_open_unit(rng);
        num[i] = 2 * den[i];
    }
    auto r = ratio_estimator_ci(num, den);
    EXPECT_DOUBLE_EQ(2.0, r.estimate);
    EXPECT_LE(r.lower, 2.0);
    EXPECT_GE(r.upper, 2.0);
}

TEST(RatioTest, interval_covers)
{
    Xoshiro256pp rng{3, 0};
    std::vector<double> den(5000), num(5000);
    for (std::size_t i = 0; i < den.size(); ++i)
    {
        den[i] = generate_open_unit(rng);
        num[i] = 0.3 * den[i] + 0.1 * (generate_open_unit(rng) - 0.5);
    }
    auto r = ratio_estimator_ci(num, den);
    EXPECT_LT(r.lower, 0.3);
    EXPECT_GT(r.upper, 0.3);
    EXPECT_GT(r.std_error, 0);
    // Reproducible bootstrap
    auto r2 = ratio_estimator_ci(num, den);
    EXPECT_EQ(r.lower, r2.lower);
    EXPECT_EQ(r.upper, r2.upper);
}

TEST(RatioTest, degenerate_denominator)
{
    std::vector<double> num{1, 2}, zero{0, 0}, neg{-1, 0.5};
    EXPECT_THROW(ratio_estimator_ci(num, zero), DegenerateDenominator);
    EXPECT_THROW(ratio_estimator_ci(num, neg), DegenerateDenominator);
}

//---------------------------------------------------------------------------//
TEST(SummaryTest, proportion)
{
    auto p = proportion_summary(30, 100);
    EXPECT_DOUBLE_EQ(0.3, p.estimate);
    EXPECT_NEAR(std::sqrt(0.3 * 0.7 / 100), p.std_error, 1e-15);
    EXPECT_LT(p.lower, 0.3);
    EXPECT_GT(p.upper, 0.3);
    EXPECT_THROW(proportion_summary(0, 0), std::invalid_argument);
}

TEST(SummaryTest, binomial)
{
    EXPECT_NEAR(1.0, binomial_test(500, 1000, 0.5).p_value, 1e-12);
    EXPECT_LT(binomial_test(600, 1000, 0.5).p_value, 1e-9);
}

//---------------------------------------------------------------------------//
TEST(HistogramTest, binning)
{
    auto h = Histogram::uniform(0, 1, 4);
    for (double x : {-0.1, 0.0, 0.24, 0.25, 0.99, 1.0, 2.0})
        h.add(x);
    EXPECT_EQ((std::vector<std::uint64_t>{2, 1, 0, 1}), h.counts());
    EXPECT_EQ(1u, h.underflow());
    EXPECT_EQ(2u, h.overflow());
    EXPECT_EQ(7u, h.total());
}

TEST(HistogramTest, log_edges)
{
    auto h = Histogram::log_spaced(1, 100, 2);
    EXPECT_EQ(1.0, h.edges().front());
    EXPECT_EQ(100.0, h.edges().back());
    EXPECT_NEAR(10.0, h.edges()[1], 1e-12);
    EXPECT_THROW(Histogram::log_spaced(0, 1, 2), std::invalid_argument);
}

TEST(HistogramTest, merge_matches_concatenation)
{
    Xoshiro256pp rng{4, 0};
    std::vector<double> x(10000);
    for (auto& v : x)
        v = 3 * generate_open_unit(rng) - 1;
    auto blank = Histogram::uniform(0, 1, 17);
    auto whole = blank;
    for (double v : x)
        whole.add(v);
    for (std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{5000},
                            std::size_t{9999}})
    {
        auto a = blank, b = blank;
        for (std::size_t i = 0; i < x.size(); ++i)
            (i < cut ? a : b).add(x[i]);
        auto ab = a, ba = b;
        ab.merge(b);
        ba.merge(a);
        EXPECT_EQ(whole.counts(), ab.counts());
        EXPECT_EQ(whole.counts(), ba.counts());
        EXPECT_EQ(whole.total(), ab.total());
    }
    EXPECT_THROW(whole.merge(Histogram::uniform(0, 1, 3)),
                 std::invalid_argument);
}

//---------------------------------------------------------------------------//
TEST(ParallelTest, map_blocks_independent_of_workers)
{
    auto fn = [](std::uint64_t block, std::uint64_t b, std::uint64_t e) {
        Xoshiro256pp rng{7, block};
        double acc = 0;
        for (std::uint64_t i = b; i < e; ++i)
            acc += generate_open_unit(rng);
        return acc;
    };
    auto one = map_blocks(100000, 1000, 1, fn);
    auto four = map_blocks(100000, 1000, 4, fn);
    auto many = map_blocks(100000, 1000, 0, fn);
    ASSERT_EQ(100u, one.size());
    EXPECT_EQ(one, four);
    EXPECT_EQ(one, many);
}

TEST(ParallelTest, exception_propagates)
{
    auto fn = [](std::uint64_t block, std::uint64_t, std::uint64_t) {
        if (block == 3)
            throw Error("boom");
        return 0;
    };
    EXPECT_THROW(map_blocks(100, 10, 4, fn), Error);
}

//---------------------------------------------------------------------------//
}  // namespace test
}  // namespace ltube
