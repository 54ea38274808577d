//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file walk.test.cc
//---------------------------------------------------------------------------//
#include "ltube/walk.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace ltube
{
namespace test
{
//---------------------------------------------------------------------------//
// HELPERS
//---------------------------------------------------------------------------//
//! Constant step
struct ConstStep
{
    double d;

    template<class Engine>
    double operator()(Engine&) const
    {
        return d;
    }
};

//! Repeating deterministic step sequence
struct CycleStep
{
    std::vector<double> seq;
    std::size_t i{0};

    template<class Engine>
    double operator()(Engine&)
    {
        return seq[i++ % seq.size()];
    }
};

void expect_same(FirstPassageRecord const& a, FirstPassageRecord const& b)
{
    EXPECT_EQ(a.level_s, b.level_s);
    EXPECT_EQ(a.n_steps, b.n_steps);
    EXPECT_EQ(a.s_before, b.s_before);
    EXPECT_EQ(a.s_after, b.s_after);
    EXPECT_EQ(a.overshoot, b.overshoot);
    EXPECT_EQ(a.undershoot, b.undershoot);
    EXPECT_EQ(a.parity_even, b.parity_even);
    EXPECT_EQ(a.censored, b.censored);
}

void expect_same(LadderSample const& a, LadderSample const& b)
{
    EXPECT_EQ(a.heights, b.heights);
    EXPECT_EQ(a.epochs, b.epochs);
    EXPECT_EQ(a.pairs, b.pairs);
    EXPECT_EQ(a.n_steps, b.n_steps);
    EXPECT_EQ(a.censored, b.censored);
}

//---------------------------------------------------------------------------//
// FIRST PASSAGE
//---------------------------------------------------------------------------//
TEST(FirstPassageTest, unit_steps)
{
    Xoshiro256pp rng{1, 0};
    auto r = first_passage(ConstStep{1}, 2.5, 100, rng);
    EXPECT_EQ(3u, r.n_steps);
    EXPECT_EQ(2.0, r.s_before);
    EXPECT_EQ(3.0, r.s_after);
    EXPECT_EQ(0.5, r.overshoot);
    EXPECT_EQ(0.5, r.undershoot);
    EXPECT_FALSE(r.parity_even);
    EXPECT_FALSE(r.censored);
}

TEST(FirstPassageTest, alternating_steps)
{
    Xoshiro256pp rng{1, 0};
    auto a = first_passage(CycleStep{{2, -1}}, 1.5, 100, rng);
    EXPECT_EQ(1u, a.n_steps);
    EXPECT_EQ(1.5, a.undershoot);
    EXPECT_EQ(0.5, a.overshoot);

    // 2, 1, 3: strict passage over 2.5 at the third step
    auto b = first_passage(CycleStep{{2, -1}}, 2.5, 100, rng);
    EXPECT_EQ(3u, b.n_steps);
    EXPECT_EQ(1.5, b.undershoot);
    EXPECT_EQ(0.5, b.overshoot);

    // Landing exactly on the level is not a passage
    auto c = first_passage(CycleStep{{2, -1}}, 2, 100, rng);
    EXPECT_EQ(3u, c.n_steps);
    EXPECT_EQ(1.0, c.undershoot);
    EXPECT_EQ(1.0, c.overshoot);
    EXPECT_FALSE(c.parity_even);
}

TEST(FirstPassageTest, censored)
{
    Xoshiro256pp rng{1, 0};
    auto r = first_passage(ConstStep{-1}, 1, 10, rng);
    EXPECT_TRUE(r.censored);
    EXPECT_EQ(10u, r.n_steps);
    EXPECT_EQ(-10.0, r.s_after);
    EXPECT_EQ(0.0, r.overshoot);
    EXPECT_EQ(0.0, r.undershoot);
}

TEST(FirstPassageTest, bad_arguments)
{
    Xoshiro256pp rng{1, 0};
    EXPECT_THROW(first_passage(Step2D{}, 0, 10, rng), std::invalid_argument);
    EXPECT_THROW(first_passage(Step2D{}, -1, 10, rng), std::invalid_argument);
    EXPECT_THROW(first_passage(Step2D{}, 1, 0, rng), std::invalid_argument);
}

TEST(FirstPassageTest, default_caps)
{
    EXPECT_EQ(10000u, default_max_steps<Step2D>(10));
    EXPECT_EQ(500000u, default_max_steps<Step2D>(100));
    EXPECT_EQ(200000u, default_max_steps<Step3D>(100));
}

TEST(FirstPassageTest, random_walk_invariants)
{
    EnsembleOptions opt{5, 0, 1, 1024};
    auto recs = first_passage_ensemble(Step2D{}, 20, 2000, 100000, opt);
    for (auto const& r : recs)
    {
        if (r.censored)
            continue;
        ASSERT_LE(r.s_before, 20);
        ASSERT_GT(r.s_after, 20);
        ASSERT_GE(r.undershoot, 0);
        ASSERT_GT(r.overshoot, 0);
        ASSERT_EQ(r.parity_even, r.n_steps % 2 == 0);
        ASSERT_DOUBLE_EQ(r.s_after - r.s_before, r.undershoot + r.overshoot);
    }
    auto acc = count_censored(recs);
    EXPECT_EQ(2000u, acc.n_total);
    EXPECT_LT(acc.rate(), 0.1);
}

//---------------------------------------------------------------------------//
// BATCHED AND SCALAR PATHS
//---------------------------------------------------------------------------//
template<class S>
void check_batch_matches_scalar(double level, std::uint64_t n, std::uint64_t cap)
{
    EnsembleOptions opt{3, 77, 1, 256};
    auto batched = first_passage_ensemble(S{}, level, n, cap, opt);
    ASSERT_EQ(n, batched.size());
    for (std::uint64_t r = 0; r < n; ++r)
    {
        Xoshiro256pp rng{opt.seed, opt.stream_base + r};
        auto scalar = first_passage(S{}, level, cap, rng);
        expect_same(scalar, batched[r]);
        if (::testing::Test::HasFailure())
            FAIL() << "ray " << r;
    }
}

TEST(BatchTest, step2d_first_passage)
{
    check_batch_matches_scalar<Step2D>(30, 3000, 45000);
}

TEST(BatchTest, step3d_first_passage)
{
    check_batch_matches_scalar<Step3D>(30, 3000, 18000);
}

TEST(BatchTest, negated_first_passage)
{
    check_batch_matches_scalar<Negated<Step2D>>(10, 1000, 5000);
}

TEST(BatchTest, ladders)
{
    EnsembleOptions opt{4, 1000, 1, 256};
    auto batched = ladder_ensemble(Step3D{}, 500, 20, 100000, opt);
    for (std::uint64_t r = 0; r < 500; ++r)
    {
        Xoshiro256pp rng{opt.seed, opt.stream_base + r};
        expect_same(ladder_sample(Step3D{}, 20, 100000, rng), batched[r]);
    }
}

TEST(BatchTest, workers_do_not_change_results)
{
    EnsembleOptions one{9, 0, 1, 128}, four{9, 0, 4, 128};
    auto a = first_passage_ensemble(Step2D{}, 50, 4000, 125000, one);
    auto b = first_passage_ensemble(Step2D{}, 50, 4000, 125000, four);
    for (std::size_t i = 0; i < a.size(); ++i)
        expect_same(a[i], b[i]);

    auto ra = renewal_estimate(Step3D{}, 20, 40, 2000, 100000, one);
    auto rb = renewal_estimate(Step3D{}, 20, 40, 2000, 100000, four);
    EXPECT_EQ(ra.counts, rb.counts);

    std::vector<std::pair<double, double>> iv{{-40, -10}};
    auto oa = occupation_ensemble(Step3D{}, 50, iv, 500, 100000, one);
    auto ob = occupation_ensemble(Step3D{}, 50, iv, 500, 100000, four);
    for (std::size_t i = 0; i < oa.size(); ++i)
        EXPECT_EQ(oa[i].counts, ob[i].counts);
}

//---------------------------------------------------------------------------//
// LADDERS
//---------------------------------------------------------------------------//
TEST(LadderTest, unit_steps)
{
    Xoshiro256pp rng{1, 0};
    auto s = ladder_sample(ConstStep{1}, 3, 100, rng);
    EXPECT_EQ((std::vector<double>{1, 2, 3}), s.heights);
    EXPECT_EQ((std::vector<std::uint64_t>{1, 2, 3}), s.epochs);
    EXPECT_FALSE(s.censored);
}

TEST(LadderTest, alternating_steps)
{
    // Partial sums 2, 1, 3, 2, 4
    Xoshiro256pp rng{1, 0};
    auto s = ladder_sample(CycleStep{{2, -1}}, 3, 100, rng);
    EXPECT_EQ((std::vector<double>{2, 3, 4}), s.heights);
    EXPECT_EQ((std::vector<std::uint64_t>{1, 3, 5}), s.epochs);
    using P = std::pair<double, double>;
    EXPECT_EQ((std::vector<P>{{0, 2}, {1, 1}, {1, 1}}), s.pairs);
    EXPECT_EQ((P{0, 2}), s.first_pair);
}

TEST(LadderTest, censored_per_ladder)
{
    // One ascent, then the walk drifts down forever
    Xoshiro256pp rng{1, 0};
    CycleStep step{{1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1}};
    auto s = ladder_sample(step, 5, 4, rng);
    EXPECT_EQ((std::vector<double>{1}), s.heights);
    EXPECT_TRUE(s.censored);
    EXPECT_EQ(5u, s.n_steps);
}

TEST(LadderTest, heights_increase)
{
    EnsembleOptions opt{2, 0, 1, 1024};
    auto samples = ladder_ensemble(Step2D{}, 200, 50, 1000000, opt);
    for (auto const& s : samples)
    {
        for (std::size_t k = 1; k < s.heights.size(); ++k)
        {
            ASSERT_GT(s.heights[k], s.heights[k - 1]);
            ASSERT_GT(s.epochs[k], s.epochs[k - 1]);
            ASSERT_NEAR(s.heights[k] - s.heights[k - 1], s.pairs[k].second,
                        1e-9 * s.heights[k]);
        }
    }
}

TEST(LadderTest, mean_height_3d)
{
    // E Z+ = sqrt(pi)/2; E Z^2 diverges, so a fixed relative band
    EnsembleOptions opt{21, 0, 0, 1024};
    auto samples = ladder_ensemble(Step3D{}, 1000, 100, 1000000, opt);
    // A ladder epoch exceeds 1e6 steps with probability of order 1e-3, which
    // ends its ray; every other ray completes all its ladders
    std::vector<double> z;
    for (auto const& s : samples)
    {
        ASSERT_TRUE(s.censored || s.pairs.size() == 100);
        for (auto const& p : s.pairs)
            z.push_back(p.second);
    }
    ASSERT_GT(z.size(), 95000u);
    EXPECT_NEAR(ladder_mean_3d(), mean(z), 0.03 * ladder_mean_3d());
}

//---------------------------------------------------------------------------//
// RENEWAL
//---------------------------------------------------------------------------//
TEST(RenewalTest, lattice)
{
    EnsembleOptions opt{1, 0, 1, 1024};
    auto est = renewal_estimate(ConstStep{1}, 10, 10, 3, 100, opt);
    ASSERT_EQ(10u, est.mass.size());
    EXPECT_EQ(1.0, est.atom_at_zero);
    EXPECT_EQ(0.0, est.mass[0]);
    // Heights 1..10; the closed last bin holds 9 and 10
    double acc = 0;
    for (int k = 1; k <= 8; ++k)
    {
        acc += est.mass[k];
        EXPECT_DOUBLE_EQ(k, acc) << k;
    }
    EXPECT_DOUBLE_EQ(2.0, est.mass[9]);
    EXPECT_DOUBLE_EQ(10.0, est.cumulative(10));
    EXPECT_DOUBLE_EQ(0.5, est.cumulative(1.5));
    EXPECT_EQ(0u, est.n_censored);
}

TEST(RenewalTest, censored_paths_counted)
{
    EnsembleOptions opt{1, 0, 1, 1024};
    auto est = renewal_estimate(ConstStep{-1}, 10, 10, 7, 100, opt);
    EXPECT_EQ(7u, est.n_censored);
    EXPECT_EQ(0.0, est.cumulative(10));
}

TEST(RenewalTest, key_renewal_3d)
{
    // U([0, t]) / t -> 1 / E Z+ = 2 / sqrt(pi)
    EnsembleOptions opt{5, 0, 0, 1024};
    auto est = renewal_estimate(Step3D{}, 50, 200, 4000, 1000000, opt);
    double const slope = (est.cumulative(50) - est.cumulative(25)) / 25;
    EXPECT_NEAR(2 / std::sqrt(pi), slope, 0.05 * 2 / std::sqrt(pi));
    // Censored paths stay in the denominator; they are a few percent here
    EXPECT_LT(est.n_censored, 200u);
}

//---------------------------------------------------------------------------//
// OCCUPATION
//---------------------------------------------------------------------------//
TEST(OccupationTest, unit_steps)
{
    Xoshiro256pp rng{1, 0};
    std::vector<std::pair<double, double>> iv{{-5.5, -4.5}, {-9.5, -8.5},
                                              {-10, -9.5}, {-0.5, 0}};
    auto o = occupation_counts(ConstStep{1}, 10, iv, 100, rng);
    EXPECT_EQ((std::vector<std::uint64_t>{1, 1, 0, 0}), o.counts);
    EXPECT_EQ(11u, o.n_steps);
    EXPECT_FALSE(o.censored);
}

TEST(OccupationTest, rejects_bad_intervals)
{
    Xoshiro256pp rng{1, 0};
    std::vector<std::pair<double, double>> outside{{-11, -5}};
    std::vector<std::pair<double, double>> reversed{{-2, -3}};
    EXPECT_THROW(occupation_counts(ConstStep{1}, 10, outside, 100, rng),
                 std::invalid_argument);
    EXPECT_THROW(occupation_counts(ConstStep{1}, 10, reversed, 100, rng),
                 std::invalid_argument);
}

TEST(OccupationTest, additivity)
{
    double const s = 40;
    std::vector<std::pair<double, double>> iv{
        {-0.8 * s, -0.5 * s}, {-0.5 * s, -0.2 * s}, {-0.8 * s, -0.2 * s}};
    EnsembleOptions opt{6, 0, 1, 1024};
    auto occ = occupation_ensemble(Step3D{}, s, iv, 2000, 1000000, opt);
    std::uint64_t total = 0;
    for (auto const& o : occ)
    {
        ASSERT_EQ(o.counts[0] + o.counts[1], o.counts[2]);
        total += o.counts[2];
    }
    EXPECT_GT(total, 0u);
}

//---------------------------------------------------------------------------//
}  // namespace test
}  // namespace ltube
