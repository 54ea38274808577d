//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file cylinder3d.test.cc
//---------------------------------------------------------------------------//
#include "ltube/cylinder3d.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace ltube
{
namespace test
{
//---------------------------------------------------------------------------//
//! Same bounce on every call
struct FixedBounce
{
    ReflectionDirection d;

    template<class Engine>
    ReflectionDirection operator()(Engine&) const
    {
        return d;
    }
};

static std::vector<ExitRecord3D> sample_exits(double s, std::uint64_t n, std::uint64_t seed)
{
    EnsembleOptions opt{seed, 0, 0, 1024};
    return exit_ensemble_3d(s, n, default_max_steps<Step3D>(s), opt);
}

//---------------------------------------------------------------------------//
// GEOMETRY
//---------------------------------------------------------------------------//
TEST(BounceTest, diametric)
{
    auto const d = bounce_from_angles(0, 0.7);
    auto q = apply_bounce(CylinderState{3, 0, -1}, d);
    EXPECT_DOUBLE_EQ(3.0, q.x);
    EXPECT_NEAR(0.0, q.y, 1e-15);
    EXPECT_DOUBLE_EQ(1.0, q.z);

    double const a = 0.4;
    auto r = apply_bounce(CylinderState{0, std::cos(a), std::sin(a)}, d);
    EXPECT_NEAR(-std::cos(a), r.y, 1e-15);
    EXPECT_NEAR(-std::sin(a), r.z, 1e-15);
}

TEST(BounceTest, lands_on_circle)
{
    Xoshiro256pp rng{1, 0};
    for (int i = 0; i < 10000; ++i)
    {
        double const a = 2 * pi * generate_open_unit(rng);
        CylinderState p{0, std::cos(a), std::sin(a)};
        auto q = apply_bounce(p, sample_chord_3d(rng));
        ASSERT_NEAR(1.0, q.y * q.y + q.z * q.z, 1e-12);
    }
}

TEST(BounceTest, single_step_exit)
{
    // theta = pi/4, phi = 0: chord 2 sqrt(2), axial step 2, projection a
    // diameter from (0, -1) to (0, 1). Level 0.1 is crossed 1/20 of the way.
    Xoshiro256pp rng{1, 0};
    auto e = trace_exit_3d(FixedBounce{bounce_from_angles(pi / 4, 0)}, 0.1,
                           10, rng);
    EXPECT_FALSE(e.fp.censored);
    EXPECT_EQ(1u, e.fp.n_steps);
    EXPECT_NEAR(0.1, e.fp.undershoot, 1e-15);
    EXPECT_NEAR(1.9, e.fp.overshoot, 1e-15);
    EXPECT_NEAR(0.0, e.exit_point[0], 1e-15);
    EXPECT_NEAR(-0.9, e.exit_point[1], 1e-14);
    EXPECT_NEAR(1 / std::sqrt(2.0), e.exit_dir[0], 1e-15);
    EXPECT_NEAR(0.0, e.exit_dir[1], 1e-15);
    EXPECT_NEAR(1 / std::sqrt(2.0), e.exit_dir[2], 1e-15);
}

TEST(BounceTest, circle_invariant_long_walk)
{
    Xoshiro256pp rng{2, 0};
    double worst = 0;
    walk_bounces_3d(1000000, rng, [&](std::uint64_t, CylinderState const& p) {
        worst = std::max(worst, std::abs(p.y * p.y + p.z * p.z - 1));
    });
    EXPECT_LT(worst, 1e-9);
}

TEST(BounceTest, wall_marks_uniform)
{
    // After 20 bounces the angular position has forgotten its start
    std::size_t const n = 20000;
    std::vector<double> ang(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Xoshiro256pp rng{3, i};
        walk_bounces_3d(20, rng, [&](std::uint64_t k, CylinderState const& p) {
            if (k == 20)
                ang[i] = (std::atan2(p.z, p.y) + pi) / (2 * pi);
        });
    }
    EmpiricalCDF ecdf{ang};
    EXPECT_LT(ks_distance(ecdf, uniform01_cdf), ks_critical(n, 0.01));
}

//---------------------------------------------------------------------------//
// EXITS
//---------------------------------------------------------------------------//
TEST(ExitTest, axial_walk_matches_step3d)
{
    for (std::uint64_t r = 0; r < 500; ++r)
    {
        Xoshiro256pp a{4, r}, b{4, r};
        auto e = trace_exit_3d(30, 18000, a);
        auto fp = first_passage(Step3D{}, 30, 18000, b);
        ASSERT_EQ(fp.n_steps, e.fp.n_steps);
        ASSERT_EQ(fp.s_after, e.fp.s_after);
        ASSERT_EQ(fp.undershoot, e.fp.undershoot);
    }
}

TEST(ExitTest, geometry)
{
    auto recs = sample_exits(30, 3000, 5);
    for (auto const& e : recs)
    {
        if (e.fp.censored)
            continue;
        auto const& d = e.exit_dir;
        ASSERT_NEAR(1.0, d[0] * d[0] + d[1] * d[1] + d[2] * d[2], 1e-12);
        ASSERT_GT(d[0], 0);
        ASSERT_LE(exit_radius(e), 1 + 1e-12);
        // Exit point divides the last chord in the ratio U : O
        double const f = e.fp.undershoot / (e.fp.undershoot + e.fp.overshoot);
        for (int k = 0; k < 2; ++k)
        {
            double const expected = e.last_contact[k]
                                    + f * (e.next_contact[k] - e.last_contact[k]);
            ASSERT_NEAR(expected, e.exit_point[k], 1e-9);
        }
    }
}

TEST(ExitTest, rotational_invariance)
{
    auto recs = sample_exits(20, 5000, 6);
    EXPECT_GT(rotational_invariance_pvalue(recs), 1e-3);
}

TEST(ExitTest, workers_do_not_change_results)
{
    EnsembleOptions one{7, 0, 1, 64}, four{7, 0, 4, 64};
    auto a = exit_ensemble_3d(25, 1000, 12500, one);
    auto b = exit_ensemble_3d(25, 1000, 12500, four);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        ASSERT_EQ(a[i].exit_point, b[i].exit_point);
        ASSERT_EQ(a[i].exit_dir, b[i].exit_dir);
    }
}

//---------------------------------------------------------------------------//
// GAMMA AND DISC LAW
//---------------------------------------------------------------------------//
TEST(GammaTest, constants)
{
    EXPECT_NEAR(0.41, gamma_slope_at_zero(), 5e-4);
    EXPECT_DOUBLE_EQ(1.0, disc_linear_bound(1));
    EXPECT_NEAR(0.295, disc_linear_bound(0), 1e-3);
}

TEST(GammaTest, endpoints)
{
    EnsembleOptions opt{8, 0, 0, 1024};
    auto fps = first_passage_ensemble(Step3D{}, 50, 5000, 50000, opt);
    auto pairs = ladder_pairs(Step3D{}, 200, 100, 1000000, opt);
    GammaEstimate est;
    est.t_grid = {0, 0.25, 0.5, 0.75, 1};
    gamma_direct(fps, est);
    gamma_formula(pairs, est);
    EXPECT_EQ(0.0, est.atom_direct);
    EXPECT_EQ(0.0, est.direct.front());
    EXPECT_EQ(1.0, est.direct.back());
    EXPECT_EQ(0.0, est.formula.front());
    EXPECT_DOUBLE_EQ(1.0, est.formula.back());
    for (std::size_t i = 1; i < est.t_grid.size(); ++i)
    {
        EXPECT_LE(est.direct[i - 1], est.direct[i]);
        EXPECT_LE(est.formula[i - 1], est.formula[i]);
    }
    // Finite-s and ladder estimates agree at moderate s
    for (std::size_t i = 0; i < est.t_grid.size(); ++i)
        EXPECT_NEAR(est.direct[i], est.formula[i], 0.05);
}

TEST(GammaTest, formula_is_convex_in_t)
{
    std::vector<std::pair<double, double>> pairs;
    Xoshiro256pp rng{9, 0};
    for (int i = 0; i < 1000; ++i)
        pairs.emplace_back(generate_open_unit(rng), generate_open_unit(rng));
    GammaEstimate est;
    for (int i = 0; i <= 20; ++i)
        est.t_grid.push_back(i / 20.0);
    gamma_formula(pairs, est);
    // Mean of convex functions of t: exact second differences are >= 0
    for (std::size_t i = 1; i + 1 < est.t_grid.size(); ++i)
        EXPECT_GE(est.formula[i + 1] - 2 * est.formula[i] + est.formula[i - 1],
                  -1e-12);
}

TEST(GammaTest, ladder_censoring_account)
{
    EnsembleOptions opt{10, 0, 1, 1024};
    CensoringAccount acc;
    auto pairs = ladder_pairs(Step3D{}, 50, 20, 5, opt, &acc);
    EXPECT_EQ(pairs.size() + acc.n_censored, acc.n_total);
    EXPECT_GT(acc.n_censored, 0u);
    EXPECT_LE(acc.n_censored, 50u);
}

TEST(DiscLawTest, full_disc_and_bound)
{
    auto recs = sample_exits(30, 5000, 11);
    std::vector<double> r{0.1, 0.25, 0.5, 0.75, 1};
    auto law = disc_exit_law(recs, r);
    EXPECT_EQ(1.0, law.prob.back());
    for (std::size_t i = 0; i < r.size(); ++i)
        EXPECT_LE(law.prob[i], disc_linear_bound(r[i]) + 3 * law.se[i]) << r[i];
    EXPECT_THROW(disc_exit_law(recs, {1.5}), std::invalid_argument);
}

//---------------------------------------------------------------------------//
// BRIGHTNESS
//---------------------------------------------------------------------------//
TEST(BrightnessTest, analytic_density)
{
    auto density = [](double a) { return 2 * a / pi; };
    for (auto [r1, r2] : {std::pair{0.2, 0.8}, std::pair{0.1, 0.5},
                          std::pair{0.05, 0.95}})
    {
        EXPECT_NEAR(brightness_constant(r1, r2),
                    brightness_from_density(r1, r2, density), 1e-12);
    }
    EXPECT_EQ(0.0, brightness_from_density(0.3, 0.3, density));
    EXPECT_THROW(brightness_from_density(0.5, 0.3, density),
                 std::invalid_argument);
}

TEST(BrightnessTest, profile)
{
    EnsembleOptions one{12, 0, 1, 1024}, four{12, 0, 4, 1024};
    std::vector<std::pair<double, double>> annuli{{0.2, 0.8}, {0.4, 0.4}};
    auto a = brightness_profile(30, annuli, 1000, 18000, one);
    auto b = brightness_profile(30, annuli, 1000, 18000, four);
    ASSERT_EQ(2u, a.size());
    EXPECT_GT(a[0].estimate, 0);
    EXPECT_GT(a[0].std_error, 0);
    EXPECT_EQ(64u, a[0].occupation.size());
    EXPECT_EQ(0.0, a[1].estimate);
    EXPECT_EQ(a[0].estimate, b[0].estimate);
    EXPECT_EQ(a[0].occupation, b[0].occupation);
}

//---------------------------------------------------------------------------//
}  // namespace test
}  // namespace ltube
