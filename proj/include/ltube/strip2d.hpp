//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/strip2d.hpp
//! Rays in the semi-infinite strip [-inf, 0] x [0, 1].
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "stats.hpp"
#include "walk.hpp"

namespace ltube
{
//---------------------------------------------------------------------------//
/*!
 * Exit of a ray through the right edge x = 0.
 *
 * \c lambda is the signed angle between the exiting ray and the edge normal:
 * positive when the last chord runs from the lower wall to the upper wall
 * (odd N_s), negative otherwise.
 */
struct ExitRecord2D
{
    double level_s{0};
    double lambda{0};
    double y_exit{0};
    FirstPassageRecord fp;
};

//! arccot into (0, pi/2] for nonnegative arguments
inline double arccot_pos(double x)
{
    return std::atan2(1.0, x);
}

//! Map overshoot, undershoot and parity to the exit angle and height
inline ExitRecord2D exit_from_passage(FirstPassageRecord const& fp)
{
    ExitRecord2D e;
    e.level_s = fp.level_s;
    e.fp = fp;
    if (fp.censored)
        return e;
    double const o = fp.overshoot;
    double const u = fp.undershoot;
    double const a = arccot_pos(o + u);
    if (fp.parity_even)
    {
        e.lambda = -a;
        e.y_exit = o / (o + u);
    }
    else
    {
        e.lambda = a;
        e.y_exit = u / (o + u);
    }
    return e;
}

//! Trace one ray from (-s, 0) with the given stepper and engine
template<class Stepper, class Engine>
ExitRecord2D trace_exit_2d(Stepper&& stepper,
                           double level_s,
                           std::uint64_t max_steps,
                           Engine& rng)
{
    return exit_from_passage(
        first_passage(std::forward<Stepper>(stepper), level_s, max_steps, rng));
}

//! Trace one ray from (-s, 0) with the Lambertian step and default cap
template<class Engine>
ExitRecord2D trace_exit_2d(double level_s, Engine& rng)
{
    return trace_exit_2d(
        Step2D{}, level_s, default_max_steps<Step2D>(level_s), rng);
}

//---------------------------------------------------------------------------//
/*!
 * Reflection points of one ray.
 *
 * \c points holds (x, y) for n = 0..N: the start, every wall contact, and the
 * first contact beyond x = 0. The last segment is cut at \c exit_point.
 */
struct Path2D
{
    std::vector<std::array<double, 2>> points;
    std::array<double, 2> exit_point{0, 0};
    FirstPassageRecord fp;
};

template<class Stepper, class Engine>
Path2D trace_path_2d(Stepper&& stepper,
                     double level_s,
                     std::uint64_t max_steps,
                     Engine& rng)
{
    expect(level_s > 0, "trace_path_2d: level must be positive");
    Path2D path;
    double pos = 0;
    std::uint64_t n = 0;
    path.points.push_back({-level_s, 0.0});
    for (;;)
    {
        double const prev = pos;
        pos = prev + stepper(rng);
        ++n;
        double const wall = (n % 2 == 1) ? 1.0 : 0.0;
        path.points.push_back({pos - level_s, wall});
        bool const crossed = pos > level_s;
        if (crossed || n >= max_steps)
        {
            detail::FirstPassageHandler h{level_s, max_steps, &path.fp};
            double thr = level_s;
            std::uint64_t cap = max_steps;
            h.event(0, prev, pos, n, thr, cap);
            break;
        }
    }
    if (!path.fp.censored)
        path.exit_point = {0.0, exit_from_passage(path.fp).y_exit};
    return path;
}

template<class Engine>
Path2D trace_path_2d(double level_s, Engine& rng)
{
    return trace_path_2d(
        Step2D{}, level_s, default_max_steps<Step2D>(level_s), rng);
}

//---------------------------------------------------------------------------//
// ENSEMBLE STATISTICS
//---------------------------------------------------------------------------//
//! Exit records for rays 0..n_rays-1 (stream_base + i per ray)
inline std::vector<ExitRecord2D> exit_ensemble_2d(double level_s,
                                                  std::uint64_t n_rays,
                                                  std::uint64_t max_steps,
                                                  EnsembleOptions const& opt)
{
    auto fps = first_passage_ensemble(Step2D{}, level_s, n_rays, max_steps,
                                      opt);
    std::vector<ExitRecord2D> out(fps.size());
    for (std::size_t i = 0; i < fps.size(); ++i)
        out[i] = exit_from_passage(fps[i]);
    return out;
}

/*!
 * sqrt(log x / log s), with x <= 1 mapped to 0.
 *
 * The functional is undefined for x <= 1; such rays become rarer as s grows
 * and the choice does not affect limits.
 */
inline double scaled_log(double x, double level_s)
{
    if (!(x > 1))
        return 0;
    return std::sqrt(std::log(x) / std::log(level_s));
}

//! Uncensored records only
inline std::vector<ExitRecord2D>
uncensored(std::vector<ExitRecord2D> const& recs)
{
    std::vector<ExitRecord2D> out;
    out.reserve(recs.size());
    for (auto const& r : recs)
        if (!r.fp.censored)
            out.push_back(r);
    return out;
}

//! Empirical u(s, t) = P(U/(O+U) <= t) over uncensored rays
inline std::vector<double>
undershoot_ratio_law(std::vector<ExitRecord2D> const& recs,
                     std::vector<double> const& t_grid)
{
    for (double t : t_grid)
        expect(t >= 0 && t <= 1, "undershoot_ratio_law: t outside [0, 1]");
    std::vector<std::uint64_t> hits(t_grid.size(), 0);
    std::uint64_t n = 0;
    for (auto const& r : recs)
    {
        if (r.fp.censored)
            continue;
        ++n;
        double const ratio
            = r.fp.undershoot / (r.fp.undershoot + r.fp.overshoot);
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            hits[i] += (ratio <= t_grid[i]) ? 1 : 0;
    }
    std::vector<double> u(t_grid.size(), 0.0);
    if (n == 0)
        return u;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        u[i] = static_cast<double>(hits[i]) / static_cast<double>(n);
    return u;
}

//---------------------------------------------------------------------------//
/*!
 * Joint exit-law probabilities on a (t, v) grid.
 *
 * \c asym[j] estimates P(sqrt(log U/log s) <= t, U/(U+O) <= v, N parity j)
 * with j = 0 for even and 1 for odd. \c scaling[j] estimates
 * P(sqrt(log cot|L|/log s) <= t, sgn * L <= 0, Y <= v) with sgn = +1 for
 * j = 0 and -1 for j = 1.
 */
struct JointLawSummary
{
    double level_s{0};
    std::vector<double> t_grid;
    std::vector<double> v_grid;
    std::array<std::vector<double>, 2> asym;  //!< [parity][t * nv + v]
    std::array<std::vector<double>, 2> scaling;  //!< [sign][t * nv + v]
    std::uint64_t n_samples{0};

    double asym_at(int j, std::size_t ti, std::size_t vi) const
    {
        return asym[j][ti * v_grid.size() + vi];
    }
    double scaling_at(int j, std::size_t ti, std::size_t vi) const
    {
        return scaling[j][ti * v_grid.size() + vi];
    }
};

inline JointLawSummary joint_exit_law(std::vector<ExitRecord2D> const& recs,
                                      double level_s,
                                      std::vector<double> const& t_grid,
                                      std::vector<double> const& v_grid)
{
    for (double t : t_grid)
        expect(t >= 0 && t <= 1, "joint_exit_law: t outside [0, 1]");
    for (double v : v_grid)
        expect(v >= 0 && v <= 1, "joint_exit_law: v outside [0, 1]");
    JointLawSummary js;
    js.level_s = level_s;
    js.t_grid = t_grid;
    js.v_grid = v_grid;
    std::size_t const nt = t_grid.size(), nv = v_grid.size();
    std::array<std::vector<std::uint64_t>, 2> ca, cs;
    for (int j = 0; j < 2; ++j)
    {
        ca[j].assign(nt * nv, 0);
        cs[j].assign(nt * nv, 0);
    }
    std::uint64_t n = 0;
    for (auto const& r : recs)
    {
        if (r.fp.censored)
            continue;
        ++n;
        double const o = r.fp.overshoot, u = r.fp.undershoot;
        double const ls_u = scaled_log(u, level_s);
        double const ls_cot = scaled_log(o + u, level_s);
        double const ratio = u / (u + o);
        int const parity = r.fp.parity_even ? 0 : 1;
        // sgn * lambda <= 0: sgn = +1 needs lambda <= 0, sgn = -1 needs >= 0
        bool const side[2] = {r.lambda <= 0, r.lambda >= 0};
        for (std::size_t ti = 0; ti < nt; ++ti)
        {
            for (std::size_t vi = 0; vi < nv; ++vi)
            {
                std::size_t const k = ti * nv + vi;
                if (ls_u <= t_grid[ti] && ratio <= v_grid[vi])
                    ++ca[parity][k];
                if (ls_cot <= t_grid[ti] && r.y_exit <= v_grid[vi])
                {
                    for (int j = 0; j < 2; ++j)
                        cs[j][k] += side[j] ? 1 : 0;
                }
            }
        }
    }
    js.n_samples = n;
    for (int j = 0; j < 2; ++j)
    {
        js.asym[j].assign(nt * nv, 0.0);
        js.scaling[j].assign(nt * nv, 0.0);
        if (n == 0)
            continue;
        for (std::size_t k = 0; k < nt * nv; ++k)
        {
            js.asym[j][k] = static_cast<double>(ca[j][k])
                            / static_cast<double>(n);
            js.scaling[j][k] = static_cast<double>(cs[j][k])
                               / static_cast<double>(n);
        }
    }
    return js;
}

//---------------------------------------------------------------------------//
/*!
 * Conditional law of (sqrt(log cot|L| / log s), side) given Y in (y-eps, y].
 *
 * \c prob[0][i] is P(scaled <= t_i, L <= 0 | window) and \c prob[1][i] is
 * P(scaled <= t_i, L >= 0 | window).
 */
struct EyeTable
{
    double level_s{0};
    double y{0};
    double eps{0};
    std::vector<double> t_grid;
    std::array<std::vector<double>, 2> prob;
    std::uint64_t n_window{0};
    std::uint64_t n_samples{0};
};

inline EyeTable eye_conditional(std::vector<ExitRecord2D> const& recs,
                                double level_s,
                                double y,
                                double eps,
                                std::vector<double> const& t_grid,
                                std::uint64_t min_window = 100)
{
    expect(eps > 0 && eps < y && y <= 1, "eye_conditional: need 0 < eps < y <= 1");
    EyeTable tab;
    tab.level_s = level_s;
    tab.y = y;
    tab.eps = eps;
    tab.t_grid = t_grid;
    std::array<std::vector<std::uint64_t>, 2> c;
    c[0].assign(t_grid.size(), 0);
    c[1].assign(t_grid.size(), 0);
    for (auto const& r : recs)
    {
        if (r.fp.censored)
            continue;
        ++tab.n_samples;
        if (!(r.y_exit > y - eps && r.y_exit <= y))
            continue;
        ++tab.n_window;
        double const ls = scaled_log(r.fp.overshoot + r.fp.undershoot,
                                     level_s);
        for (std::size_t i = 0; i < t_grid.size(); ++i)
        {
            if (ls <= t_grid[i])
            {
                c[0][i] += (r.lambda <= 0) ? 1 : 0;
                c[1][i] += (r.lambda >= 0) ? 1 : 0;
            }
        }
    }
    if (tab.n_window < min_window)
    {
        throw InsufficientConditioningMass(
            "eye_conditional: " + std::to_string(tab.n_window)
            + " rays in window, need " + std::to_string(min_window));
    }
    for (int j = 0; j < 2; ++j)
    {
        tab.prob[j].resize(t_grid.size());
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            tab.prob[j][i] = static_cast<double>(c[j][i])
                             / static_cast<double>(tab.n_window);
    }
    return tab;
}

//---------------------------------------------------------------------------//
/*!
 * Histogram of the heuristic L = R arccot(s^{V^2}), R a fair sign and V
 * uniform on [0, 1], evaluated on a midpoint quadrature in V. Returned as
 * probabilities per bin of \c edges.
 */
inline std::vector<double> heuristic_lambda_histogram(
    double level_s, std::vector<double> const& edges, std::size_t n_quad = 100000)
{
    Histogram h{edges};
    for (std::size_t i = 0; i < n_quad; ++i)
    {
        double const v = (static_cast<double>(i) + 0.5)
                         / static_cast<double>(n_quad);
        double const a = arccot_pos(std::pow(level_s, v * v));
        h.add(a);
        h.add(-a);
    }
    std::vector<double> p(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        p[i] = static_cast<double>(h.counts()[i])
               / static_cast<double>(2 * n_quad);
    return p;
}

//---------------------------------------------------------------------------//
}  // namespace ltube
