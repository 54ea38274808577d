//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/sampling.hpp
//! Lambertian angle, 2D step and 3D bounce samplers with closed-form laws.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>

#include "detail/trig.hpp"
#include "rng.hpp"

namespace ltube
{
//---------------------------------------------------------------------------//
inline constexpr double pi = detail::pi_v;

//! Reflection angle and its sine
struct AngleSample
{
    double theta{0};
    double v{0};  //!< sin(theta)
};

//---------------------------------------------------------------------------//
/*!
 * One sampled bounce inside the unit-radius cylinder.
 *
 * \c theta is measured from the inward normal, \c phi is the azimuth about
 * the normal with phi = 0 pointing along the tube axis. The chord length is
 * not bounded by the diameter: a chord with an axial component can be
 * arbitrarily long as theta approaches pi/2.
 */
struct ReflectionDirection
{
    double theta{0};
    double phi{0};
    double r{0};  //!< chord length
    double x_step{0};  //!< axial displacement
    double sin_theta{0};
    double cos_theta{1};
    double sin_phi{0};
    double cos_phi{1};
};

//---------------------------------------------------------------------------//
// LAMBERTIAN ANGLE
//---------------------------------------------------------------------------//
//! Invert the angle CDF at a uniform deviate in (0, 1)
inline AngleSample theta_from_uniform(double u)
{
    double const v = 2 * u - 1;
    return {std::asin(v), v};
}

//! Sample the reflection angle with density cos(theta)/2
template<class Engine>
inline AngleSample sample_theta(Engine& rng)
{
    return theta_from_uniform(generate_open_unit(rng));
}

//! CDF of the reflection angle
inline double theta_cdf(double t)
{
    if (t <= -pi / 2)
        return 0;
    if (t >= pi / 2)
        return 1;
    return (std::sin(t) + 1) / 2;
}

//---------------------------------------------------------------------------//
// 2D STEP: X = tan(Theta)
//---------------------------------------------------------------------------//
//! Step from V = sin(theta), evaluated without forming tan near pi/2
inline double step_2d_from_v(double v)
{
    return v / std::sqrt((1 - v) * (1 + v));
}

/*!
 * Step from a uniform deviate.
 *
 * Same value as \c step_2d_from_v(2u-1), written in terms of u so that the
 * radicand u(1-u) is computed without cancellation.
 */
inline double step_2d_from_uniform(double u)
{
    return (2 * u - 1) / (2 * std::sqrt(u * (1 - u)));
}

template<class Engine>
inline double sample_step_2d(Engine& rng)
{
    return step_2d_from_uniform(generate_open_unit(rng));
}

//! Upper tail P(X > x) for x >= 0, free of cancellation
inline double step_upper_tail_pos_2d(double x)
{
    double const h = std::hypot(1.0, x);
    return 1 / (2 * h * (h + x));
}

//! Survival function P(X > x)
inline double step_sf_2d(double x)
{
    if (x >= 0)
        return step_upper_tail_pos_2d(x);
    return 1 - step_upper_tail_pos_2d(-x);
}

//! CDF F(x) = 1/2 + x / (2 sqrt(1 + x^2))
inline double step_cdf_2d(double x)
{
    if (x <= 0)
        return step_upper_tail_pos_2d(-x);
    return 1 - step_upper_tail_pos_2d(x);
}

//! Density (1 + x^2)^{-3/2} / 2
inline double step_pdf_2d(double x)
{
    double const h = std::hypot(1.0, x);
    return 0.5 / (h * h * h);
}

//! Partial first moment: integral of y f(y) over (-inf, x]
inline double step_partial_mean_2d(double x)
{
    return -0.5 / std::hypot(1.0, x);
}

//---------------------------------------------------------------------------//
// 3D BOUNCE
//---------------------------------------------------------------------------//
/*!
 * Chord geometry of one bounce, without the angles themselves.
 */
struct Chord
{
    double r{0};
    double x_step{0};
    double sin_theta{0};
    double cos_theta{1};
    double sin_phi{0};
    double cos_phi{1};
};

/*!
 * Chord geometry from two uniform deviates.
 *
 * \c u1 gives V = sin(theta) = 2 u1 - 1 and \c u2 gives phi = pi (u2 - 1/2).
 * With q = cos^2(theta) = 4 u1 (1 - u1) the chord length is
 * 2 cos(theta) / (q + V^2 sin^2(phi)), which never subtracts near-equal
 * quantities.
 */
inline Chord chord_from_uniforms(double u1, double u2)
{
    double const v = 2 * u1 - 1;
    double const q = 4 * u1 * (1 - u1);
    double const ct = std::sqrt(q);
    double const w = u2 - 0.5;
    double const cp = detail::cos_pi_half(w);
    double const sp = detail::sin_pi_half(w);
    double const r = 2 * ct / (q + v * v * (sp * sp));
    return {r, r * cp * v, v, ct, sp, cp};
}

//! Full bounce (angles included) from two uniform deviates
inline ReflectionDirection bounce_from_uniforms(double u1, double u2)
{
    Chord const c = chord_from_uniforms(u1, u2);
    ReflectionDirection d;
    d.theta = std::asin(c.sin_theta);
    d.phi = pi * (u2 - 0.5);
    d.r = c.r;
    d.x_step = c.x_step;
    d.sin_theta = c.sin_theta;
    d.cos_theta = c.cos_theta;
    d.sin_phi = c.sin_phi;
    d.cos_phi = c.cos_phi;
    return d;
}

//! Bounce geometry for given angles (used for forced-angle traces)
inline ReflectionDirection bounce_from_angles(double theta, double phi)
{
    ReflectionDirection d;
    double const st = std::sin(theta);
    double const ct = std::cos(theta);
    double const sp = std::sin(phi);
    double const cp = std::cos(phi);
    d.theta = theta;
    d.phi = phi;
    d.r = 2 * ct / (ct * ct + st * st * (sp * sp));
    d.x_step = d.r * cp * st;
    d.sin_theta = st;
    d.cos_theta = ct;
    d.sin_phi = sp;
    d.cos_phi = cp;
    return d;
}

template<class Engine>
inline Chord sample_chord_3d(Engine& rng)
{
    double const u1 = generate_open_unit(rng);
    double const u2 = generate_open_unit(rng);
    return chord_from_uniforms(u1, u2);
}

template<class Engine>
inline ReflectionDirection sample_bounce_3d(Engine& rng)
{
    double const u1 = generate_open_unit(rng);
    double const u2 = generate_open_unit(rng);
    return bounce_from_uniforms(u1, u2);
}

//---------------------------------------------------------------------------//
// STEPPERS
//---------------------------------------------------------------------------//
/*!
 * Axial step of the 2D strip.
 *
 * Steppers that expose \c uniforms_per_step and a static \c transform can be
 * run by the lane-batched walker; the call operator draws the same deviates
 * in the same order, so both paths give identical walks.
 */
struct Step2D
{
    static constexpr int uniforms_per_step = 1;
    static constexpr char const* name = "2d";

    static double transform(double u) { return step_2d_from_uniform(u); }

    template<class Engine>
    double operator()(Engine& rng) const
    {
        return transform(generate_open_unit(rng));
    }
};

//! Axial step of the 3D cylinder
struct Step3D
{
    static constexpr int uniforms_per_step = 2;
    static constexpr char const* name = "3d";

    static double transform(double u1, double u2)
    {
        return chord_from_uniforms(u1, u2).x_step;
    }

    template<class Engine>
    double operator()(Engine& rng) const
    {
        double const u1 = generate_open_unit(rng);
        double const u2 = generate_open_unit(rng);
        return transform(u1, u2);
    }
};

//---------------------------------------------------------------------------//
// REFERENCE CONSTANTS
//---------------------------------------------------------------------------//
//! E[X^2] for the 3D axial step
inline constexpr double step3d_second_moment = pi / 2;
//! E|X| for the 3D axial step
inline constexpr double step3d_abs_mean = 2 - 4 / pi;
//! E|X| for the 2D step
inline constexpr double step2d_abs_mean = 1;
//! Tail constant c in P(X > x) ~ c / x^2 for the 2D step
inline constexpr double step2d_tail_constant = 0.25;

//! sqrt(pi)/2, mean ascending ladder height of the 3D axial walk
inline double ladder_mean_3d()
{
    return std::sqrt(pi) / 2;
}

//---------------------------------------------------------------------------//
}  // namespace ltube
