//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/detail/trig.hpp
//---------------------------------------------------------------------------//
#pragma once

namespace ltube
{
namespace detail
{
//---------------------------------------------------------------------------//
// Branch-free cos(pi w) and sin(pi w) for |w| <= 1/2.
//
// Plain Taylor polynomials in x = pi w, truncated where the remainder drops
// below 1e-19. Both the scalar and the lane-batched bounce samplers use them
// so the two paths agree bit for bit.
//---------------------------------------------------------------------------//
inline constexpr double pi_v = 3.14159265358979323846;

inline double cos_pi_half(double w)
{
    double const x = pi_v * w;
    double const x2 = x * x;
    double p = -1.0 / 1124000727777607680000.0;
    p = p * x2 + 1.0 / 2432902008176640000.0;
    p = p * x2 - 1.0 / 6402373705728000.0;
    p = p * x2 + 1.0 / 20922789888000.0;
    p = p * x2 - 1.0 / 87178291200.0;
    p = p * x2 + 1.0 / 479001600.0;
    p = p * x2 - 1.0 / 3628800.0;
    p = p * x2 + 1.0 / 40320.0;
    p = p * x2 - 1.0 / 720.0;
    p = p * x2 + 1.0 / 24.0;
    p = p * x2 - 0.5;
    return p * x2 + 1.0;
}

inline double sin_pi_half(double w)
{
    double const x = pi_v * w;
    double const x2 = x * x;
    double p = -1.0 / 25852016738884976640000.0;
    p = p * x2 + 1.0 / 51090942171709440000.0;
    p = p * x2 - 1.0 / 121645100408832000.0;
    p = p * x2 + 1.0 / 355687428096000.0;
    p = p * x2 - 1.0 / 1307674368000.0;
    p = p * x2 + 1.0 / 6227020800.0;
    p = p * x2 - 1.0 / 39916800.0;
    p = p * x2 + 1.0 / 362880.0;
    p = p * x2 - 1.0 / 5040.0;
    p = p * x2 + 1.0 / 120.0;
    p = p * x2 - 1.0 / 6.0;
    return x * (p * x2 + 1.0);
}

//---------------------------------------------------------------------------//
}  // namespace detail
}  // namespace ltube
