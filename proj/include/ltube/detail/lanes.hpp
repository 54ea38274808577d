//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/detail/lanes.hpp
//! Lane-batched walk driver.
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <limits>

#include "../rng.hpp"

namespace ltube
{
namespace detail
{
//---------------------------------------------------------------------------//
/*!
 * Advance several independent walks in lockstep, one per lane.
 *
 * Every lane carries its own xoshiro state, partial sum, step count and two
 * stopping thresholds (a level and a step cap). The inner loop has no
 * branches, so the compiler can keep all lanes in vector registers. When any
 * lane hits a threshold the handler is called for that lane alone; it either
 * finishes the ray (and the lane is refilled from the queue) or moves the
 * thresholds and lets the walk continue.
 *
 * A lane evaluates exactly the same floating-point operations, in the same
 * order, as the scalar driver, so both produce identical walks.
 */
template<class Stepper, class Handler, int L = 8>
void drive_lanes(Handler& handler,
                 std::uint64_t begin,
                 std::uint64_t end,
                 std::uint64_t seed,
                 std::uint64_t stream_base)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::uint64_t never = std::numeric_limits<std::uint64_t>::max();

    alignas(64) std::uint64_t s0[L], s1[L], s2[L], s3[L];
    alignas(64) double pos[L], prev[L], thr[L];
    alignas(64) std::uint64_t nstep[L], cap[L];
    std::uint64_t ray[L];
    bool live[L];

    std::uint64_t next = begin;
    int n_live = 0;

    auto load = [&](int l) {
        while (next < end)
        {
            std::uint64_t const r = next++;
            double t = 0;
            std::uint64_t c = 0;
            if (!handler.start(r, t, c))
                continue;
            Xoshiro256pp rng{seed, stream_base + r};
            auto const& st = rng.state();
            s0[l] = st[0];
            s1[l] = st[1];
            s2[l] = st[2];
            s3[l] = st[3];
            pos[l] = 0;
            prev[l] = 0;
            thr[l] = t;
            cap[l] = c;
            nstep[l] = 0;
            ray[l] = r;
            live[l] = true;
            ++n_live;
            return;
        }
        pos[l] = 0;
        prev[l] = 0;
        thr[l] = inf;
        cap[l] = never;
        nstep[l] = 0;
        live[l] = false;
        if (s0[l] == 0 && s1[l] == 0 && s2[l] == 0 && s3[l] == 0)
            s0[l] = 1;
    };

    for (int l = 0; l < L; ++l)
    {
        s0[l] = s1[l] = s2[l] = s3[l] = 0;
        load(l);
    }

    auto draw = [](std::uint64_t& a0,
                   std::uint64_t& a1,
                   std::uint64_t& a2,
                   std::uint64_t& a3) {
        std::uint64_t const r = Xoshiro256pp::rotl(a0 + a3, 23) + a0;
        std::uint64_t const t = a1 << 17;
        a2 ^= a0;
        a3 ^= a1;
        a1 ^= a2;
        a0 ^= a3;
        a2 ^= t;
        a3 = Xoshiro256pp::rotl(a3, 45);
        return (static_cast<double>(static_cast<std::int64_t>(r >> 12)) + 0.5)
               * 0x1.0p-52;
    };

    while (n_live > 0)
    {
        int hit = 0;
        while (!hit)
        {
#pragma omp simd reduction(| : hit)
            for (int l = 0; l < L; ++l)
            {
                std::uint64_t a0 = s0[l], a1 = s1[l], a2 = s2[l], a3 = s3[l];
                double x;
                if constexpr (Stepper::uniforms_per_step == 1)
                {
                    double const u = draw(a0, a1, a2, a3);
                    x = Stepper::transform(u);
                }
                else
                {
                    double const u1 = draw(a0, a1, a2, a3);
                    double const u2 = draw(a0, a1, a2, a3);
                    x = Stepper::transform(u1, u2);
                }
                s0[l] = a0;
                s1[l] = a1;
                s2[l] = a2;
                s3[l] = a3;
                double const p = pos[l];
                double const q = p + x;
                prev[l] = p;
                pos[l] = q;
                std::uint64_t const n = nstep[l] + 1;
                nstep[l] = n;
                hit |= static_cast<int>(q > thr[l]) | static_cast<int>(n >= cap[l]);
            }
        }
        for (int l = 0; l < L; ++l)
        {
            if (!live[l] || !(pos[l] > thr[l] || nstep[l] >= cap[l]))
                continue;
            if (handler.event(ray[l], prev[l], pos[l], nstep[l], thr[l], cap[l]))
            {
                live[l] = false;
                --n_live;
                load(l);
            }
        }
    }
}

//---------------------------------------------------------------------------//
}  // namespace detail
}  // namespace ltube
