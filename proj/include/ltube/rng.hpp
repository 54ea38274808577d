//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/rng.hpp
//! Counter-seeded xoshiro256++ streams.
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ltube
{
//---------------------------------------------------------------------------//
/*!
 * SplitMix64 mixer, used only to expand a (seed, stream) pair into state.
 */
class SplitMix64
{
  public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed) : state_{seed} {}

    constexpr result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

//---------------------------------------------------------------------------//
/*!
 * xoshiro256++ generator.
 *
 * Each ray owns one of these, seeded from \c (seed, stream_id), so the draws
 * seen by a ray never depend on scheduling.
 */
class Xoshiro256pp
{
  public:
    using result_type = std::uint64_t;
    using State = std::array<std::uint64_t, 4>;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    //! Seed a stream; distinct stream ids give decorrelated states
    constexpr Xoshiro256pp(std::uint64_t seed, std::uint64_t stream_id)
    {
        SplitMix64 mix{seed ^ 0x6a09e667f3bcc909ull};
        std::uint64_t key = mix() ^ stream_id;
        SplitMix64 expand{SplitMix64{key}() + stream_id};
        for (auto& word : s_)
        {
            word = expand();
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0)
        {
            s_[0] = 1;
        }
    }

    constexpr explicit Xoshiro256pp(State const& s) : s_{s} {}

    constexpr result_type operator()()
    {
        std::uint64_t const result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t const t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    constexpr State const& state() const { return s_; }

    static constexpr std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }

  private:
    State s_{};
};

//---------------------------------------------------------------------------//
/*!
 * Map 64 random bits to the open interval (0, 1).
 *
 * The top 52 bits select a cell of width 2^-52 and the result is the cell
 * midpoint, so 0 and 1 can never be produced and the set of outputs is
 * symmetric under u -> 1 - u.
 */
constexpr double bits_to_open_unit(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

//! Draw U ~ uniform(0, 1), never touching either endpoint
template<class Engine>
inline double generate_open_unit(Engine& rng)
{
    return bits_to_open_unit(rng());
}

//---------------------------------------------------------------------------//
}  // namespace ltube
