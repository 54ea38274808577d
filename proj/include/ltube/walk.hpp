//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/walk.hpp
//! First passage, ladder heights, renewal measures and occupation counts.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "detail/lanes.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "stats.hpp"

namespace ltube
{
//---------------------------------------------------------------------------//
// TYPES
//---------------------------------------------------------------------------//
/*!
 * Summary of one walk stopped at its first passage above a level.
 *
 * A censored record holds the last two partial sums reached before the step
 * cap; its overshoot and undershoot are zero and carry no meaning.
 */
struct FirstPassageRecord
{
    double level_s{0};
    std::uint64_t n_steps{0};
    double s_before{0};
    double s_after{0};
    double overshoot{0};
    double undershoot{0};
    bool parity_even{false};
    bool censored{false};
};

//! Ascending ladder structure of one walk
struct LadderSample
{
    std::vector<double> heights;
    std::vector<std::uint64_t> epochs;
    //! (undershoot, overshoot) of each ascent relative to the previous max
    std::vector<std::pair<double, double>> pairs;
    std::pair<double, double> first_pair{0, 0};
    std::uint64_t n_steps{0};
    bool censored{false};
};

/*!
 * Binned estimate of the ascending renewal measure on [0, window_max].
 *
 * \c mass holds the expected number of strict ladder heights H_k, k >= 1,
 * per bin. The k = 0 term (H_0 = 0) is a unit atom at the origin, kept in
 * \c atom_at_zero rather than in the first bin. Bins are half-open except the
 * last, which is closed at window_max.
 */
struct RenewalMeasureEstimate
{
    std::vector<double> bin_edges;
    std::vector<double> mass;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_paths{0};
    std::uint64_t n_censored{0};
    double atom_at_zero{1};

    double window_max() const { return bin_edges.back(); }

    //! Mass of ladder heights k >= 1 in [0, t], linear within a bin
    double cumulative(double t) const
    {
        double total = 0;
        for (std::size_t i = 0; i < mass.size(); ++i)
        {
            double const a = bin_edges[i], b = bin_edges[i + 1];
            if (t >= b)
                total += mass[i];
            else if (t > a)
                total += mass[i] * (t - a) / (b - a);
            else
                break;
        }
        return total;
    }
};

//! Visit counts of S_k - s to intervals for k < N_s
struct OccupationCount
{
    double level_s{0};
    std::vector<std::pair<double, double>> intervals;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_steps{0};
    bool censored{false};
};

//! Censoring tally kept by every ensemble run
struct CensoringAccount
{
    std::uint64_t n_total{0};
    std::uint64_t n_censored{0};

    double rate() const
    {
        return n_total ? static_cast<double>(n_censored)
                             / static_cast<double>(n_total)
                       : 0.0;
    }
};

//---------------------------------------------------------------------------//
// STEPPER TRAITS
//---------------------------------------------------------------------------//
//! Stepper that the lane-batched driver can run
template<class S>
concept BatchStepper = requires {
    { S::uniforms_per_step } -> std::convertible_to<int>;
};

//! Mirror image of a stepper, used for descending ladders
template<class S>
struct Negated
{
    static constexpr int uniforms_per_step = S::uniforms_per_step;

    template<class... U>
    static double transform(U... u)
    {
        return -S::transform(u...);
    }

    template<class Engine>
    double operator()(Engine& rng) const
    {
        return -S{}(rng);
    }
};

//! Default step cap: 50 s^2 for the 2D step, 20 s^2 otherwise
template<class Stepper>
inline std::uint64_t default_max_steps(double level)
{
    double const factor = std::is_same_v<Stepper, Step2D> ? 50.0 : 20.0;
    double const cap = std::max(factor * level * level, 1e4);
    return static_cast<std::uint64_t>(std::min(cap, 1e18));
}

//---------------------------------------------------------------------------//
// SCALAR DRIVER
//---------------------------------------------------------------------------//
namespace detail
{
template<class H>
concept Visiting = requires(H h, std::uint64_t r, double x) { h.visit(r, x); };

/*!
 * Run one ray with a caller-supplied engine.
 *
 * Mirrors the lane driver: the handler sees the ray when the partial sum
 * exceeds \c thr or the step count reaches \c cap. Visiting handlers also see
 * every partial sum S_0, S_1, ... before the step that follows it.
 */
template<class Stepper, class Engine, class Handler>
void drive_one(Stepper& stepper, Engine& rng, Handler& h, std::uint64_t ray)
{
    double thr = 0;
    std::uint64_t cap = 0;
    if (!h.start(ray, thr, cap))
        return;
    double pos = 0;
    std::uint64_t n = 0;
    for (;;)
    {
        if constexpr (Visiting<Handler>)
            h.visit(ray, pos);
        double const p = pos;
        pos = p + stepper(rng);
        ++n;
        if (pos > thr || n >= cap)
        {
            if (h.event(ray, p, pos, n, thr, cap))
                return;
        }
    }
}
}  // namespace detail

//---------------------------------------------------------------------------//
// HANDLERS
//---------------------------------------------------------------------------//
namespace detail
{
//! Stop at the first strict passage above a level
struct FirstPassageHandler
{
    double level;
    std::uint64_t max_steps;
    FirstPassageRecord* out;  //!< indexed by ray - base
    std::uint64_t base{0};

    bool start(std::uint64_t, double& thr, std::uint64_t& cap) const
    {
        thr = level;
        cap = max_steps;
        return true;
    }

    bool event(std::uint64_t ray,
               double prev,
               double pos,
               std::uint64_t n,
               double&,
               std::uint64_t&) const
    {
        FirstPassageRecord& rec = out[ray - base];
        rec.level_s = level;
        rec.n_steps = n;
        rec.s_before = prev;
        rec.s_after = pos;
        rec.parity_even = (n % 2 == 0);
        if (pos > level)
        {
            rec.overshoot = pos - level;
            rec.undershoot = level - prev;
            rec.censored = false;
        }
        else
        {
            rec.overshoot = 0;
            rec.undershoot = 0;
            rec.censored = true;
        }
        return true;
    }
};

//! Collect strict ascending ladders, with a step cap per ladder
struct LadderHandler
{
    std::uint64_t n_ladders;
    std::uint64_t max_steps;
    LadderSample* out;
    std::uint64_t base{0};

    bool start(std::uint64_t ray, double& thr, std::uint64_t& cap) const
    {
        auto& s = out[ray - base];
        s = {};
        s.heights.reserve(n_ladders);
        s.epochs.reserve(n_ladders);
        s.pairs.reserve(n_ladders);
        thr = 0;
        cap = max_steps;
        return true;
    }

    bool event(std::uint64_t ray,
               double prev,
               double pos,
               std::uint64_t n,
               double& thr,
               std::uint64_t& cap) const
    {
        auto& s = out[ray - base];
        s.n_steps = n;
        if (pos > thr)
        {
            s.heights.push_back(pos);
            s.epochs.push_back(n);
            s.pairs.emplace_back(thr - prev, pos - thr);
            if (s.pairs.size() == 1)
                s.first_pair = s.pairs.front();
            thr = pos;
            cap = n + max_steps;
            return s.heights.size() >= n_ladders;
        }
        s.censored = true;
        return true;
    }
};

/*!
 * Bin ladder heights of paths run until their maximum passes the window.
 *
 * Integer bin counts make the per-block histograms mergeable in any order.
 */
struct RenewalHandler
{
    double window;
    std::uint64_t max_steps;
    Histogram* hist;
    std::uint64_t n_censored{0};

    bool start(std::uint64_t, double& thr, std::uint64_t& cap) const
    {
        thr = 0;
        cap = max_steps;
        return true;
    }

    bool event(std::uint64_t,
               double,
               double pos,
               std::uint64_t,
               double& thr,
               std::uint64_t&)
    {
        if (pos > thr)
        {
            if (pos > window)
                return true;
            // Closed last bin: a height equal to the window edge counts
            hist->add(pos < window ? pos : std::nextafter(window, 0.0));
            thr = pos;
            return false;
        }
        ++n_censored;
        return true;
    }
};

//! Count visits of S_k - s to open intervals for k < N_s
struct OccupationHandler
{
    double level;
    std::uint64_t max_steps;
    std::vector<std::pair<double, double>> const* intervals;
    OccupationCount* out;
    std::uint64_t base{0};

    bool start(std::uint64_t ray, double& thr, std::uint64_t& cap) const
    {
        auto& o = out[ray - base];
        o.level_s = level;
        o.intervals = *intervals;
        o.counts.assign(intervals->size(), 0);
        thr = level;
        cap = max_steps;
        return true;
    }

    void visit(std::uint64_t ray, double pos) const
    {
        auto& o = out[ray - base];
        double const rel = pos - level;
        for (std::size_t i = 0; i < intervals->size(); ++i)
        {
            auto const& [x1, x2] = (*intervals)[i];
            if (rel > x1 && rel < x2)
                ++o.counts[i];
        }
    }

    bool event(std::uint64_t ray,
               double,
               double pos,
               std::uint64_t n,
               double&,
               std::uint64_t&) const
    {
        auto& o = out[ray - base];
        o.n_steps = n;
        o.censored = !(pos > level);
        return true;
    }
};

//! Run the rays [begin, end) with per-ray streams, batched when possible
template<class Stepper, class Handler>
void drive_rays(Stepper const& stepper,
                Handler& h,
                std::uint64_t begin,
                std::uint64_t end,
                std::uint64_t seed,
                std::uint64_t stream_base)
{
    if constexpr (BatchStepper<Stepper> && !Visiting<Handler>)
    {
        (void)stepper;
        drive_lanes<Stepper>(h, begin, end, seed, stream_base);
    }
    else
    {
        for (std::uint64_t r = begin; r < end; ++r)
        {
            Stepper s = stepper;
            Xoshiro256pp rng{seed, stream_base + r};
            drive_one(s, rng, h, r);
        }
    }
}
}  // namespace detail

//---------------------------------------------------------------------------//
// SINGLE-WALK OPERATIONS
//---------------------------------------------------------------------------//
/*!
 * Run S_n until it first exceeds \c level_s or \c max_steps steps are taken.
 */
template<class Stepper, class Engine>
FirstPassageRecord first_passage(Stepper&& stepper,
                                 double level_s,
                                 std::uint64_t max_steps,
                                 Engine& rng)
{
    expect(level_s > 0, "first_passage: level must be positive");
    expect(max_steps >= 1, "first_passage: max_steps must be >= 1");
    FirstPassageRecord rec;
    detail::FirstPassageHandler h{level_s, max_steps, &rec};
    detail::drive_one(stepper, rng, h, 0);
    return rec;
}

//! Extract \c n_ladders strict ascending ladders from one walk
template<class Stepper, class Engine>
LadderSample ladder_sample(Stepper&& stepper,
                           std::uint64_t n_ladders,
                           std::uint64_t max_steps,
                           Engine& rng)
{
    expect(n_ladders >= 1, "ladder_sample: need at least one ladder");
    expect(max_steps >= 1, "ladder_sample: max_steps must be >= 1");
    LadderSample s;
    detail::LadderHandler h{n_ladders, max_steps, &s};
    detail::drive_one(stepper, rng, h, 0);
    return s;
}

//! Count visits to \c intervals (relative to the level) before first passage
template<class Stepper, class Engine>
OccupationCount
occupation_counts(Stepper&& stepper,
                  double level_s,
                  std::vector<std::pair<double, double>> const& intervals,
                  std::uint64_t max_steps,
                  Engine& rng)
{
    expect(level_s > 0, "occupation_counts: level must be positive");
    for (auto const& [a, b] : intervals)
        expect(a < b && a >= -level_s && b <= 0,
               "occupation_counts: intervals must lie in [-s, 0]");
    OccupationCount o;
    detail::OccupationHandler h{level_s, max_steps, &intervals, &o};
    detail::drive_one(stepper, rng, h, 0);
    return o;
}

//---------------------------------------------------------------------------//
// ENSEMBLES
//---------------------------------------------------------------------------//
//! Parameters shared by all ensemble runs
struct EnsembleOptions
{
    std::uint64_t seed{1};
    std::uint64_t stream_base{0};  //!< ray i uses stream stream_base + i
    unsigned workers{1};  //!< 0 = one per hardware thread
    std::uint64_t block_size{1024};
};

//! First-passage records for rays 0..n_rays-1, in ray order
template<class Stepper>
std::vector<FirstPassageRecord>
first_passage_ensemble(Stepper const& stepper,
                       double level_s,
                       std::uint64_t n_rays,
                       std::uint64_t max_steps,
                       EnsembleOptions const& opt)
{
    expect(level_s > 0, "first_passage: level must be positive");
    std::vector<FirstPassageRecord> out(n_rays);
    map_blocks(n_rays,
               opt.block_size,
               opt.workers,
               [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
                   detail::FirstPassageHandler h{level_s, max_steps, out.data()};
                   detail::drive_rays(stepper, h, b, e, opt.seed,
                                      opt.stream_base);
                   return 0;
               });
    return out;
}

//! Ladder samples, one walk per ray
template<class Stepper>
std::vector<LadderSample> ladder_ensemble(Stepper const& stepper,
                                          std::uint64_t n_rays,
                                          std::uint64_t ladders_per_ray,
                                          std::uint64_t max_steps,
                                          EnsembleOptions const& opt)
{
    std::vector<LadderSample> out(n_rays);
    map_blocks(n_rays,
               std::max<std::uint64_t>(1, opt.block_size / 64),
               opt.workers,
               [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
                   detail::LadderHandler h{ladders_per_ray, max_steps,
                                           out.data()};
                   detail::drive_rays(stepper, h, b, e, opt.seed,
                                      opt.stream_base);
                   return 0;
               });
    return out;
}

/*!
 * Estimate U+ on [0, window_max] from \c n_paths independent walks.
 *
 * Each path runs until its maximum exceeds the window or it has taken
 * \c max_steps steps. A censored path keeps the heights it reached and stays
 * in the denominator; the count is reported in \c n_censored.
 */
template<class Stepper>
RenewalMeasureEstimate renewal_estimate(Stepper const& stepper,
                                        double window_max,
                                        std::size_t n_bins,
                                        std::uint64_t n_paths,
                                        std::uint64_t max_steps,
                                        EnsembleOptions const& opt)
{
    expect(window_max > 0, "renewal_estimate: window must be positive");
    expect(n_bins >= 1 && n_paths >= 1, "renewal_estimate: empty estimate");
    auto blank = Histogram::uniform(0, window_max, n_bins);
    struct Part
    {
        Histogram hist;
        std::uint64_t censored{0};
    };
    auto parts = map_blocks(
        n_paths,
        std::max<std::uint64_t>(1, opt.block_size / 16),
        opt.workers,
        [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
            Part p{blank, 0};
            detail::RenewalHandler h{window_max, max_steps, &p.hist};
            detail::drive_rays(stepper, h, b, e, opt.seed, opt.stream_base);
            p.censored = h.n_censored;
            return p;
        });

    RenewalMeasureEstimate est;
    Histogram total = blank;
    for (auto const& p : parts)
    {
        total.merge(p.hist);
        est.n_censored += p.censored;
    }
    est.bin_edges = total.edges();
    est.counts = total.counts();
    est.n_paths = n_paths;
    est.mass.resize(est.counts.size());
    for (std::size_t i = 0; i < est.counts.size(); ++i)
        est.mass[i] = static_cast<double>(est.counts[i])
                      / static_cast<double>(n_paths);
    return est;
}

//! Occupation counts for rays 0..n_rays-1
template<class Stepper>
std::vector<OccupationCount>
occupation_ensemble(Stepper const& stepper,
                    double level_s,
                    std::vector<std::pair<double, double>> const& intervals,
                    std::uint64_t n_rays,
                    std::uint64_t max_steps,
                    EnsembleOptions const& opt)
{
    for (auto const& [a, b] : intervals)
        expect(a < b && a >= -level_s && b <= 0,
               "occupation_counts: intervals must lie in [-s, 0]");
    std::vector<OccupationCount> out(n_rays);
    map_blocks(n_rays,
               std::max<std::uint64_t>(1, opt.block_size / 16),
               opt.workers,
               [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
                   detail::OccupationHandler h{level_s, max_steps, &intervals,
                                               out.data()};
                   detail::drive_rays(stepper, h, b, e, opt.seed,
                                      opt.stream_base);
                   return 0;
               });
    return out;
}

//! Tally censoring over any records with a \c censored flag
template<class Records>
CensoringAccount count_censored(Records const& recs)
{
    CensoringAccount acc;
    acc.n_total = recs.size();
    for (auto const& r : recs)
        acc.n_censored += r.censored ? 1 : 0;
    return acc;
}

//---------------------------------------------------------------------------//
}  // namespace ltube
