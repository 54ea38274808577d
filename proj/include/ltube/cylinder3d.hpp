//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/cylinder3d.hpp
//! Rays in the semi-infinite unit cylinder x <= 0.
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "stats.hpp"
#include "walk.hpp"

namespace ltube
{
//---------------------------------------------------------------------------//
//! Reflection point: axial coordinate and a point on the unit circle
struct CylinderState
{
    double x{0};
    double y{0};
    double z{-1};
};

//! Steps between renormalizations of (y, z)
inline constexpr std::uint64_t renormalize_period = 1024;

/*!
 * Move to the next reflection point along a chord.
 *
 * At (y, z) the inward normal is -(y, z) and the tangent is (-z, y); the
 * chord's cross-section displacement is R (cos(theta) n + sin(theta)
 * sin(phi) t).
 */
template<class G>
inline CylinderState apply_bounce(CylinderState const& p, G const& g)
{
    double const a = g.sin_theta * g.sin_phi;
    double const c = g.cos_theta;
    CylinderState q;
    q.x = p.x + g.x_step;
    q.y = p.y + g.r * (-c * p.y - a * p.z);
    q.z = p.z + g.r * (a * p.y - c * p.z);
    return q;
}

inline void renormalize(CylinderState& p)
{
    double const h = std::hypot(p.y, p.z);
    p.y /= h;
    p.z /= h;
}

//---------------------------------------------------------------------------//
/*!
 * Exit of a ray through the disc x = 0.
 */
struct ExitRecord3D
{
    double level_s{0};
    std::array<double, 2> exit_point{0, 0};
    std::array<double, 3> exit_dir{1, 0, 0};
    std::array<double, 2> last_contact{0, -1};
    std::array<double, 2> next_contact{0, -1};
    FirstPassageRecord fp;
};

//! Lambertian chord source for \c trace_exit_3d
struct LambertianChords
{
    template<class Engine>
    Chord operator()(Engine& rng) const
    {
        return sample_chord_3d(rng);
    }
};

/*!
 * Trace one ray from (-s, 0, -1) until the axial walk first exceeds s.
 *
 * \c source draws one bounce per call; anything with the chord fields of
 * \c Chord works, so forced-angle sequences can be injected in tests. The
 * axial walk is identical to the one produced by \c Step3D with the same
 * engine.
 */
template<class Source, class Engine>
ExitRecord3D trace_exit_3d(Source&& source,
                           double level_s,
                           std::uint64_t max_steps,
                           Engine& rng)
{
    expect(level_s > 0, "trace_exit_3d: level must be positive");
    ExitRecord3D e;
    e.level_s = level_s;
    CylinderState p{0, 0, -1};
    std::uint64_t n = 0;
    for (;;)
    {
        auto const g = source(rng);
        CylinderState q = apply_bounce(p, g);
        ++n;
        if (n % renormalize_period == 0)
            renormalize(q);
        bool const crossed = q.x > level_s;
        if (crossed || n >= max_steps)
        {
            detail::FirstPassageHandler h{level_s, max_steps, &e.fp};
            double thr = level_s;
            std::uint64_t cap = max_steps;
            h.event(0, p.x, q.x, n, thr, cap);
            e.last_contact = {p.y, p.z};
            e.next_contact = {q.y, q.z};
            if (crossed)
            {
                double const f = (level_s - p.x) / g.x_step;
                e.exit_point = {p.y + f * (q.y - p.y), p.z + f * (q.z - p.z)};
                double const dx = g.x_step, dy = q.y - p.y, dz = q.z - p.z;
                double const norm = std::sqrt(dx * dx + dy * dy + dz * dz);
                e.exit_dir = {dx / norm, dy / norm, dz / norm};
            }
            return e;
        }
        p = q;
    }
}

template<class Engine>
ExitRecord3D trace_exit_3d(double level_s, std::uint64_t max_steps, Engine& rng)
{
    return trace_exit_3d(LambertianChords{}, level_s, max_steps, rng);
}

//! Visit reflection points k = 0..n_steps of an unbounded walk
template<class Engine, class Visit>
void walk_bounces_3d(std::uint64_t n_steps,
                     Engine& rng,
                     Visit&& visit,
                     CylinderState start = {})
{
    CylinderState p = start;
    visit(std::uint64_t{0}, p);
    for (std::uint64_t k = 1; k <= n_steps; ++k)
    {
        p = apply_bounce(p, sample_chord_3d(rng));
        if (k % renormalize_period == 0)
            renormalize(p);
        visit(k, p);
    }
}

//! Exit records for rays 0..n_rays-1 (scalar tracing, parallel over blocks)
inline std::vector<ExitRecord3D> exit_ensemble_3d(double level_s,
                                                  std::uint64_t n_rays,
                                                  std::uint64_t max_steps,
                                                  EnsembleOptions const& opt)
{
    std::vector<ExitRecord3D> out(n_rays);
    map_blocks(n_rays,
               std::max<std::uint64_t>(1, opt.block_size / 16),
               opt.workers,
               [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
                   for (std::uint64_t r = b; r < e; ++r)
                   {
                       Xoshiro256pp rng{opt.seed, opt.stream_base + r};
                       out[r] = trace_exit_3d(level_s, max_steps, rng);
                   }
                   return 0;
               });
    return out;
}

//! Polar angle of the exit point, in (-pi, pi]
inline double exit_angle(ExitRecord3D const& e)
{
    return std::atan2(e.exit_point[1], e.exit_point[0]);
}

//! Exit-point radius
inline double exit_radius(ExitRecord3D const& e)
{
    return std::hypot(e.exit_point[0], e.exit_point[1]);
}

//! KS test of exit angles against uniform on (-pi, pi]
inline double rotational_invariance_pvalue(std::vector<ExitRecord3D> const& recs)
{
    std::vector<double> ang;
    for (auto const& r : recs)
        if (!r.fp.censored)
            ang.push_back((exit_angle(r) + pi) / (2 * pi));
    EmpiricalCDF ecdf{std::move(ang)};
    return ks_pvalue(ks_distance(ecdf, uniform01_cdf), ecdf.size());
}

//---------------------------------------------------------------------------//
// GAMMA FUNCTIONAL
//---------------------------------------------------------------------------//
//! 2 pi^{-1/2} - 4 pi^{-3/2}, the slope of Gamma at 0
inline double gamma_slope_at_zero()
{
    return 2 / std::sqrt(pi) - 4 / std::pow(pi, 1.5);
}

//! Linear upper bound a(r) on the disc exit probability
inline double disc_linear_bound(double r)
{
    double const c = 1 / std::sqrt(pi) - 2 / std::pow(pi, 1.5);
    return (0.5 + c) * r + (0.5 - c);
}

/*!
 * Two estimates of Gamma on a grid of t.
 *
 * \c direct is P(U/(U+O) <= t) at finite s; \c formula is the plug-in ratio
 * E[(t(U0+O0) - U0)^+] / E[O0] from ladder pairs. \c atom_direct is the
 * finite-s mass P(U_s = 0).
 */
struct GammaEstimate
{
    std::vector<double> t_grid;
    std::vector<double> direct;
    std::vector<double> formula;
    std::vector<double> se_direct;
    std::vector<double> se_formula;
    double atom_direct{0};
    std::uint64_t n_direct{0};
    std::uint64_t n_formula{0};
};

//! Empirical undershoot-ratio law with binomial standard errors
inline void gamma_direct(std::vector<FirstPassageRecord> const& fps,
                         GammaEstimate& est)
{
    for (double t : est.t_grid)
        expect(t >= 0 && t <= 1, "gamma_direct: t outside [0, 1]");
    std::vector<std::uint64_t> hits(est.t_grid.size(), 0);
    std::uint64_t n = 0, atom = 0;
    for (auto const& r : fps)
    {
        if (r.censored)
            continue;
        ++n;
        atom += (r.undershoot == 0) ? 1 : 0;
        double const ratio = r.undershoot / (r.undershoot + r.overshoot);
        for (std::size_t i = 0; i < est.t_grid.size(); ++i)
            hits[i] += (ratio <= est.t_grid[i]) ? 1 : 0;
    }
    expect(n > 0, "gamma_direct: every ray censored");
    est.n_direct = n;
    est.direct.resize(hits.size());
    est.se_direct.resize(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i)
    {
        auto ps = proportion_summary(hits[i], n);
        est.direct[i] = ps.estimate;
        est.se_direct[i] = ps.std_error;
    }
    est.atom_direct = static_cast<double>(atom) / static_cast<double>(n);
}

//! Plug-in Gamma from (U0, O0) pairs with delta-method standard errors
inline void gamma_formula(std::vector<std::pair<double, double>> const& pairs,
                          GammaEstimate& est)
{
    for (double t : est.t_grid)
        expect(t >= 0 && t <= 1, "gamma_formula: t outside [0, 1]");
    expect(!pairs.empty(), "gamma_formula: no ladder pairs");
    std::vector<double> den(pairs.size()), num(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        den[i] = pairs[i].second;
    est.n_formula = pairs.size();
    est.formula.resize(est.t_grid.size());
    est.se_formula.resize(est.t_grid.size());
    for (std::size_t k = 0; k < est.t_grid.size(); ++k)
    {
        double const t = est.t_grid[k];
        for (std::size_t i = 0; i < pairs.size(); ++i)
        {
            auto const [u, o] = pairs[i];
            num[i] = (t == 1) ? o : std::max(0.0, t * (u + o) - u);
        }
        auto cs = ratio_estimator_ci(num, den, 0.95, 0);
        est.formula[k] = cs.estimate;
        est.se_formula[k] = cs.std_error;
    }
}

//! Ladder (undershoot, overshoot) pairs from \c n_rays walks
template<class Stepper>
std::vector<std::pair<double, double>>
ladder_pairs(Stepper const& stepper,
             std::uint64_t n_rays,
             std::uint64_t ladders_per_ray,
             std::uint64_t max_steps,
             EnsembleOptions const& opt,
             CensoringAccount* account = nullptr)
{
    auto samples = ladder_ensemble(stepper, n_rays, ladders_per_ray,
                                   max_steps, opt);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n_rays * ladders_per_ray);
    CensoringAccount acc;
    for (auto const& s : samples)
    {
        // A censored walk loses the ladder it was on, not the later ones
        acc.n_total += s.pairs.size() + (s.censored ? 1 : 0);
        acc.n_censored += s.censored ? 1 : 0;
        pairs.insert(pairs.end(), s.pairs.begin(), s.pairs.end());
    }
    if (account)
        *account = acc;
    return pairs;
}

//! Empirical P(|Y_s| < r) on a radius grid
struct DiscExitLaw
{
    std::vector<double> r_grid;
    std::vector<double> prob;
    std::vector<double> se;
    std::uint64_t n{0};
};

inline DiscExitLaw disc_exit_law(std::vector<ExitRecord3D> const& recs,
                                 std::vector<double> const& r_grid)
{
    for (double r : r_grid)
        expect(r > 0 && r <= 1, "disc_exit_law: r outside (0, 1]");
    DiscExitLaw law;
    law.r_grid = r_grid;
    std::vector<std::uint64_t> hits(r_grid.size(), 0);
    for (auto const& e : recs)
    {
        if (e.fp.censored)
            continue;
        ++law.n;
        double const rad = exit_radius(e);
        for (std::size_t i = 0; i < r_grid.size(); ++i)
            hits[i] += (rad < r_grid[i]) ? 1 : 0;
    }
    expect(law.n > 0, "disc_exit_law: every ray censored");
    for (auto h : hits)
    {
        auto ps = proportion_summary(h, law.n);
        law.prob.push_back(ps.estimate);
        law.se.push_back(ps.std_error);
    }
    return law;
}

//! Linear interpolation of tabulated Gamma values
inline double interpolate(std::vector<double> const& x,
                          std::vector<double> const& y,
                          double t)
{
    expect(x.size() == y.size() && x.size() >= 2, "interpolate: bad table");
    if (t <= x.front())
        return y.front();
    if (t >= x.back())
        return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t const i = static_cast<std::size_t>(it - x.begin()) - 1;
    double const w = (t - x[i]) / (x[i + 1] - x[i]);
    return y[i] + w * (y[i + 1] - y[i]);
}

//---------------------------------------------------------------------------//
// BRIGHTNESS
//---------------------------------------------------------------------------//
//! Visit kernel: limiting hitting density of a small central disc per visit
inline double brightness_kernel(double level_s, double a)
{
    return 1 / (4 * pi * level_s * level_s * a * a * a);
}

/*!
 * Normalized brightness of one annulus.
 *
 * \c occupation[i] is the mean number of reflection points per ray with
 * a = (s - S_k)/s in bin i, before first passage. \c estimate sums each bin's
 * occupation against the visit kernel at the bin's geometric centre.
 */
struct BrightnessEstimate
{
    double r1{0};
    double r2{0};
    std::vector<double> a_edges;
    std::vector<double> occupation;
    std::vector<std::uint64_t> paths_visiting;
    double estimate{0};
    double std_error{0};
    bool unreliable_tail{false};
    std::uint64_t n_paths{0};
    std::uint64_t n_censored{0};
};

//! (r2 - r1) / (2 pi^2)
inline double brightness_constant(double r1, double r2)
{
    return (r2 - r1) / (2 * pi * pi);
}

/*!
 * Integrate the visit kernel against an occupation density on the 64-bin
 * log grid over a in (1/r2, 1/r1), with 15-point Gauss-Kronrod per bin.
 */
inline double brightness_from_density(double r1,
                                      double r2,
                                      std::function<double(double)> const& density,
                                      std::size_t n_bins = 64)
{
    expect(r1 > 0 && r1 <= r2 && r2 < 1,
           "brightness_from_density: need 0 < r1 <= r2 < 1");
    if (r1 == r2)
        return 0;
    auto h = Histogram::log_spaced(1 / r2, 1 / r1, n_bins);
    auto const& e = h.edges();
    double total = 0;
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
    {
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            [&](double a) { return density(a) / (4 * pi * a * a * a); },
            e[i], e[i + 1], 0, 0);
    }
    return total;
}


namespace detail
{
struct BrightnessHandler
{
    double level;
    std::uint64_t max_steps;
    std::vector<Histogram> const* blank;
    // per ray output
    std::vector<std::vector<std::uint64_t>>* counts;  //!< [ray][annulus*bins]
    std::vector<std::uint8_t>* censored;
    std::uint64_t base{0};

    bool start(std::uint64_t, double& thr, std::uint64_t& cap) const
    {
        thr = level;
        cap = max_steps;
        return true;
    }

    void visit(std::uint64_t ray, double pos) const
    {
        double const a = (level - pos) / level;
        auto& c = (*counts)[ray - base];
        std::size_t offset = 0;
        for (auto const& h : *blank)
        {
            auto const i = h.find(a);
            if (i >= 0 && static_cast<std::size_t>(i) < h.size())
                ++c[offset + static_cast<std::size_t>(i)];
            offset += h.size();
        }
    }

    bool event(std::uint64_t ray,
               double,
               double pos,
               std::uint64_t,
               double&,
               std::uint64_t&) const
    {
        (*censored)[ray - base] = !(pos > level);
        return true;
    }
};
}  // namespace detail

/*!
 * Semi-analytic brightness: sampled occupation times the analytic kernel.
 *
 * The tail is flagged unreliable when fewer than \c min_tail_paths rays
 * visit the outermost bin (a near 1/r1).
 */
inline std::vector<BrightnessEstimate>
brightness_profile(double level_s,
                   std::vector<std::pair<double, double>> const& annuli,
                   std::uint64_t n_rays,
                   std::uint64_t max_steps,
                   EnsembleOptions const& opt,
                   std::size_t n_bins = 64,
                   std::uint64_t min_tail_paths = 100)
{
    expect(level_s > 0 && n_rays > 0, "brightness_profile: bad arguments");
    std::vector<Histogram> blank;
    for (auto const& [r1, r2] : annuli)
    {
        expect(r1 > 0 && r1 <= r2 && r2 < 1,
               "brightness_profile: need 0 < r1 <= r2 < 1");
        if (r1 < r2)
            blank.push_back(Histogram::log_spaced(1 / r2, 1 / r1, n_bins));
        else
            blank.push_back(Histogram::uniform(1 / r1, 1 / r1 + 1, 1));
    }
    std::size_t total_bins = 0;
    for (auto const& h : blank)
        total_bins += h.size();

    std::vector<std::vector<std::uint64_t>> counts(
        n_rays, std::vector<std::uint64_t>(total_bins, 0));
    std::vector<std::uint8_t> censored(n_rays, 0);
    map_blocks(n_rays,
               std::max<std::uint64_t>(1, opt.block_size / 16),
               opt.workers,
               [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
                   detail::BrightnessHandler h{level_s, max_steps, &blank,
                                               &counts, &censored};
                   detail::drive_rays(Step3D{}, h, b, e, opt.seed,
                                      opt.stream_base);
                   return 0;
               });

    std::vector<BrightnessEstimate> out;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < annuli.size(); ++k)
    {
        auto const& h = blank[k];
        BrightnessEstimate est;
        est.r1 = annuli[k].first;
        est.r2 = annuli[k].second;
        est.n_paths = n_rays;
        for (auto c : censored)
            est.n_censored += c;
        if (est.r1 == est.r2)
        {
            out.push_back(est);
            offset += h.size();
            continue;
        }
        est.a_edges = h.edges();
        std::vector<double> weight(h.size());
        for (std::size_t i = 0; i < h.size(); ++i)
        {
            double const centre = std::sqrt(est.a_edges[i]
                                            * est.a_edges[i + 1]);
            weight[i] = brightness_kernel(level_s, centre);
        }
        std::vector<double> per_ray(n_rays);
        est.paths_visiting.assign(h.size(), 0);
        std::vector<double> bin_sum(h.size(), 0.0);
        for (std::size_t r = 0; r < n_rays; ++r)
        {
            double acc = 0;
            for (std::size_t i = 0; i < h.size(); ++i)
            {
                auto const c = counts[r][offset + i];
                acc += static_cast<double>(c) * weight[i];
                est.paths_visiting[i] += c ? 1 : 0;
                bin_sum[i] += static_cast<double>(c);
            }
            per_ray[r] = acc;
        }
        est.occupation.resize(h.size());
        for (std::size_t i = 0; i < h.size(); ++i)
            est.occupation[i] = bin_sum[i] / static_cast<double>(n_rays);
        auto ms = mean_summary(per_ray);
        est.estimate = ms.estimate;
        est.std_error = ms.std_error;
        est.unreliable_tail = est.paths_visiting.back() < min_tail_paths;
        out.push_back(std::move(est));
        offset += h.size();
    }
    return out;
}

//---------------------------------------------------------------------------//
}  // namespace ltube
