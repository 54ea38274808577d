//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/cli/run.hpp
//! Experiment runner: CSV outputs plus a JSON manifest per run.
//---------------------------------------------------------------------------//
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../cylinder3d.hpp"
#include "../parallel.hpp"
#include "../sampling.hpp"
#include "../stats.hpp"
#include "../strip2d.hpp"
#include "../walk.hpp"
#include "../wienerhopf.hpp"
#include "config.hpp"
#include "output.hpp"

#ifndef LTUBE_VERSION
#    define LTUBE_VERSION "0.1.0"
#endif

namespace ltube::cli
{
//---------------------------------------------------------------------------//
inline constexpr char const* version = LTUBE_VERSION;
inline constexpr char const* manifest_name = "manifest.json";
//! Runs with a larger censored fraction are reported as partial
inline constexpr double partial_censoring_limit = 0.005;

struct RunResult
{
    fs::path dir;
    Json manifest;
    bool partial{false};
};

namespace detail
{
//---------------------------------------------------------------------------//
//! File-name tag for a level: 100 -> "100", 2.5 -> "2p5"
inline std::string level_tag(double s)
{
    if (s == std::floor(s) && s < 1e15)
        return std::to_string(static_cast<long long>(s));
    std::string t = format_double(s);
    for (auto& ch : t)
        if (ch == '.')
            ch = 'p';
    return t;
}

inline double pearson(std::vector<double> const& x, std::vector<double> const& y)
{
    if (x.size() < 2)
        return 0;
    double const mx = mean(x), my = mean(y);
    std::vector<double> xy(x.size()), xx(x.size()), yy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        xy[i] = (x[i] - mx) * (y[i] - my);
        xx[i] = (x[i] - mx) * (x[i] - mx);
        yy[i] = (y[i] - my) * (y[i] - my);
    }
    double const den = std::sqrt(pairwise_sum(xx) * pairwise_sum(yy));
    return den > 0 ? pairwise_sum(xy) / den : 0.0;
}

template<class F>
decltype(auto) with_stepper(std::string const& name, F&& f)
{
    if (name == "3d")
        return f(Step3D{});
    return f(Step2D{});
}

//---------------------------------------------------------------------------//
/*!
 * State shared by the experiment bodies: output directory, stream layout,
 * censoring tallies and the metrics block of the manifest.
 */
class Run
{
  public:
    Run(ExperimentConfig const& cfg, fs::path dir, std::ostream* log)
        : cfg_{cfg}, dir_{std::move(dir)}, log_{log}
    {
    }

    ExperimentConfig const& cfg() const { return cfg_; }
    Json& metrics() { return metrics_; }
    Json const& streams() const { return streams_; }
    Json const& censoring() const { return censoring_; }
    std::vector<fs::path> const& outputs() const { return outputs_; }
    double worst_censoring() const { return worst_; }

    //! Options for one purpose and level; stream bases never overlap
    EnsembleOptions
    options(std::string const& purpose, std::uint64_t tag, std::size_t level)
    {
        EnsembleOptions opt;
        opt.seed = cfg_.seed;
        opt.stream_base = (tag << 56) | (std::uint64_t(level) << 40);
        opt.workers = cfg_.workers;
        opt.block_size = cfg_.block_size;
        streams_.push_back({{"purpose", purpose},
                            {"level_index", level},
                            {"stream_base", opt.stream_base}});
        return opt;
    }

    CsvWriter csv(std::string const& name, std::vector<std::string> const& cols)
    {
        outputs_.push_back(dir_ / name);
        return CsvWriter{dir_ / name, cols};
    }

    void censor(std::string const& label, double s, CensoringAccount const& acc)
    {
        censoring_.push_back({{"label", label},
                              {"s", s},
                              {"n_total", acc.n_total},
                              {"n_censored", acc.n_censored},
                              {"rate", acc.rate()}});
        worst_ = std::max(worst_, acc.rate());
        if (acc.rate() > partial_censoring_limit)
            note(label + ": " + std::to_string(acc.n_censored) + " of "
                 + std::to_string(acc.n_total) + " censored");
    }

    void note(std::string const& msg) const
    {
        if (log_)
            *log_ << cfg_.experiment << ": " << msg << '\n';
    }

    std::uint64_t cap(std::uint64_t fallback) const
    {
        return cfg_.max_steps ? cfg_.max_steps : fallback;
    }

  private:
    ExperimentConfig const& cfg_;
    fs::path dir_;
    std::ostream* log_;
    Json metrics_ = Json::object();
    Json streams_ = Json::array();
    Json censoring_ = Json::array();
    std::vector<fs::path> outputs_;
    double worst_{0};
};

// Stream purposes
inline constexpr std::uint64_t stream_rays = 0;
inline constexpr std::uint64_t stream_sampler = 1;
inline constexpr std::uint64_t stream_ladders = 2;
inline constexpr std::uint64_t stream_plus = 3;
inline constexpr std::uint64_t stream_minus = 4;
inline constexpr std::uint64_t stream_trajectory = 5;

//! Per-ladder step cap when none is configured
inline constexpr std::uint64_t default_ladder_cap = 1000000;
inline constexpr std::uint64_t ladders_per_ray = 100;

//---------------------------------------------------------------------------//
// SAMPLER CHECKS
//---------------------------------------------------------------------------//
//! Moments of the 3D axial step against E X = 0, E X^2 = pi/2, E|X| = 2 - 4/pi
inline Json sampler_check_3d(Run& run)
{
    auto const n = run.cfg().sampler_draws;
    auto opt = run.options("sampler", stream_sampler, 0);
    constexpr std::uint64_t block = 1 << 16;
    struct Sums
    {
        double s[4]{0, 0, 0, 0};  // x, x^2, |x|, x^4
    };
    auto parts = map_blocks(
        n, block, opt.workers, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
            Xoshiro256pp rng{opt.seed, opt.stream_base + b};
            Sums out;
            for (std::uint64_t i = lo; i < hi; ++i)
            {
                double const x = Step3D{}(rng);
                out.s[0] += x;
                out.s[1] += x * x;
                out.s[2] += std::abs(x);
                out.s[3] += x * x * x * x;
            }
            return out;
        });
    double tot[4] = {0, 0, 0, 0};
    for (int k = 0; k < 4; ++k)
    {
        std::vector<double> v(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i)
            v[i] = parts[i].s[k];
        tot[k] = pairwise_sum(v);
    }
    double const nn = static_cast<double>(n);
    double const m1 = tot[0] / nn, m2 = tot[1] / nn, ma = tot[2] / nn,
                 m4 = tot[3] / nn;
    double const se1 = std::sqrt(std::max(0.0, m2 - m1 * m1) / nn);
    double const se2 = std::sqrt(std::max(0.0, m4 - m2 * m2) / nn);
    double const sea = std::sqrt(std::max(0.0, m2 - ma * ma) / nn);

    auto w = run.csv("sampler.csv",
                     {"quantity", "estimate", "reference", "std_error", "z"});
    Json rows = Json::array();
    auto add = [&](char const* q, double est, double ref, double se) {
        double const z = se > 0 ? (est - ref) / se : 0.0;
        w.row({std::string(q), est, ref, se, z});
        rows.push_back({{"quantity", q},
                        {"estimate", est},
                        {"reference", ref},
                        {"std_error", se},
                        {"z", z}});
    };
    add("mean", m1, 0.0, se1);
    add("mean_square", m2, step3d_second_moment, se2);
    add("mean_abs", ma, step3d_abs_mean, sea);
    return {{"n_draws", n}, {"moments", rows}};
}

//! KS distance of 2D steps against the closed-form CDF
inline Json sampler_check_2d(Run& run)
{
    auto const n = run.cfg().sampler_draws;
    auto opt = run.options("sampler", stream_sampler, 0);
    constexpr std::uint64_t block = 1 << 16;
    std::vector<double> x(n);
    map_blocks(n, block, opt.workers,
               [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
                   Xoshiro256pp rng{opt.seed, opt.stream_base + b};
                   for (std::uint64_t i = lo; i < hi; ++i)
                       x[i] = Step2D{}(rng);
                   return 0;
               });
    EmpiricalCDF ecdf{std::move(x)};
    double const d = ks_distance(ecdf, step_cdf_2d);
    double const crit = ks_critical(n, 0.01);
    auto w = run.csv("sampler.csv",
                     {"n_draws", "ks_distance", "ks_critical_1pct", "p_value"});
    double const p = ks_pvalue(d, n);
    w.row({n, d, crit, p});
    return {{"n_draws", n},
            {"ks_distance", d},
            {"ks_critical_1pct", crit},
            {"p_value", p}};
}

//---------------------------------------------------------------------------//
// EXPERIMENTS
//---------------------------------------------------------------------------//
inline void run_simulate2d(Run& run)
{
    auto const& c = run.cfg();
    Json levels = Json::array();
    auto u_csv = run.csv("u_law.csv", {"s", "t", "u_hat", "t_squared", "n"});
    auto j_csv = run.csv("joint_law.csv",
                         {"s", "t", "v", "class", "asym", "scaling"});
    auto l_csv = run.csv("lambda_hist.csv",
                         {"s", "lambda_lo", "lambda_hi", "empirical",
                          "heuristic"});
    auto s_csv = run.csv("summary.csv",
                         {"s", "n_rays", "n_censored", "ks_y",
                          "ks_scaled_undershoot", "ks_scaled_overshoot",
                          "corr_scaled", "p_even", "p_abs_lambda_gt_0.1",
                          "median_undershoot"});
    std::vector<double> const lam_edges = [] {
        std::vector<double> e(41);
        for (int i = 0; i <= 40; ++i)
            e[i] = -pi / 2 + pi * i / 40.0;
        return e;
    }();

    for (std::size_t li = 0; li < c.s_values.size(); ++li)
    {
        double const s = c.s_values[li];
        run.note("level " + format_double(s));
        auto opt = run.options("rays", stream_rays, li);
        auto recs = exit_ensemble_2d(s, c.n_rays,
                                     run.cap(default_max_steps<Step2D>(s)),
                                     opt);
        std::vector<FirstPassageRecord> fps(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i)
            fps[i] = recs[i].fp;
        auto acc = count_censored(fps);
        run.censor("rays", s, acc);

        if (c.write_rays)
        {
            auto w = run.csv("rays_s" + level_tag(s) + ".csv",
                             {"ray", "n_steps", "s_before", "s_after",
                              "overshoot", "undershoot", "parity_even",
                              "censored", "lambda", "y_exit"});
            for (std::size_t i = 0; i < recs.size(); ++i)
            {
                auto const& r = recs[i];
                w.row({std::uint64_t(i), r.fp.n_steps, r.fp.s_before,
                       r.fp.s_after, r.fp.overshoot, r.fp.undershoot,
                       std::int64_t(r.fp.parity_even),
                       std::int64_t(r.fp.censored), r.lambda, r.y_exit});
            }
        }

        auto const ok = uncensored(recs);
        if (ok.empty())
        {
            run.note("every ray censored; no statistics");
            levels.push_back({{"s", s},
                              {"n_rays", c.n_rays},
                              {"n_censored", acc.n_censored},
                              {"degenerate", true}});
            continue;
        }
        auto const u = undershoot_ratio_law(recs, c.t_grid);
        for (std::size_t i = 0; i < c.t_grid.size(); ++i)
            u_csv.row({s, c.t_grid[i], u[i], c.t_grid[i] * c.t_grid[i],
                       std::uint64_t(ok.size())});

        auto js = joint_exit_law(recs, s, c.t_grid, c.v_grid);
        std::size_t const nv = c.v_grid.size();
        static char const* const cls[4]
            = {"even", "odd", "lambda_pos", "lambda_neg"};
        for (std::size_t ti = 0; ti < c.t_grid.size(); ++ti)
            for (std::size_t vi = 0; vi < nv; ++vi)
                for (int j = 0; j < 2; ++j)
                    j_csv.row({s, c.t_grid[ti], c.v_grid[vi],
                               std::string(cls[j]) + "/" + cls[2 + j],
                               js.asym[j][ti * nv + vi],
                               js.scaling[j][ti * nv + vi]});
        auto j1 = joint_exit_law(recs, s, {1.0}, {0.5});

        std::vector<double> y, su, so;
        std::uint64_t n_even = 0, n_wide = 0;
        Histogram lam{lam_edges};
        for (auto const& r : ok)
        {
            y.push_back(r.y_exit);
            su.push_back(scaled_log(r.fp.undershoot, s));
            so.push_back(scaled_log(r.fp.overshoot, s));
            n_even += r.fp.parity_even ? 1 : 0;
            n_wide += std::abs(r.lambda) > 0.1 ? 1 : 0;
            lam.add(r.lambda);
        }
        double const corr = pearson(su, so);
        std::vector<double> und;
        for (auto const& r : ok)
            und.push_back(r.fp.undershoot);
        EmpiricalCDF ey{y}, eu{su}, eo{so}, eund{std::move(und)};
        double const ks_y = ks_distance(ey, uniform01_cdf);
        double const ks_u = ks_distance(eu, uniform01_cdf);
        double const ks_o = ks_distance(eo, uniform01_cdf);
        double const n_ok = static_cast<double>(ok.size());
        auto const pe = proportion_summary(n_even, ok.size());
        double const p_wide = static_cast<double>(n_wide) / n_ok;
        double const med = eund.median();
        s_csv.row({s, c.n_rays, acc.n_censored, ks_y, ks_u, ks_o, corr,
                   pe.estimate, p_wide, med});

        auto heur = heuristic_lambda_histogram(s, lam_edges);
        for (std::size_t i = 0; i < heur.size(); ++i)
            l_csv.row({s, lam_edges[i], lam_edges[i + 1],
                       static_cast<double>(lam.counts()[i]) / n_ok, heur[i]});

        levels.push_back({{"s", s},
                          {"n_rays", c.n_rays},
                          {"n_censored", acc.n_censored},
                          {"t_grid", c.t_grid},
                          {"u_hat", u},
                          {"ks_y", ks_y},
                          {"ks_scaled_undershoot", ks_u},
                          {"ks_scaled_overshoot", ks_o},
                          {"corr_scaled", corr},
                          {"p_even", pe.estimate},
                          {"p_even_se", pe.std_error},
                          {"asym_even_t1_v05", j1.asym[0][0]},
                          {"asym_odd_t1_v05", j1.asym[1][0]},
                          {"p_abs_lambda_gt_0.1", p_wide},
                          {"median_undershoot", med}});
    }
    run.metrics()["levels"] = levels;
    if (c.sampler_draws > 0)
        run.metrics()["sampler_2d"] = sampler_check_2d(run);
}

inline void run_simulate3d(Run& run)
{
    auto const& c = run.cfg();
    Json levels = Json::array();
    auto d_csv = run.csv("disc_law.csv",
                         {"s", "r", "prob", "std_error", "linear_bound"});
    auto s_csv = run.csv("summary.csv",
                         {"s", "n_rays", "n_censored", "rotation_p_value",
                          "p_zero_undershoot"});
    for (std::size_t li = 0; li < c.s_values.size(); ++li)
    {
        double const s = c.s_values[li];
        run.note("level " + format_double(s));
        auto opt = run.options("rays", stream_rays, li);
        auto recs = exit_ensemble_3d(s, c.n_rays,
                                     run.cap(default_max_steps<Step3D>(s)),
                                     opt);
        std::vector<FirstPassageRecord> fps(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i)
            fps[i] = recs[i].fp;
        auto acc = count_censored(fps);
        run.censor("rays", s, acc);

        if (c.write_rays)
        {
            auto w = run.csv("rays_s" + level_tag(s) + ".csv",
                             {"ray", "n_steps", "overshoot", "undershoot",
                              "censored", "exit_y", "exit_z", "dir_x",
                              "dir_y", "dir_z", "last_y", "last_z", "next_y",
                              "next_z"});
            for (std::size_t i = 0; i < recs.size(); ++i)
            {
                auto const& r = recs[i];
                w.row({std::uint64_t(i), r.fp.n_steps, r.fp.overshoot,
                       r.fp.undershoot, std::int64_t(r.fp.censored),
                       r.exit_point[0], r.exit_point[1], r.exit_dir[0],
                       r.exit_dir[1], r.exit_dir[2], r.last_contact[0],
                       r.last_contact[1], r.next_contact[0],
                       r.next_contact[1]});
            }
        }

        if (acc.n_censored == acc.n_total)
        {
            run.note("every ray censored; no statistics");
            levels.push_back({{"s", s},
                              {"n_rays", c.n_rays},
                              {"n_censored", acc.n_censored},
                              {"degenerate", true}});
            continue;
        }
        auto law = disc_exit_law(recs, c.r_grid);
        for (std::size_t i = 0; i < law.r_grid.size(); ++i)
            d_csv.row({s, law.r_grid[i], law.prob[i], law.se[i],
                       disc_linear_bound(law.r_grid[i])});
        double const pval = rotational_invariance_pvalue(recs);
        std::uint64_t n_zero = 0, n_ok = 0;
        for (auto const& f : fps)
        {
            if (f.censored)
                continue;
            ++n_ok;
            n_zero += f.undershoot == 0 ? 1 : 0;
        }
        double const p0 = n_ok ? double(n_zero) / double(n_ok) : 0.0;
        s_csv.row({s, c.n_rays, acc.n_censored, pval, p0});
        levels.push_back({{"s", s},
                          {"n_rays", c.n_rays},
                          {"n_censored", acc.n_censored},
                          {"r_grid", law.r_grid},
                          {"disc_prob", law.prob},
                          {"disc_se", law.se},
                          {"rotation_p_value", pval},
                          {"p_zero_undershoot", p0}});
    }
    run.metrics()["levels"] = levels;

    if (c.trajectory_steps > 0)
    {
        auto opt = run.options("trajectory", stream_trajectory, 0);
        Xoshiro256pp rng{opt.seed, opt.stream_base};
        auto w = run.csv("trajectory.csv", {"k", "x", "y", "z"});
        walk_bounces_3d(c.trajectory_steps, rng,
                        [&](std::uint64_t k, CylinderState const& p) {
                            w.row({k, p.x, p.y, p.z});
                        });
    }
    if (c.sampler_draws > 0)
        run.metrics()["sampler_3d"] = sampler_check_3d(run);
}

inline void run_gamma(Run& run)
{
    auto const& c = run.cfg();
    double const s = c.s_values.front();
    auto opt = run.options("rays", stream_rays, 0);
    auto fps = first_passage_ensemble(Step3D{}, s, c.n_rays,
                                      run.cap(default_max_steps<Step3D>(s)),
                                      opt);
    run.censor("rays", s, count_censored(fps));

    auto lopt = run.options("ladders", stream_ladders, 0);
    std::uint64_t const n_lrays
        = (c.n_ladders + ladders_per_ray - 1) / ladders_per_ray;
    CensoringAccount lacc;
    auto pairs = ladder_pairs(Step3D{}, n_lrays, ladders_per_ray,
                              run.cap(default_ladder_cap), lopt, &lacc);
    run.censor("ladders", 0, lacc);

    GammaEstimate est;
    est.t_grid = c.t_grid;
    gamma_direct(fps, est);
    gamma_formula(pairs, est);
    GammaEstimate near0;
    near0.t_grid = {0.01};
    gamma_formula(pairs, near0);

    auto w = run.csv("gamma.csv", {"t", "gamma_direct", "gamma_formula",
                                   "se_direct", "se_formula"});
    for (std::size_t i = 0; i < est.t_grid.size(); ++i)
        w.row({est.t_grid[i], est.direct[i], est.formula[i], est.se_direct[i],
               est.se_formula[i]});

    std::vector<double> o0(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        o0[i] = pairs[i].second;
    auto mo = mean_summary(o0);
    run.metrics() = {{"s", s},
                     {"n_direct", est.n_direct},
                     {"n_formula", est.n_formula},
                     {"atom_direct", est.atom_direct},
                     {"t_grid", est.t_grid},
                     {"direct", est.direct},
                     {"formula", est.formula},
                     {"se_direct", est.se_direct},
                     {"se_formula", est.se_formula},
                     {"formula_at_0.01", near0.formula[0]},
                     {"se_formula_at_0.01", near0.se_formula[0]},
                     {"slope_reference", gamma_slope_at_zero()},
                     {"mean_ladder_overshoot", mo.estimate},
                     {"mean_ladder_overshoot_se", mo.std_error}};
}

inline void run_ladder(Run& run)
{
    auto const& c = run.cfg();
    std::uint64_t const n_rays
        = (c.n_ladders + ladders_per_ray - 1) / ladders_per_ray;
    auto opt = run.options("ladders", stream_ladders, 0);
    auto samples = with_stepper(c.stepper, [&](auto st) {
        return ladder_ensemble(st, n_rays, ladders_per_ray,
                               run.cap(default_ladder_cap), opt);
    });
    std::vector<double> z;
    CensoringAccount acc;
    for (auto const& smp : samples)
    {
        acc.n_total += smp.heights.size() + (smp.censored ? 1 : 0);
        acc.n_censored += smp.censored ? 1 : 0;
        double prev = 0;
        for (double h : smp.heights)
        {
            z.push_back(h - prev);
            prev = h;
        }
    }
    run.censor("ladders", 0, acc);
    auto ms = mean_summary(z);
    bool const is3d = c.stepper == "3d";
    double const ref = is3d ? ladder_mean_3d() : INFINITY;

    auto w = run.csv("ladder_summary.csv",
                     {"stepper", "n_ladders", "n_censored", "mean_height",
                      "std_error", "reference"});
    w.row({c.stepper, std::uint64_t(z.size()), acc.n_censored, ms.estimate,
           ms.std_error, ref});

    // Tail t P(Z > t) sqrt(log t): tends to sqrt(c/2) for the 2D step
    EmpiricalCDF ez{z};
    auto tw = run.csv("ladder_tail.csv", {"t", "tail", "scaled_tail"});
    Json tail = Json::array();
    for (double t : {1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0, 1e4})
    {
        double const p = 1 - ez(t);
        double const sc = t > 1 ? p * t * std::sqrt(std::log(t)) : 0.0;
        tw.row({t, p, sc});
        tail.push_back({{"t", t}, {"tail", p}, {"scaled_tail", sc}});
    }
    run.metrics() = {{"stepper", c.stepper},
                     {"n_requested", c.n_ladders},
                     {"n_ladders", z.size()},
                     {"mean_height", ms.estimate},
                     {"std_error", ms.std_error},
                     {"tail", tail}};
    if (is3d)
        run.metrics()["reference_mean"] = ref;
    else
        run.metrics()["reference_scaled_tail"]
            = std::sqrt(step2d_tail_constant / 2);
}

inline void run_renewal(Run& run)
{
    auto const& c = run.cfg();
    auto opt = run.options("renewal", stream_plus, 0);
    auto est = with_stepper(c.stepper, [&](auto st) {
        using S = decltype(st);
        return renewal_estimate(st, c.window_max, c.n_bins, c.n_rays,
                                run.cap(default_max_steps<S>(c.window_max)),
                                opt);
    });
    run.censor("paths", c.window_max, {est.n_paths, est.n_censored});
    auto w = run.csv("renewal.csv", {"bin_lo", "bin_hi", "count", "mass",
                                     "cumulative"});
    for (std::size_t i = 0; i < est.mass.size(); ++i)
        w.row({est.bin_edges[i], est.bin_edges[i + 1], est.counts[i],
               est.mass[i],
               est.atom_at_zero + est.cumulative(est.bin_edges[i + 1])});

    bool const is3d = c.stepper == "3d";
    auto cw = run.csv("renewal_check.csv", {"t", "measure", "normalized"});
    Json checks = Json::array();
    for (double t : {10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0})
    {
        if (t > c.window_max)
            break;
        double const m = est.atom_at_zero + est.cumulative(t);
        // 3D: U[0, t] / t -> 2/sqrt(pi); 2D: U[0, t] L(t) / t -> 1
        double const norm = is3d ? m / t
                                 : m * std::sqrt(std::log(t) / 2) / t;
        cw.row({t, m, norm});
        checks.push_back({{"t", t}, {"measure", m}, {"normalized", norm}});
    }
    run.metrics() = {{"stepper", c.stepper},
                     {"window_max", c.window_max},
                     {"n_paths", est.n_paths},
                     {"n_censored", est.n_censored},
                     {"checks", checks},
                     {"reference_normalized",
                      is3d ? 1 / ladder_mean_3d() : 1.0}};
}

inline void run_occupation(Run& run)
{
    auto const& c = run.cfg();
    auto w = run.csv("occupation.csv",
                     {"s", "x1", "x2", "mean_count", "std_error", "scaled",
                      "reference"});
    Json levels = Json::array();
    for (std::size_t li = 0; li < c.s_values.size(); ++li)
    {
        double const s = c.s_values[li];
        std::vector<std::pair<double, double>> iv;
        for (auto [a, b] : c.intervals)
            iv.emplace_back(a * s, b * s);
        auto opt = run.options("rays", stream_rays, li);
        auto occ = with_stepper(c.stepper, [&](auto st) {
            using S = decltype(st);
            return occupation_ensemble(st, s, iv, c.n_rays,
                                       run.cap(default_max_steps<S>(s)),
                                       opt);
        });
        auto acc = count_censored(occ);
        run.censor("rays", s, acc);
        Json rows = Json::array();
        for (std::size_t k = 0; k < iv.size(); ++k)
        {
            std::vector<double> x(occ.size());
            for (std::size_t i = 0; i < occ.size(); ++i)
                x[i] = static_cast<double>(occ[i].counts[k]);
            auto ms = mean_summary(x);
            double const a1 = -c.intervals[k].second,
                         a2 = -c.intervals[k].first;
            double const ref = (a2 * a2 - a1 * a1) / pi;
            double const scaled = ms.estimate / (s * s);
            w.row({s, iv[k].first, iv[k].second, ms.estimate, ms.std_error,
                   scaled, ref});
            rows.push_back({{"x1", c.intervals[k].first},
                            {"x2", c.intervals[k].second},
                            {"mean_count", ms.estimate},
                            {"std_error", ms.std_error},
                            {"scaled", scaled},
                            {"scaled_se", ms.std_error / (s * s)},
                            {"reference", ref}});
        }
        // Intervals that split another one must add up path by path
        std::uint64_t violations = 0;
        for (std::size_t a = 0; a < iv.size(); ++a)
            for (std::size_t b = 0; b < iv.size(); ++b)
                for (std::size_t d = 0; d < iv.size(); ++d)
                {
                    if (iv[b].first != iv[a].first
                        || iv[d].second != iv[a].second
                        || iv[b].second != iv[d].first || b == a || d == a)
                        continue;
                    for (auto const& o : occ)
                        violations += o.counts[a] != o.counts[b] + o.counts[d];
                }
        levels.push_back({{"s", s},
                          {"n_rays", c.n_rays},
                          {"n_censored", acc.n_censored},
                          {"intervals", rows},
                          {"additivity_violations", violations}});
    }
    run.metrics()["levels"] = levels;
}

inline void run_brightness(Run& run)
{
    auto const& c = run.cfg();
    auto w = run.csv("brightness.csv",
                     {"s", "r1", "r2", "estimate", "std_error", "constant",
                      "unreliable_tail"});
    auto bw = run.csv("brightness_bins.csv",
                      {"s", "r1", "r2", "a_lo", "a_hi", "occupation",
                       "paths_visiting"});
    Json levels = Json::array();
    for (std::size_t li = 0; li < c.s_values.size(); ++li)
    {
        double const s = c.s_values[li];
        auto opt = run.options("rays", stream_rays, li);
        auto est = brightness_profile(s, c.annuli, c.n_rays,
                                      run.cap(default_max_steps<Step3D>(s)),
                                      opt, c.n_bins);
        Json rows = Json::array();
        bool counted = false;
        for (auto const& e : est)
        {
            if (!counted)
            {
                run.censor("rays", s, {e.n_paths, e.n_censored});
                counted = true;
            }
            double const k = brightness_constant(e.r1, e.r2);
            // Quadrature of the kernel against the limiting density 2a/pi
            double const analytic = brightness_from_density(
                e.r1, e.r2, [](double a) { return 2 * a / pi; }, c.n_bins);
            w.row({s, e.r1, e.r2, e.estimate, e.std_error, k,
                   std::int64_t(e.unreliable_tail)});
            for (std::size_t i = 0; i < e.occupation.size(); ++i)
                bw.row({s, e.r1, e.r2, e.a_edges[i], e.a_edges[i + 1],
                        e.occupation[i], e.paths_visiting[i]});
            rows.push_back({{"r1", e.r1},
                            {"r2", e.r2},
                            {"estimate", e.estimate},
                            {"std_error", e.std_error},
                            {"constant", k},
                            {"analytic_error", std::abs(analytic - k)},
                            {"unreliable_tail", e.unreliable_tail}});
        }
        levels.push_back({{"s", s}, {"annuli", rows}});
    }
    run.metrics()["levels"] = levels;
}

//! Two numeric columns (s, g), optional header, '#' comments
inline Inhomogeneity read_kernel_file(std::string const& path)
{
    std::ifstream in{path};
    if (!in)
        throw ConfigError("kernel_file: cannot read '" + path + "'");
    std::vector<double> s, g;
    std::string line;
    bool first = true;
    while (std::getline(in, line))
    {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        auto cells = split(line, ',');
        if (cells.size() != 2)
            throw ConfigError("kernel_file: expected two columns in '" + line
                              + "'");
        double a = 0, b = 0;
        try
        {
            a = to_double("kernel_file", cells[0]);
            b = to_double("kernel_file", cells[1]);
        }
        catch (ConfigError const&)
        {
            if (first)
            {
                first = false;
                continue;
            }
            throw;
        }
        first = false;
        s.push_back(a);
        g.push_back(b);
    }
    try
    {
        return kernel_tabulated(std::move(s), std::move(g));
    }
    catch (std::invalid_argument const& e)
    {
        throw ConfigError(std::string("kernel_file: ") + e.what());
    }
}

inline Inhomogeneity make_kernel(ExperimentConfig const& c)
{
    if (c.kernel == "u2d")
        return kernel_u2d(c.kernel_t);
    if (c.kernel == "u2d-centered")
        return kernel_u2d_centered(c.kernel_t);
    if (c.kernel == "decay")
        return kernel_power_decay(c.kernel_c, c.kernel_alpha);
    if (c.kernel == "zero")
        return kernel_zero();
    return read_kernel_file(c.kernel_file);
}

inline void run_wh_solve(Run& run)
{
    auto const& c = run.cfg();
    WienerHopfProblem prob;
    prob.law = step_law_2d();
    prob.g = make_kernel(c);
    prob.grid.s_max = c.s_max;
    prob.grid.h = c.grid_step;
    prob.scheme = c.scheme == "linear" ? Quadrature::linear
                                       : Quadrature::quadratic;
    IterationOptions io;
    io.tol = c.tol;
    if (c.max_steps)
        io.max_iter = c.max_steps;
    auto sol = solve_min_iterative(prob, io);
    auto grid = sol.sample(c.s_max, c.output_step);

    std::vector<double> renewal;
    Json rmetrics;
    if (c.renewal_paths > 0)
    {
        std::size_t const nb = c.n_bins ? c.n_bins
                                        : static_cast<std::size_t>(
                                            std::ceil(2 * c.s_max));
        auto cap = run.cap(default_max_steps<Step2D>(c.s_max));
        auto po = run.options("renewal_plus", stream_plus, 0);
        auto plus = renewal_estimate(Step2D{}, c.s_max, nb, c.renewal_paths,
                                     cap, po);
        auto mo = run.options("renewal_minus", stream_minus, 0);
        auto minus = renewal_estimate(Negated<Step2D>{}, c.s_max, nb,
                                      c.renewal_paths, cap, mo);
        run.censor("renewal_plus", c.s_max, {plus.n_paths, plus.n_censored});
        run.censor("renewal_minus", c.s_max,
                   {minus.n_paths, minus.n_censored});
        std::vector<double> sg(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            sg[i] = grid[i].first;
        renewal = solve_via_renewal(prob.g, plus, minus, sg);
        double sup = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            sup = std::max(sup, std::abs(renewal[i] - grid[i].second));
        rmetrics = {{"n_paths", c.renewal_paths},
                    {"n_bins", nb},
                    {"sup_difference", sup}};
    }

    std::vector<std::string> cols{"s", "W"};
    if (!renewal.empty())
        cols.push_back("W_renewal");
    auto w = run.csv("solution.csv", cols);
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (renewal.empty())
            w.row({grid[i].first, grid[i].second});
        else
            w.row({grid[i].first, grid[i].second, renewal[i]});
    }

    Json at = Json::array();
    for (double s : {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0})
        if (s <= c.s_max)
            at.push_back({{"s", s}, {"W", sol(s)}});
    // Largest s past which the sampled W never increases
    double mono_from = grid.back().first;
    for (std::size_t i = grid.size() - 1; i > 0; --i)
    {
        if (grid[i].second > grid[i - 1].second)
            break;
        mono_from = grid[i - 1].first;
    }
    run.metrics() = {{"kernel", c.kernel},
                     {"kernel_t", c.kernel_t},
                     {"scheme", c.scheme},
                     {"s_max", c.s_max},
                     {"grid_step", c.grid_step},
                     {"n_nodes", sol.nodes.size()},
                     {"iterations", sol.iterations},
                     {"residual", sol.residual},
                     {"last_increment", sol.last_increment},
                     {"truncation_error_bound", sol.truncation_error_bound},
                     {"values", at},
                     {"nonincreasing_from", mono_from}};
    if (!rmetrics.is_null())
        run.metrics()["renewal"] = rmetrics;
}

inline void run_eye(Run& run)
{
    auto const& c = run.cfg();
    auto w = run.csv("eye.csv", {"s", "t", "p_lambda_nonpos",
                                 "p_lambda_nonneg"});
    Json levels = Json::array();
    for (std::size_t li = 0; li < c.s_values.size(); ++li)
    {
        double const s = c.s_values[li];
        auto opt = run.options("rays", stream_rays, li);
        auto recs = exit_ensemble_2d(s, c.n_rays,
                                     run.cap(default_max_steps<Step2D>(s)),
                                     opt);
        std::vector<FirstPassageRecord> fps(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i)
            fps[i] = recs[i].fp;
        run.censor("rays", s, count_censored(fps));
        auto tab = eye_conditional(recs, s, c.y, c.eps, c.t_grid);
        for (std::size_t i = 0; i < c.t_grid.size(); ++i)
            w.row({s, c.t_grid[i], tab.prob[0][i], tab.prob[1][i]});
        // Side split over the whole window, whatever the grid
        auto whole = eye_conditional(recs, s, c.y, c.eps, {1.0});
        levels.push_back({{"s", s},
                          {"n_window", tab.n_window},
                          {"n_samples", tab.n_samples},
                          {"p_lambda_nonneg", whole.prob[1][0]},
                          {"reference", c.y - c.eps / 2}});
    }
    run.metrics()["levels"] = levels;
}

//---------------------------------------------------------------------------//
inline Json config_json(ExperimentConfig const& c)
{
    Json j = Json::object();
    std::istringstream is{canonical_text(c)};
    std::string line;
    while (std::getline(is, line))
    {
        auto eq = line.find('=');
        if (eq != std::string::npos)
            j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    j["output_dir"] = c.output_dir;
    j["workers"] = c.workers;
    return j;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Run one experiment into output_dir/run_name.
 *
 * The manifest is written with status "running" before any work and
 * rewritten at the end. A run whose censored fraction exceeds
 * \c partial_censoring_limit anywhere finishes with status "partial".
 */
inline RunResult run(ExperimentConfig cfg, std::ostream* log = nullptr)
{
    apply_defaults(cfg);
    validate(cfg);
    RunResult res;
    res.dir = fs::path(cfg.output_dir) / cfg.run_name;
    std::error_code ec;
    fs::create_directories(res.dir, ec);
    if (ec)
        throw Error("cannot create '" + res.dir.string() + "': " + ec.message());

    Json& m = res.manifest;
    m["tool"] = "ltube";
    m["version"] = version;
    m["experiment"] = cfg.experiment;
    m["run_name"] = cfg.run_name;
    m["status"] = "running";
    m["config"] = detail::config_json(cfg);
    m["config_digest"] = sha256_text(canonical_text(cfg));
    m["workers_resolved"] = resolve_workers(cfg.workers);
    write_json(res.dir / manifest_name, m);

    auto const t0 = std::chrono::steady_clock::now();
    detail::Run r{cfg, res.dir, log};
    try
    {
        auto const& e = cfg.experiment;
        if (e == "simulate2d")
            detail::run_simulate2d(r);
        else if (e == "simulate3d")
            detail::run_simulate3d(r);
        else if (e == "gamma")
            detail::run_gamma(r);
        else if (e == "ladder")
            detail::run_ladder(r);
        else if (e == "renewal")
            detail::run_renewal(r);
        else if (e == "occupation")
            detail::run_occupation(r);
        else if (e == "brightness")
            detail::run_brightness(r);
        else if (e == "wh-solve")
            detail::run_wh_solve(r);
        else
            detail::run_eye(r);
    }
    catch (std::exception const& ex)
    {
        m["status"] = "failed";
        m["error"] = ex.what();
        write_json(res.dir / manifest_name, m);
        throw;
    }
    double const wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();

    Json outs = Json::array();
    for (auto const& p : r.outputs())
        outs.push_back({{"file", p.filename().string()},
                        {"bytes", fs::file_size(p)},
                        {"sha256", sha256_file(p)}});
    res.partial = r.worst_censoring() > partial_censoring_limit;
    m["status"] = res.partial ? "partial" : "complete";
    m["wall_seconds"] = wall;
    m["stream_bases"] = r.streams();
    m["censoring"] = r.censoring();
    m["outputs"] = outs;
    m["metrics"] = r.metrics();
    write_json(res.dir / manifest_name, m);
    return res;
}

//---------------------------------------------------------------------------//
}  // namespace ltube::cli
