//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/cli/report.hpp
//! Pass/fail summary of the acceptance criteria from run manifests.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../cylinder3d.hpp"
#include "../sampling.hpp"
#include "output.hpp"
#include "run.hpp"

namespace ltube::cli
{
//---------------------------------------------------------------------------//
enum class Verdict
{
    pass,
    fail,
    not_run
};

inline char const* to_string(Verdict v)
{
    switch (v)
    {
        case Verdict::pass:
            return "PASS";
        case Verdict::fail:
            return "FAIL";
        default:
            return "NOT RUN";
    }
}

struct CriterionResult
{
    int id{0};
    std::string name;
    Verdict verdict{Verdict::not_run};
    std::string detail;
};

//! Tolerances of the acceptance table
struct Thresholds
{
    double sampler_sigmas{4};
    double ks_exit_full{0.02};
    double ks_exit_desk{0.03};
    double u_law{0.03};
    double asym_target{0.125};
    double asym_rel{0.15};
    double parity{0.01};
    double ladder_rel{0.01};
    double gamma_sup{0.03};
    double gamma_sigmas{3};
    double gamma_slope_tol{0.02};
    double occupation_rel{0.10};
    double brightness_rel{0.15};
    double brightness_analytic{1e-12};
    double wh_renewal{0.03};
    double wh_monte_carlo{0.02};
};

namespace detail
{
//---------------------------------------------------------------------------//
struct Manifests
{
    std::vector<std::pair<fs::path, Json>> all;

    std::vector<Json const*> of(std::string const& experiment) const
    {
        std::vector<Json const*> out;
        for (auto const& [p, m] : all)
            if (m.value("experiment", "") == experiment)
                out.push_back(&m);
        return out;
    }

    //! Level entry at \c s with the most rays over all runs of an experiment
    Json const* level(std::string const& experiment, double s) const
    {
        Json const* best = nullptr;
        for (auto const* m : of(experiment))
        {
            if (!m->contains("metrics") || !(*m)["metrics"].contains("levels"))
                continue;
            for (auto const& l : (*m)["metrics"]["levels"])
            {
                if (l.value("s", 0.0) != s || l.value("degenerate", false))
                    continue;
                if (!best
                    || l.value("n_rays", 0.0) > best->value("n_rays", 0.0))
                    best = &l;
            }
        }
        return best;
    }
};

inline Manifests load_manifests(fs::path const& dir)
{
    Manifests ms;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw MissingArtifacts("no output directory at '" + dir.string() + "'");
    std::vector<fs::path> paths;
    for (auto const& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() == manifest_name)
            paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (auto const& p : paths)
    {
        Json m;
        try
        {
            m = read_json(p);
        }
        catch (std::exception const&)
        {
            continue;
        }
        auto const status = m.value("status", "");
        if (status == "complete" || status == "partial")
            ms.all.emplace_back(p, std::move(m));
    }
    if (ms.all.empty())
        throw MissingArtifacts("no finished run manifests under '"
                               + dir.string() + "'");
    return ms;
}

inline std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

inline CriterionResult
result(int id, char const* name, bool ok, std::string detail)
{
    return {id, name, ok ? Verdict::pass : Verdict::fail, std::move(detail)};
}

inline CriterionResult missing(int id, char const* name, std::string what)
{
    return {id, name, Verdict::not_run, "needs " + std::move(what)};
}

//! max over t in [0.1, 0.9] of |u_hat - t^2|
inline std::optional<double> u_law_deviation(Json const& level)
{
    auto const t = level["t_grid"].get<std::vector<double>>();
    auto const u = level["u_hat"].get<std::vector<double>>();
    std::optional<double> dev;
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        if (t[i] < 0.1 - 1e-12 || t[i] > 0.9 + 1e-12)
            continue;
        double const d = std::abs(u[i] - t[i] * t[i]);
        dev = std::max(dev.value_or(0.0), d);
    }
    return dev;
}

inline std::optional<double> u_at(Json const& level, double t)
{
    auto const tg = level["t_grid"].get<std::vector<double>>();
    auto const u = level["u_hat"].get<std::vector<double>>();
    for (std::size_t i = 0; i < tg.size(); ++i)
        if (std::abs(tg[i] - t) < 1e-12)
            return u[i];
    return std::nullopt;
}

//---------------------------------------------------------------------------//
// CRITERIA
//---------------------------------------------------------------------------//
inline CriterionResult c1(Manifests const& ms, Thresholds const& th)
{
    char const* name = "3D step moments";
    Json const* best = nullptr;
    for (auto const* m : ms.of("simulate3d"))
    {
        auto const& met = (*m)["metrics"];
        if (met.contains("sampler_3d")
            && (!best || met["sampler_3d"]["n_draws"] > (*best)["n_draws"]))
            best = &met["sampler_3d"];
    }
    if (!best || (*best)["n_draws"].get<double>() < 1e7)
        return missing(1, name, "simulate3d with sampler_draws >= 1e7");
    bool ok = true;
    std::string d;
    for (auto const& row : (*best)["moments"])
    {
        double const z = row["z"].get<double>();
        ok = ok && std::abs(z) <= th.sampler_sigmas;
        d += row["quantity"].get<std::string>() + " z=" + fmt(z) + " ";
    }
    return result(1, name, ok, d + "(limit " + fmt(th.sampler_sigmas) + ")");
}

inline CriterionResult c2(Manifests const& ms, Thresholds const&)
{
    char const* name = "2D step law KS";
    Json const* best = nullptr;
    for (auto const* m : ms.of("simulate2d"))
    {
        auto const& met = (*m)["metrics"];
        if (met.contains("sampler_2d")
            && (!best || met["sampler_2d"]["n_draws"] > (*best)["n_draws"]))
            best = &met["sampler_2d"];
    }
    if (!best || (*best)["n_draws"].get<double>() < 1e6)
        return missing(2, name, "simulate2d with sampler_draws >= 1e6");
    double const d = (*best)["ks_distance"], crit = (*best)["ks_critical_1pct"];
    return result(2, name, d < crit,
                  "KS=" + fmt(d) + " critical(1%)=" + fmt(crit));
}

inline CriterionResult c3(Manifests const& ms, Thresholds const& th)
{
    char const* name = "exit position uniformity";
    auto const* full = ms.level("simulate2d", 1e4);
    if (full && full->value("n_rays", 0.0) >= 1e5)
    {
        double const ks = (*full)["ks_y"];
        return result(3, name, ks < th.ks_exit_full,
                      "full tier s=1e4: KS=" + fmt(ks) + " < "
                          + fmt(th.ks_exit_full));
    }
    auto const* desk = ms.level("simulate2d", 1e3);
    if (!desk || desk->value("n_rays", 0.0) < 1e5)
        return missing(3, name, "simulate2d at s=1e3 with 1e5 rays");
    double const ks = (*desk)["ks_y"];
    return result(3, name, ks < th.ks_exit_desk,
                  "desk tier s=1e3: KS=" + fmt(ks) + " < "
                      + fmt(th.ks_exit_desk) + " (full tier not run)");
}

inline CriterionResult c4(Manifests const& ms, Thresholds const& th)
{
    char const* name = "undershoot ratio law t^2";
    auto const* hi = ms.level("simulate2d", 1e3);
    auto const* lo = ms.level("simulate2d", 1e2);
    if (!hi || !lo || hi->value("n_rays", 0.0) < 1e5)
        return missing(4, name, "simulate2d at s=1e2 and s=1e3 with 1e5 rays");
    auto const dh = u_law_deviation(*hi), dl = u_law_deviation(*lo);
    if (!dh || !dl)
        return missing(4, name, "t_grid covering 0.1..0.9");
    bool const ok = *dh < th.u_law && *dh < *dl;
    return result(4, name, ok,
                  "max|u-t^2| s=1e3: " + fmt(*dh) + " (limit " + fmt(th.u_law)
                      + "), s=1e2: " + fmt(*dl));
}

inline CriterionResult c5(Manifests const& ms, Thresholds const& th)
{
    char const* name = "joint exit law and parity";
    auto const* l = ms.level("simulate2d", 1e3);
    if (!l)
        return missing(5, name, "simulate2d at s=1e3");
    double const a = (*l)["asym_even_t1_v05"], pe = (*l)["p_even"];
    bool const ok_a = std::abs(a - th.asym_target)
                      <= th.asym_target * th.asym_rel;
    bool const ok_p = std::abs(pe - 0.5) <= th.parity;
    return result(5, name, ok_a && ok_p,
                  "P(even, ratio<=0.5)=" + fmt(a) + " target "
                      + fmt(th.asym_target) + "+-"
                      + fmt(th.asym_target * th.asym_rel)
                      + "; P(even)=" + fmt(pe));
}

inline CriterionResult c6(Manifests const& ms, Thresholds const&)
{
    char const* name = "log-scaled undershoot trend";
    std::vector<double> ks;
    for (double s : {1e2, 1e3, 1e4})
    {
        auto const* l = ms.level("simulate2d", s);
        if (!l)
            return missing(6, name, "simulate2d at s=1e2, 1e3 and 1e4");
        ks.push_back((*l)["ks_scaled_undershoot"]);
    }
    bool const ok = ks[0] > ks[1] && ks[1] > ks[2];
    return result(6, name, ok,
                  "KS " + fmt(ks[0]) + " > " + fmt(ks[1]) + " > " + fmt(ks[2]));
}

inline CriterionResult c7(Manifests const& ms, Thresholds const& th)
{
    char const* name = "3D ladder mean";
    Json const* best = nullptr;
    for (auto const* m : ms.of("ladder"))
    {
        auto const& met = (*m)["metrics"];
        if (met.value("stepper", "") == "3d"
            && (!best || met["n_requested"] > (*best)["n_requested"]))
            best = &met;
    }
    if (!best || (*best)["n_requested"].get<double>() < 1e6)
        return missing(7, name, "ladder run (3d) with 1e6 ladders");
    double const m = (*best)["mean_height"], ref = ladder_mean_3d();
    double const rel = std::abs(m / ref - 1);
    return result(7, name, rel < th.ladder_rel,
                  "mean=" + fmt(m) + " reference=" + fmt(ref)
                      + " rel.err=" + fmt(rel));
}

inline CriterionResult c8(Manifests const& ms, Thresholds const& th)
{
    char const* name = "Gamma cross-check";
    auto runs = ms.of("gamma");
    if (runs.empty())
        return missing(8, name, "gamma run");
    auto const& g = (*runs.back())["metrics"];
    auto const t = g["t_grid"].get<std::vector<double>>();
    auto const d = g["direct"].get<std::vector<double>>();
    auto const f = g["formula"].get<std::vector<double>>();
    auto const se = g["se_formula"].get<std::vector<double>>();
    double sup = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        sup = std::max(sup, std::abs(d[i] - f[i]));
    double worst_z = INFINITY;
    for (std::size_t i = 1; i + 1 < t.size(); ++i)
    {
        double const d2 = f[i + 1] - 2 * f[i] + f[i - 1];
        double const s2 = std::sqrt(se[i + 1] * se[i + 1]
                                    + 4 * se[i] * se[i]
                                    + se[i - 1] * se[i - 1]);
        if (s2 > 0)
            worst_z = std::min(worst_z, d2 / s2);
        else if (d2 < 0)
            worst_z = -INFINITY;
    }
    double const slope0 = gamma_slope_at_zero();
    double const slope = g["formula_at_0.01"].get<double>() / 0.01;
    std::size_t bound_violations = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        double const tol = th.gamma_sigmas * se[i];
        if (f[i] < slope0 * t[i] - tol || f[i] > t[i] + tol)
            ++bound_violations;
    }
    bool const ok = sup < th.gamma_sup && worst_z >= -th.gamma_sigmas
                    && std::abs(slope - slope0) <= th.gamma_slope_tol
                    && bound_violations == 0;
    return result(8, name, ok,
                  "sup|direct-formula|=" + fmt(sup) + " min 2nd-diff z="
                      + fmt(worst_z) + " slope(0.01)=" + fmt(slope)
                      + " bound violations=" + std::to_string(bound_violations));
}

inline CriterionResult c9(Manifests const& ms, Thresholds const& th)
{
    char const* name = "occupation Green function";
    auto const* l = ms.level("occupation", 100);
    if (!l)
        return missing(9, name, "occupation run at s=100");
    for (auto const& iv : (*l)["intervals"])
    {
        if (iv["x1"].get<double>() != -0.8 || iv["x2"].get<double>() != -0.2)
            continue;
        double const v = iv["scaled"], ref = iv["reference"];
        double const rel = std::abs(v / ref - 1);
        return result(9, name, rel <= th.occupation_rel,
                      "scaled mean=" + fmt(v) + " reference=" + fmt(ref)
                          + " rel.err=" + fmt(rel));
    }
    return missing(9, name, "interval -0.8:-0.2");
}

inline CriterionResult c10(Manifests const& ms, Thresholds const& th)
{
    char const* name = "brightness constant";
    Json const* hit = nullptr;
    for (auto const* m : ms.of("brightness"))
        for (auto const& l : (*m)["metrics"]["levels"])
            if (l["s"].get<double>() == 100)
                for (auto const& a : l["annuli"])
                    if (a["r1"].get<double>() == 0.2
                        && a["r2"].get<double>() == 0.8)
                        hit = &a;
    if (!hit)
        return missing(10, name, "brightness run at s=100 for (0.2, 0.8)");
    double const e = (*hit)["estimate"], k = (*hit)["constant"],
                 an = (*hit)["analytic_error"];
    double const rel = std::abs(e / k - 1);
    return result(10, name,
                  rel <= th.brightness_rel && an <= th.brightness_analytic,
                  "estimate=" + fmt(e) + " constant=" + fmt(k) + " rel.err="
                      + fmt(rel) + " analytic err=" + fmt(an));
}

inline CriterionResult c11(Manifests const& ms, Thresholds const& th)
{
    char const* name = "Wiener-Hopf oracles";
    Json const *plain = nullptr, *centered = nullptr;
    for (auto const* m : ms.of("wh-solve"))
    {
        auto const& met = (*m)["metrics"];
        if (met.value("kernel_t", 0.0) != 0.5 || met.value("s_max", 0.0) < 1e3)
            continue;
        if (met.value("kernel", "") == "u2d")
            plain = &met;
        else if (met.value("kernel", "") == "u2d-centered")
            centered = &met;
    }
    auto const* l2 = ms.level("simulate2d", 1e2);
    auto const* l3 = ms.level("simulate2d", 1e3);
    if (!plain || !plain->contains("renewal") || !centered || !l2 || !l3)
        return missing(11, name,
                       "wh-solve u2d (with renewal_paths) and u2d-centered "
                       "runs at t=0.5, s_max>=1e3, plus simulate2d at s=1e2, "
                       "1e3");
    auto value_at = [](Json const& met, double s) -> double {
        for (auto const& v : met["values"])
            if (v["s"].get<double>() == s)
                return v["W"].get<double>();
        return NAN;
    };
    double const sup = (*plain)["renewal"]["sup_difference"];
    auto const u2 = u_at(*l2, 0.5), u3 = u_at(*l3, 0.5);
    if (!u2 || !u3)
        return missing(11, name, "t_grid containing 0.5");
    double const e2 = std::abs(value_at(*plain, 100) - *u2);
    double const e3 = std::abs(value_at(*plain, 1000) - *u3);
    double const c2 = value_at(*centered, 100), c3 = value_at(*centered, 1000);
    double const mono = (*centered)["nonincreasing_from"];
    bool const decreasing = c3 < c2 && mono <= 100 && c3 > 0;
    bool const ok = sup < th.wh_renewal && e2 < th.wh_monte_carlo
                    && e3 < th.wh_monte_carlo && decreasing;
    return result(11, name, ok,
                  "sup|iter-renewal|=" + fmt(sup) + " |W-u| at 1e2: "
                      + fmt(e2) + " at 1e3: " + fmt(e3)
                      + "; centered W(1e2)=" + fmt(c2)
                      + " W(1e3)=" + fmt(c3) + " nonincreasing from s="
                      + fmt(mono));
}

inline CriterionResult c12(Manifests const& ms, Thresholds const&)
{
    char const* name = "determinism";
    std::map<std::string, std::vector<Json const*>> groups;
    for (auto const& [p, m] : ms.all)
        groups[m.value("config_digest", "")].push_back(&m);
    std::size_t compared = 0;
    std::set<std::string> with_workers, mismatched;
    for (auto const& [digest, runs] : groups)
    {
        if (runs.size() < 2)
            continue;
        std::set<unsigned> workers;
        for (auto const* m : runs)
        {
            workers.insert((*m)["config"].value("workers", 0u));
            ++compared;
            if ((*m)["outputs"] != (*runs.front())["outputs"])
                mismatched.insert((*m)["experiment"].get<std::string>());
        }
        if (workers.count(1) && workers.count(4))
            with_workers.insert((*runs.front())["experiment"]);
    }
    if (with_workers.empty())
        return missing(12, name, "repeated runs with workers 1 and 4");
    std::string covered;
    for (auto const& e : with_workers)
        covered += (covered.empty() ? "" : ",") + e;
    std::string d = std::to_string(compared)
                    + " repeated runs compared; workers {1,4} for " + covered;
    if (!mismatched.empty())
    {
        d += "; digests differ for";
        for (auto const& e : mismatched)
            d += " " + e;
    }
    return result(12, name, mismatched.empty(), d);
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Evaluate every criterion from the manifests under \c dir.
 *
 * Throws MissingArtifacts if there are no finished runs at all.
 */
inline std::vector<CriterionResult>
evaluate(fs::path const& dir, Thresholds const& th = {})
{
    auto const ms = detail::load_manifests(dir);
    return {detail::c1(ms, th), detail::c2(ms, th), detail::c3(ms, th),
            detail::c4(ms, th), detail::c5(ms, th), detail::c6(ms, th),
            detail::c7(ms, th), detail::c8(ms, th), detail::c9(ms, th),
            detail::c10(ms, th), detail::c11(ms, th), detail::c12(ms, th)};
}

inline std::string format_line(CriterionResult const& r)
{
    std::ostringstream os;
    os << "[" << to_string(r.verdict) << "] " << r.id << ". " << r.name;
    if (!r.detail.empty())
        os << ": " << r.detail;
    return os.str();
}

//! Summary text: one line per criterion and a count
inline std::string report(fs::path const& dir, Thresholds const& th = {})
{
    auto const rs = evaluate(dir, th);
    std::ostringstream os;
    int n_pass = 0, n_fail = 0, n_skip = 0;
    for (auto const& r : rs)
    {
        os << format_line(r) << '\n';
        n_pass += r.verdict == Verdict::pass;
        n_fail += r.verdict == Verdict::fail;
        n_skip += r.verdict == Verdict::not_run;
    }
    os << n_pass << " passed, " << n_fail << " failed, " << n_skip
       << " not run\n";
    return os.str();
}

//---------------------------------------------------------------------------//
}  // namespace ltube::cli
