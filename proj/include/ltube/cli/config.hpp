//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/cli/config.hpp
//! Flat key = value experiment configuration.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../errors.hpp"

namespace ltube::cli
{
//---------------------------------------------------------------------------//
inline std::vector<std::string> const& experiment_names()
{
    static std::vector<std::string> const names{
        "simulate2d", "simulate3d", "gamma",   "renewal", "ladder",
        "occupation", "brightness", "wh-solve", "eye"};
    return names;
}

using Interval = std::pair<double, double>;

/*!
 * Everything a run needs. Zero counts and empty grids mean "use the
 * experiment's default", which \c apply_defaults fills in.
 */
struct ExperimentConfig
{
    std::string experiment;
    std::string run_name;  //!< output subdirectory; defaults to experiment
    std::vector<double> s_values;
    std::uint64_t n_rays{0};
    std::uint64_t seed{1};
    std::vector<double> t_grid;
    std::vector<double> v_grid;
    std::vector<double> r_grid;
    std::uint64_t max_steps{0};  //!< 0: default cap for each s
    std::string output_dir;
    unsigned workers{0};  //!< 0: auto
    std::uint64_t block_size{1024};

    // Walk experiments
    std::string stepper;  //!< "2d" or "3d"
    std::uint64_t n_ladders{0};
    double window_max{0};
    std::uint64_t n_bins{0};
    std::vector<Interval> intervals;  //!< occupation, in units of s
    std::vector<Interval> annuli;  //!< brightness radii
    std::uint64_t sampler_draws{0};
    bool write_rays{true};
    std::uint64_t trajectory_steps{0};

    // Conditional exit law
    double y{2.0 / 3.0};
    double eps{0.1};

    // Wiener-Hopf
    std::string kernel;
    double kernel_t{0.5};
    double kernel_c{1};
    double kernel_alpha{0.5};
    std::string kernel_file;
    double s_max{0};
    double grid_step{0};
    double tol{1e-7};
    std::string scheme{"quadratic"};
    double output_step{1};
    std::uint64_t renewal_paths{0};
};

namespace detail
{
inline std::string trim(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string const& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is{s};
    while (std::getline(is, item, sep))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

inline double to_double(std::string const& key, std::string const& v)
{
    double x = 0;
    auto const* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || p != end || !std::isfinite(x))
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

inline std::uint64_t to_count(std::string const& key, std::string const& v)
{
    // Accept 1e5 style as well as plain integers
    double const x = to_double(key, v);
    if (x < 0 || x != std::floor(x) || x > 1.8e19)
        throw ConfigError(key + ": expected a nonnegative integer, got '" + v
                          + "'");
    return static_cast<std::uint64_t>(x);
}

inline bool to_bool(std::string const& key, std::string const& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> to_list(std::string const& key, std::string const& v)
{
    std::vector<double> out;
    for (auto const& item : split(v, ','))
        out.push_back(to_double(key, item));
    return out;
}

inline std::vector<Interval>
to_intervals(std::string const& key, std::string const& v)
{
    std::vector<Interval> out;
    for (auto const& item : split(v, ','))
    {
        auto const ends = split(item, ':');
        if (ends.size() != 2)
            throw ConfigError(key + ": expected a:b pairs, got '" + item + "'");
        out.emplace_back(to_double(key, ends[0]), to_double(key, ends[1]));
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string const&)>;

inline std::map<std::string, Setter> const& setters()
{
    using C = ExperimentConfig;
    using S = std::string;
    static std::map<std::string, Setter> const table{
        {"experiment", [](C& c, S const& v) { c.experiment = v; }},
        {"run_name", [](C& c, S const& v) { c.run_name = v; }},
        {"s_values",
         [](C& c, S const& v) { c.s_values = to_list("s_values", v); }},
        {"n_rays", [](C& c, S const& v) { c.n_rays = to_count("n_rays", v); }},
        {"seed", [](C& c, S const& v) { c.seed = to_count("seed", v); }},
        {"t_grid", [](C& c, S const& v) { c.t_grid = to_list("t_grid", v); }},
        {"v_grid", [](C& c, S const& v) { c.v_grid = to_list("v_grid", v); }},
        {"r_grid", [](C& c, S const& v) { c.r_grid = to_list("r_grid", v); }},
        {"max_steps",
         [](C& c, S const& v) { c.max_steps = to_count("max_steps", v); }},
        {"output_dir", [](C& c, S const& v) { c.output_dir = v; }},
        {"workers",
         [](C& c, S const& v) {
             c.workers = (v == "auto")
                             ? 0u
                             : static_cast<unsigned>(to_count("workers", v));
         }},
        {"block_size",
         [](C& c, S const& v) { c.block_size = to_count("block_size", v); }},
        {"stepper", [](C& c, S const& v) { c.stepper = v; }},
        {"n_ladders",
         [](C& c, S const& v) { c.n_ladders = to_count("n_ladders", v); }},
        {"window_max",
         [](C& c, S const& v) { c.window_max = to_double("window_max", v); }},
        {"n_bins", [](C& c, S const& v) { c.n_bins = to_count("n_bins", v); }},
        {"intervals",
         [](C& c, S const& v) { c.intervals = to_intervals("intervals", v); }},
        {"annuli",
         [](C& c, S const& v) { c.annuli = to_intervals("annuli", v); }},
        {"sampler_draws",
         [](C& c, S const& v) {
             c.sampler_draws = to_count("sampler_draws", v);
         }},
        {"write_rays",
         [](C& c, S const& v) { c.write_rays = to_bool("write_rays", v); }},
        {"trajectory_steps",
         [](C& c, S const& v) {
             c.trajectory_steps = to_count("trajectory_steps", v);
         }},
        {"y", [](C& c, S const& v) { c.y = to_double("y", v); }},
        {"eps", [](C& c, S const& v) { c.eps = to_double("eps", v); }},
        {"kernel", [](C& c, S const& v) { c.kernel = v; }},
        {"kernel_t",
         [](C& c, S const& v) { c.kernel_t = to_double("kernel_t", v); }},
        {"kernel_c",
         [](C& c, S const& v) { c.kernel_c = to_double("kernel_c", v); }},
        {"kernel_alpha",
         [](C& c, S const& v) {
             c.kernel_alpha = to_double("kernel_alpha", v);
         }},
        {"kernel_file", [](C& c, S const& v) { c.kernel_file = v; }},
        {"s_max", [](C& c, S const& v) { c.s_max = to_double("s_max", v); }},
        {"grid_step",
         [](C& c, S const& v) { c.grid_step = to_double("grid_step", v); }},
        {"tol", [](C& c, S const& v) { c.tol = to_double("tol", v); }},
        {"scheme", [](C& c, S const& v) { c.scheme = v; }},
        {"output_step",
         [](C& c, S const& v) { c.output_step = to_double("output_step", v); }},
        {"renewal_paths",
         [](C& c, S const& v) {
             c.renewal_paths = to_count("renewal_paths", v);
         }},
    };
    return table;
}
}  // namespace detail

//! Names of every accepted key, in sorted order
inline std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (auto const& kv : detail::setters())
        keys.push_back(kv.first);
    return keys;
}

//! Set one field from its text form; unknown keys are errors
inline void set_field(ExperimentConfig& cfg,
                      std::string const& key,
                      std::string const& value)
{
    auto const& table = detail::setters();
    auto it = table.find(key);
    if (it == table.end())
        throw ConfigError(key + ": unknown configuration key");
    it->second(cfg, detail::trim(value));
}

/*!
 * Parse "key = value" lines. Blank lines and '#' comments are skipped; a
 * key given twice is an error.
 */
inline void parse_config_text(std::string const& text, ExperimentConfig& cfg)
{
    std::istringstream is{text};
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(is, line))
    {
        ++lineno;
        if (auto const hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("line " + std::to_string(lineno)
                              + ": expected key = value");
        }
        std::string const key = detail::trim(line.substr(0, eq));
        if (auto [it, fresh] = seen.emplace(key, lineno); !fresh)
        {
            throw ConfigError(key + ": given twice (lines "
                              + std::to_string(it->second) + " and "
                              + std::to_string(lineno) + ")");
        }
        set_field(cfg, key, line.substr(eq + 1));
    }
}

inline ExperimentConfig load_config(std::string const& path)
{
    std::ifstream in{path};
    if (!in)
        throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg;
    parse_config_text(ss.str(), cfg);
    return cfg;
}

//---------------------------------------------------------------------------//
// DEFAULTS AND VALIDATION
//---------------------------------------------------------------------------//
namespace detail
{
inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}
}  // namespace detail

//! Fill unset fields with the experiment's desk-scale defaults
inline void apply_defaults(ExperimentConfig& c)
{
    auto const& e = c.experiment;
    if (c.run_name.empty())
        c.run_name = e;
    auto set_s = [&](std::vector<double> v) {
        if (c.s_values.empty())
            c.s_values = std::move(v);
    };
    auto set_n = [&](std::uint64_t n) {
        if (c.n_rays == 0)
            c.n_rays = n;
    };
    if (e == "simulate2d")
    {
        set_s({100, 1000});
        set_n(100000);
        if (c.t_grid.empty())
            c.t_grid = detail::linspace(0, 1, 11);
        if (c.v_grid.empty())
            c.v_grid = detail::linspace(0, 1, 11);
    }
    else if (e == "simulate3d")
    {
        if (c.stepper.empty())
            c.stepper = "3d";
        set_s({100});
        set_n(100000);
        if (c.r_grid.empty())
            c.r_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    }
    else if (e == "gamma")
    {
        if (c.stepper.empty())
            c.stepper = "3d";
        set_s({200});
        set_n(100000);
        if (c.n_ladders == 0)
            c.n_ladders = 1000000;
        if (c.t_grid.empty())
            c.t_grid = detail::linspace(0, 1, 21);
    }
    else if (e == "ladder")
    {
        if (c.stepper.empty())
            c.stepper = "3d";
        if (c.n_ladders == 0)
            c.n_ladders = 1000000;
    }
    else if (e == "renewal")
    {
        if (c.stepper.empty())
            c.stepper = "3d";
        set_n(10000);
        if (c.window_max == 0)
            c.window_max = 50;
        if (c.n_bins == 0)
            c.n_bins = 200;
    }
    else if (e == "occupation")
    {
        if (c.stepper.empty())
            c.stepper = "3d";
        set_s({100});
        set_n(10000);
        if (c.intervals.empty())
            c.intervals = {{-0.8, -0.2}, {-0.8, -0.5}, {-0.5, -0.2}};
    }
    else if (e == "brightness")
    {
        if (c.stepper.empty())
            c.stepper = "3d";
        set_s({100});
        set_n(10000);
        if (c.annuli.empty())
            c.annuli = {{0.2, 0.8}};
        if (c.n_bins == 0)
            c.n_bins = 64;
    }
    else if (e == "wh-solve")
    {
        if (c.kernel.empty())
            c.kernel = "u2d";
        if (c.s_max == 0)
            c.s_max = 1000;
        if (c.grid_step == 0)
            c.grid_step = 0.125;
    }
    else if (e == "eye")
    {
        set_s({1000});
        set_n(100000);
        if (c.t_grid.empty())
            c.t_grid = detail::linspace(0, 1, 11);
    }
    if (c.stepper.empty())
        c.stepper = "2d";
}

namespace detail
{
inline void check(bool ok, std::string const& msg)
{
    if (!ok)
        throw ConfigError(msg);
}

inline void check_unit_grid(std::vector<double> const& g, char const* key)
{
    for (double x : g)
        check(x >= 0 && x <= 1, std::string(key) + ": values must lie in [0, 1]");
}
}  // namespace detail

//! Field-level validation after defaults are applied
inline void validate(ExperimentConfig const& c)
{
    using detail::check;
    auto const& names = experiment_names();
    check(std::find(names.begin(), names.end(), c.experiment) != names.end(),
          "experiment: unknown experiment '" + c.experiment + "'");
    check(!c.output_dir.empty(), "output_dir: no output directory given");
    check(c.run_name.find('/') == std::string::npos && c.run_name != ".."
              && c.run_name != ".",
          "run_name: must be a plain directory name");
    for (double s : c.s_values)
        check(s > 0, "s_values: levels must be positive");
    check(c.block_size > 0, "block_size: must be positive");
    detail::check_unit_grid(c.t_grid, "t_grid");
    detail::check_unit_grid(c.v_grid, "v_grid");
    for (double r : c.r_grid)
        check(r > 0 && r <= 1, "r_grid: radii must lie in (0, 1]");
    check(c.stepper == "2d" || c.stepper == "3d",
          "stepper: must be 2d or 3d");
    auto const& e = c.experiment;
    bool const rays = e != "wh-solve" && e != "ladder";
    if (rays)
        check(c.n_rays > 0, "n_rays: must be positive");
    bool const needs_s = e == "simulate2d" || e == "simulate3d" || e == "gamma"
                         || e == "occupation" || e == "brightness" || e == "eye";
    if (needs_s)
        check(!c.s_values.empty(), "s_values: at least one level is required");
    if (e == "gamma" || e == "ladder")
        check(c.n_ladders > 0, "n_ladders: must be positive");
    if (e == "gamma" || e == "brightness" || e == "simulate3d")
        check(c.stepper == "3d", "stepper: " + e + " uses the 3d walk");
    if (e == "simulate2d" || e == "eye" || e == "wh-solve")
        check(c.stepper == "2d", "stepper: " + e + " uses the 2d walk");
    if (e == "renewal")
    {
        check(c.window_max > 0, "window_max: must be positive");
        check(c.n_bins > 0, "n_bins: must be positive");
    }
    if (e == "occupation")
    {
        for (auto [a, b] : c.intervals)
            check(-1 < a && a < b && b <= 0,
                  "intervals: need -1 < x1 < x2 <= 0 in units of s");
    }
    if (e == "brightness")
    {
        check(c.n_bins > 0, "n_bins: must be positive");
        for (auto [a, b] : c.annuli)
            check(0 < a && a <= b && b < 1, "annuli: need 0 < r1 <= r2 < 1");
    }
    if (e == "eye")
        check(c.eps > 0 && c.eps < c.y && c.y <= 1,
              "y, eps: need 0 < eps < y <= 1");
    if (e == "wh-solve")
    {
        check(c.kernel == "u2d" || c.kernel == "u2d-centered"
                  || c.kernel == "decay" || c.kernel == "zero"
                  || c.kernel == "tabulated",
              "kernel: unknown kernel '" + c.kernel + "'");
        if (c.kernel == "u2d" || c.kernel == "u2d-centered")
            check(c.kernel_t > 0 && c.kernel_t <= 1,
                  "kernel_t: must lie in (0, 1]");
        if (c.kernel == "tabulated")
            check(!c.kernel_file.empty(), "kernel_file: required for tabulated");
        check(c.s_max > 0, "s_max: must be positive");
        check(c.grid_step > 0, "grid_step: must be positive");
        check(c.tol > 0, "tol: must be positive");
        check(c.output_step > 0, "output_step: must be positive");
        check(c.scheme == "linear" || c.scheme == "quadratic",
              "scheme: must be linear or quadratic");
    }
}

//---------------------------------------------------------------------------//
/*!
 * Canonical text of the fields that determine outputs (everything except
 * output location and worker count). Two configs with the same canonical
 * text must produce byte-identical files.
 */
inline std::string canonical_text(ExperimentConfig const& c)
{
    std::ostringstream os;
    os.precision(17);
    auto list = [&](char const* k, std::vector<double> const& v) {
        os << k << '=';
        for (std::size_t i = 0; i < v.size(); ++i)
            os << (i ? "," : "") << v[i];
        os << '\n';
    };
    auto pairs = [&](char const* k, std::vector<Interval> const& v) {
        os << k << '=';
        for (std::size_t i = 0; i < v.size(); ++i)
            os << (i ? "," : "") << v[i].first << ':' << v[i].second;
        os << '\n';
    };
    os << "experiment=" << c.experiment << '\n';
    list("s_values", c.s_values);
    os << "n_rays=" << c.n_rays << '\n';
    os << "seed=" << c.seed << '\n';
    list("t_grid", c.t_grid);
    list("v_grid", c.v_grid);
    list("r_grid", c.r_grid);
    os << "max_steps=" << c.max_steps << '\n';
    os << "block_size=" << c.block_size << '\n';
    os << "stepper=" << c.stepper << '\n';
    os << "n_ladders=" << c.n_ladders << '\n';
    os << "window_max=" << c.window_max << '\n';
    os << "n_bins=" << c.n_bins << '\n';
    pairs("intervals", c.intervals);
    pairs("annuli", c.annuli);
    os << "sampler_draws=" << c.sampler_draws << '\n';
    os << "write_rays=" << (c.write_rays ? "true" : "false") << '\n';
    os << "trajectory_steps=" << c.trajectory_steps << '\n';
    os << "y=" << c.y << '\n';
    os << "eps=" << c.eps << '\n';
    os << "kernel=" << c.kernel << '\n';
    os << "kernel_t=" << c.kernel_t << '\n';
    os << "kernel_c=" << c.kernel_c << '\n';
    os << "kernel_alpha=" << c.kernel_alpha << '\n';
    os << "kernel_file=" << c.kernel_file << '\n';
    os << "s_max=" << c.s_max << '\n';
    os << "grid_step=" << c.grid_step << '\n';
    os << "tol=" << c.tol << '\n';
    os << "scheme=" << c.scheme << '\n';
    os << "output_step=" << c.output_step << '\n';
    os << "renewal_paths=" << c.renewal_paths << '\n';
    return os.str();
}

//---------------------------------------------------------------------------//
}  // namespace ltube::cli
