//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file cli.test.cc
//---------------------------------------------------------------------------//
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ltube/cli/config.hpp"
#include "ltube/cli/output.hpp"
#include "ltube/cli/report.hpp"
#include "ltube/cli/run.hpp"

namespace ltube
{
namespace cli
{
namespace test
{
//---------------------------------------------------------------------------//
// HELPERS
//---------------------------------------------------------------------------//
fs::path scratch(std::string const& name)
{
    fs::path p = fs::path(::testing::TempDir()) / ("ltube-cli-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig config(std::string const& text, fs::path const& out)
{
    ExperimentConfig c;
    parse_config_text(text, c);
    c.output_dir = out.string();
    return c;
}

std::vector<std::string> read_lines(fs::path const& p)
{
    std::ifstream in{p};
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

//---------------------------------------------------------------------------//
// CONFIGURATION
//---------------------------------------------------------------------------//
TEST(ConfigTest, parse)
{
    ExperimentConfig c;
    parse_config_text(R"(
# comment line
experiment = occupation
s_values = 100, 1000   # trailing comment
n_rays = 1e5
seed = 7
workers = auto
intervals = -0.8:-0.2, -0.5:-0.2
write_rays = false
)",
                      c);
    EXPECT_EQ("occupation", c.experiment);
    EXPECT_EQ((std::vector<double>{100, 1000}), c.s_values);
    EXPECT_EQ(100000u, c.n_rays);
    EXPECT_EQ(7u, c.seed);
    EXPECT_EQ(0u, c.workers);
    ASSERT_EQ(2u, c.intervals.size());
    EXPECT_EQ((Interval{-0.8, -0.2}), c.intervals[0]);
    EXPECT_FALSE(c.write_rays);
}

TEST(ConfigTest, parse_errors)
{
    ExperimentConfig c;
    EXPECT_THROW(parse_config_text("bogus = 1", c), ConfigError);
    EXPECT_THROW(parse_config_text("seed = 1\nseed = 2", c), ConfigError);
    EXPECT_THROW(parse_config_text("seed 1", c), ConfigError);
    EXPECT_THROW(parse_config_text("n_rays = ten", c), ConfigError);
    EXPECT_THROW(parse_config_text("n_rays = 1.5", c), ConfigError);
    EXPECT_THROW(parse_config_text("n_rays = -3", c), ConfigError);
    EXPECT_THROW(parse_config_text("write_rays = maybe", c), ConfigError);
    EXPECT_THROW(parse_config_text("intervals = -0.5", c), ConfigError);
    EXPECT_THROW(parse_config_text("tol = nan", c), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/ltube.cfg"), ConfigError);
}

TEST(ConfigTest, defaults)
{
    ExperimentConfig c;
    c.experiment = "gamma";
    apply_defaults(c);
    EXPECT_EQ("gamma", c.run_name);
    EXPECT_EQ("3d", c.stepper);
    EXPECT_EQ((std::vector<double>{200}), c.s_values);
    EXPECT_EQ(21u, c.t_grid.size());

    ExperimentConfig w;
    w.experiment = "wh-solve";
    apply_defaults(w);
    EXPECT_EQ("u2d", w.kernel);
    EXPECT_EQ(1000.0, w.s_max);
    EXPECT_EQ(0.125, w.grid_step);
}

TEST(ConfigTest, validation)
{
    auto check = [](std::string const& text) {
        ExperimentConfig c;
        parse_config_text(text, c);
        c.output_dir = "out";
        apply_defaults(c);
        validate(c);
    };
    EXPECT_NO_THROW(check("experiment = simulate2d"));
    EXPECT_THROW(check("experiment = nope"), ConfigError);
    EXPECT_THROW(check("experiment = simulate2d\nstepper = 3d"), ConfigError);
    EXPECT_THROW(check("experiment = gamma\nstepper = 2d"), ConfigError);
    EXPECT_THROW(check("experiment = simulate2d\ns_values = 0"), ConfigError);
    EXPECT_THROW(check("experiment = simulate2d\nt_grid = 0, 1.5"), ConfigError);
    EXPECT_THROW(check("experiment = simulate3d\nr_grid = 0"), ConfigError);
    EXPECT_THROW(check("experiment = eye\ny = 0.05\neps = 0.1"), ConfigError);
    EXPECT_THROW(check("experiment = wh-solve\nkernel = bogus"), ConfigError);
    EXPECT_THROW(check("experiment = wh-solve\nkernel_t = 0"), ConfigError);
    EXPECT_THROW(check("experiment = wh-solve\nkernel = tabulated"), ConfigError);
    EXPECT_THROW(check("experiment = wh-solve\nscheme = cubic"), ConfigError);
    EXPECT_THROW(check("experiment = occupation\nintervals = -0.2:-0.8"),
                 ConfigError);
    EXPECT_THROW(check("experiment = brightness\nannuli = 0.5:1.2"), ConfigError);
    EXPECT_THROW(check("experiment = renewal\nrun_name = ../x"), ConfigError);

    ExperimentConfig c;
    c.experiment = "simulate2d";
    apply_defaults(c);
    EXPECT_THROW(validate(c), ConfigError);  // no output directory
}

TEST(ConfigTest, canonical_text)
{
    ExperimentConfig a, b;
    parse_config_text("experiment = simulate2d\nseed = 3", a);
    parse_config_text("experiment = simulate2d\nseed = 3\nworkers = 4", b);
    a.output_dir = "x";
    b.output_dir = "y";
    apply_defaults(a);
    apply_defaults(b);
    EXPECT_EQ(canonical_text(a), canonical_text(b));
    b.seed = 4;
    EXPECT_NE(canonical_text(a), canonical_text(b));
}

//---------------------------------------------------------------------------//
// OUTPUT
//---------------------------------------------------------------------------//
TEST(OutputTest, round_trip_doubles)
{
    EXPECT_EQ("0.10000000000000001", format_double(0.1));
    Xoshiro256pp rng{1, 0};
    for (int i = 0; i < 10000; ++i)
    {
        double const x = std::ldexp(generate_open_unit(rng) - 0.5,
                                    static_cast<int>(rng() % 200) - 100);
        ASSERT_EQ(x, std::strtod(format_double(x).c_str(), nullptr));
    }
}

TEST(OutputTest, csv)
{
    auto dir = scratch("csv");
    {
        CsvWriter w{dir / "a.csv", {"s", "n", "name"}};
        w.row({1.5, std::int64_t{-2}, std::string{"x"}});
        w.row({0.1, std::uint64_t{3}, std::string{"y"}});
        EXPECT_THROW(w.row({1.0}), std::invalid_argument);
    }
    auto lines = read_lines(dir / "a.csv");
    ASSERT_EQ(3u, lines.size());
    EXPECT_EQ("s,n,name", lines[0]);
    EXPECT_EQ("1.5,-2,x", lines[1]);
    EXPECT_EQ("0.10000000000000001,3,y", lines[2]);
}

TEST(OutputTest, digests)
{
    EXPECT_EQ("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
              sha256_text("abc"));
    auto dir = scratch("digest");
    {
        std::ofstream out{dir / "abc.txt", std::ios::binary};
        out << "abc";
    }
    EXPECT_EQ(sha256_text("abc"), sha256_file(dir / "abc.txt"));
}

//---------------------------------------------------------------------------//
// RUNS
//---------------------------------------------------------------------------//
TEST(RunTest, simulate2d_reproducible)
{
    auto dir = scratch("sim2d");
    auto c = config("experiment = simulate2d\ns_values = 100\nn_rays = 1000\n"
                    "seed = 7\nworkers = 1",
                    dir);
    c.run_name = "a";
    auto a = run(c);
    c.run_name = "b";
    auto b = run(c);
    c.run_name = "c";
    c.workers = 4;
    auto w4 = run(c);

    auto const& m = a.manifest;
    EXPECT_TRUE(m["status"] == "complete" || m["status"] == "partial");
    EXPECT_EQ("simulate2d", m["experiment"]);
    EXPECT_EQ(m["config_digest"], b.manifest["config_digest"]);
    EXPECT_EQ(m["config_digest"], w4.manifest["config_digest"]);
    EXPECT_EQ(m["outputs"], b.manifest["outputs"]);
    EXPECT_EQ(m["outputs"], w4.manifest["outputs"]);
    EXPECT_FALSE(m["outputs"].empty());
    EXPECT_FALSE(m["stream_bases"].empty());
    EXPECT_FALSE(m["censoring"].empty());
    EXPECT_EQ(1000, m["metrics"]["levels"][0]["n_rays"]);

    // The manifest on disk is the final one
    auto disk = read_json(a.dir / manifest_name);
    EXPECT_EQ(m, disk);
    for (auto const& o : m["outputs"])
    {
        auto const p = a.dir / o["file"].get<std::string>();
        EXPECT_EQ(o["sha256"], sha256_file(p));
        EXPECT_EQ(o["bytes"], fs::file_size(p));
    }
}

TEST(RunTest, partial_when_censored)
{
    auto dir = scratch("partial");
    auto c = config("experiment = simulate2d\ns_values = 50\nn_rays = 200\n"
                    "max_steps = 10",
                    dir);
    auto r = run(c);
    EXPECT_TRUE(r.partial);
    EXPECT_EQ("partial", r.manifest["status"]);
}

TEST(RunTest, gamma_csv)
{
    auto dir = scratch("gamma");
    auto c = config("experiment = gamma\ns_values = 30\nn_rays = 500\n"
                    "n_ladders = 2000\nt_grid = 0, 0.05, 0.1, 0.15, 0.2, 0.25, "
                    "0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, "
                    "0.85, 0.9, 0.95, 1",
                    dir);
    auto r = run(c);
    auto lines = read_lines(r.dir / "gamma.csv");
    ASSERT_EQ(22u, lines.size());
    EXPECT_EQ("t,gamma_direct,gamma_formula,se_direct,se_formula", lines[0]);
    EXPECT_EQ(0, lines[1].rfind("0,", 0));
    EXPECT_EQ(0, lines[21].rfind("1,1,", 0));
}

TEST(RunTest, wh_solve)
{
    auto dir = scratch("wh");
    auto c = config("experiment = wh-solve\nkernel = u2d\nkernel_t = 0.5\n"
                    "s_max = 20\noutput_step = 0.5",
                    dir);
    auto r = run(c);
    auto lines = read_lines(r.dir / "solution.csv");
    ASSERT_EQ(42u, lines.size());
    EXPECT_EQ("s,W", lines[0]);
    auto const& met = r.manifest["metrics"];
    EXPECT_LT(met["residual"].get<double>(), 1e-6);
    EXPECT_GT(met["n_nodes"].get<double>(), 100);
    EXPECT_EQ("u2d", met["kernel"]);
}

TEST(RunTest, tabulated_kernel)
{
    auto dir = scratch("tab");
    {
        std::ofstream k{dir / "kernel.csv"};
        k << "s,g\n0,0.5\n1,0.2\n5,0\n";
    }
    auto c = config("experiment = wh-solve\nkernel = tabulated\ns_max = 10", dir);
    c.kernel_file = (dir / "kernel.csv").string();
    auto r = run(c);
    EXPECT_EQ("complete", r.manifest["status"]);

    c.kernel_file = (dir / "missing.csv").string();
    c.run_name = "missing";
    EXPECT_THROW(run(c), ConfigError);
    auto m = read_json(dir / "missing" / manifest_name);
    EXPECT_EQ("failed", m["status"]);
    EXPECT_TRUE(m.contains("error"));
}

TEST(RunTest, every_experiment_runs)
{
    auto dir = scratch("all");
    std::vector<std::string> const texts{
        "experiment = simulate3d\ns_values = 20\nn_rays = 300\nsampler_draws = 1000",
        "experiment = ladder\nn_ladders = 1000",
        "experiment = renewal\nn_rays = 200\nwindow_max = 20",
        "experiment = occupation\ns_values = 20\nn_rays = 200",
        "experiment = brightness\ns_values = 20\nn_rays = 200",
        "experiment = eye\ns_values = 30\nn_rays = 5000",
    };
    for (auto const& t : texts)
    {
        auto r = run(config(t, dir));
        EXPECT_TRUE(r.manifest["status"] == "complete"
                    || r.manifest["status"] == "partial")
            << t;
        EXPECT_FALSE(r.manifest["outputs"].empty()) << t;
    }
}

//---------------------------------------------------------------------------//
// REPORT
//---------------------------------------------------------------------------//
TEST(ReportTest, missing_artifacts)
{
    auto dir = scratch("empty");
    EXPECT_THROW(evaluate(dir), MissingArtifacts);
    EXPECT_THROW(evaluate(dir / "nope"), MissingArtifacts);
}

TEST(ReportTest, partial_suite)
{
    auto dir = scratch("suite");
    auto c = config("experiment = wh-solve\ns_max = 20", dir);
    run(c);
    auto rs = evaluate(dir);
    ASSERT_EQ(12u, rs.size());
    for (int i = 0; i < 12; ++i)
        EXPECT_EQ(i + 1, rs[static_cast<std::size_t>(i)].id);
    EXPECT_EQ(Verdict::not_run, rs[0].verdict);
    EXPECT_EQ(0, format_line(rs[0]).rfind("[NOT RUN] 1. ", 0));
    auto text = report(dir);
    EXPECT_NE(std::string::npos, text.find("not run"));
}

//---------------------------------------------------------------------------//
}  // namespace test
}  // namespace cli
}  // namespace ltube
