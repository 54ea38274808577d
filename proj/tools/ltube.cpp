//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tools/ltube.cpp
//! Command-line front end: one subcommand per experiment plus report.
//---------------------------------------------------------------------------//
#include <cstdlib>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "ltube/cli/config.hpp"
#include "ltube/cli/report.hpp"
#include "ltube/cli/run.hpp"

namespace
{
//---------------------------------------------------------------------------//
enum ExitCode
{
    exit_ok = 0,
    exit_error = 1,
    exit_config = 2,
    exit_partial = 3,
    exit_missing = 4
};

std::string default_output_dir()
{
    char const* env = std::getenv("LTUBE_OUTPUT_DIR");
    return env && *env ? env : "ltube-runs";
}

struct Invocation
{
    std::string experiment;  //!< empty: taken from the config file
    std::string config_path;
    std::map<std::string, std::string> flags;
};

//! Add --config and one --key flag per configuration field
void add_run_options(CLI::App* sub, Invocation& inv)
{
    sub->add_option("-c,--config", inv.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    for (auto const& key : ltube::cli::config_keys())
    {
        if (key == "experiment")
            continue;
        std::string dashed = key;
        for (auto& ch : dashed)
            if (ch == '_')
                ch = '-';
        std::string names = "--" + key;
        if (dashed != key)
            names += ",--" + dashed;
        sub->add_option_function<std::string>(
            names,
            [&inv, key](std::string const& v) { inv.flags[key] = v; },
            "override '" + key + "'");
    }
}

int do_run(Invocation const& inv)
{
    using namespace ltube::cli;
    ExperimentConfig cfg;
    if (!inv.config_path.empty())
        cfg = load_config(inv.config_path);
    if (!inv.experiment.empty())
    {
        if (!cfg.experiment.empty() && cfg.experiment != inv.experiment)
            throw ltube::ConfigError("experiment: config file names '"
                                     + cfg.experiment + "' but the command is '"
                                     + inv.experiment + "'");
        cfg.experiment = inv.experiment;
    }
    for (auto const& [k, v] : inv.flags)
        set_field(cfg, k, v);
    if (cfg.output_dir.empty())
        cfg.output_dir = default_output_dir();
    if (cfg.experiment.empty())
        throw ltube::ConfigError("experiment: not given");

    auto res = run(cfg, &std::cerr);
    std::cout << res.dir.string() << ": " << res.manifest["status"].get<std::string>()
              << " (" << res.manifest["wall_seconds"].get<double>() << " s)\n";
    return res.partial ? exit_partial : exit_ok;
}
}  // namespace

//---------------------------------------------------------------------------//
int main(int argc, char** argv)
{
    CLI::App app{"Lambertian tube Monte Carlo experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ltube::cli::version);

    Invocation inv;
    auto* generic = app.add_subcommand(
        "run", "Run the experiment named in the config file");
    add_run_options(generic, inv);
    generic->callback([&] {
        if (inv.config_path.empty())
            throw CLI::RequiredError("--config");
    });
    for (auto const& name : ltube::cli::experiment_names())
    {
        auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        add_run_options(sub, inv);
        sub->callback([&inv, name] { inv.experiment = name; });
    }

    std::string report_dir = default_output_dir();
    bool strict = false;
    auto* rep = app.add_subcommand("report", "Acceptance summary of finished runs");
    rep->add_option("dir", report_dir, "directory holding run subdirectories");
    rep->add_flag("--strict", strict, "exit 1 if any criterion fails");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (rep->parsed())
        {
            auto const rs = ltube::cli::evaluate(report_dir);
            bool any_fail = false;
            for (auto const& r : rs)
            {
                std::cout << ltube::cli::format_line(r) << '\n';
                any_fail = any_fail || r.verdict == ltube::cli::Verdict::fail;
            }
            return strict && any_fail ? exit_error : exit_ok;
        }
        return do_run(inv);
    }
    catch (ltube::ConfigError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (std::invalid_argument const& e)
    {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return exit_config;
    }
    catch (ltube::MissingArtifacts const& e)
    {
        std::cerr << "missing artifacts: " << e.what() << '\n';
        return exit_missing;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
}
