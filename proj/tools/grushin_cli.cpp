/*
 Copyright 2026 The grushin-mfg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// grushin_cli: reachability probes, value grids, trajectory solves and mean
// field game runs from a JSON config, a preset, or both.

#include "grushin/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace grushin;

namespace
{

/// Flags shared by every run subcommand.
struct Common
{
    std::string config_file;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> nx, nt, restarts, iters;
    std::optional<double> nu, T, t0;
    std::string target, source, x0;
    std::vector<std::string> params;
};

void add_common(CLI::App *app, Common &c)
{
    app->add_option("--config", c.config_file, "JSON config file (see README for the schema)");
    app->add_option("--preset", c.preset, "named example config (grushin_cli preset lists them)");
    app->add_option("--out", c.out, "output directory (default: $GRUSHIN_OUT or ./out)");
    app->add_option("--seed", c.seed, "random seed (default 0)");
    app->add_option("--nx", c.nx, "grid nodes per axis (default 64)");
    app->add_option("--nt", c.nt, "grid time steps (default 128)");
    app->add_option("--restarts", c.restarts, "multistart count of the direct solver (default 4)");
    app->add_option("--iters", c.iters, "fictitious-play iterations (default 200)");
    app->add_option("--nu", c.nu, "Grushin exponent (default 1)");
    app->add_option("--T", c.T, "horizon (default 1)");
    app->add_option("--t0", c.t0, "start time (default 0)");
    app->add_option("--target", c.target, "target point x1,x2");
    app->add_option("--source", c.source, "source point x1,x2");
    app->add_option("--x0", c.x0, "start point x1,x2");
    app->add_option("--param", c.params, "override any key: dotted.path=JSON (repeatable)");
}

json pair_json(const std::string &s, const std::string &flag)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw ConfigError("flag " + flag + " expects x1,x2");
    try
    {
        return json::array({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
    }
    catch (const std::exception &)
    {
        throw ConfigError("flag " + flag + " expects x1,x2");
    }
}

void set_path(json &j, const std::string &dotted, json v)
{
    json *cur = &j;
    std::size_t start = 0;
    for (;;)
    {
        const auto dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot - start);
        if (key.empty())
            throw ConfigError("flag --param: empty key in '" + dotted + "'");
        if (dot == std::string::npos)
        {
            (*cur)[key] = std::move(v);
            return;
        }
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

config::Overrides overrides(const Common &c)
{
    config::Overrides o;
    if (!c.preset.empty())
        o.preset = c.preset;
    if (!c.config_file.empty())
        o.file = c.config_file;
    json &p = o.patch;
    for (const auto &kv : c.params)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("flag --param expects path=JSON, got '" + kv + "'");
        json v;
        try
        {
            v = json::parse(kv.substr(eq + 1));
        }
        catch (const json::parse_error &)
        {
            v = kv.substr(eq + 1); // bare word: a string
        }
        set_path(p, kv.substr(0, eq), v);
    }
    if (!c.out.empty())
        p["out_dir"] = c.out;
    if (c.seed)
        p["seed"] = *c.seed;
    if (c.nx)
    {
        p["grid"]["nx1"] = *c.nx;
        p["grid"]["nx2"] = *c.nx;
    }
    if (c.nt)
        p["grid"]["nt"] = *c.nt;
    if (c.restarts)
        p["disc"]["n_restarts"] = *c.restarts;
    if (c.iters)
        p["mfg"]["iters"] = *c.iters;
    if (c.nu)
        p["nu"] = *c.nu;
    if (c.T)
        p["T"] = *c.T;
    if (c.t0)
        p["t0"] = *c.t0;
    if (!c.target.empty())
        p["reach"]["target"] = pair_json(c.target, "--target");
    if (!c.source.empty())
        p["reach"]["source"] = pair_json(c.source, "--source");
    if (!c.x0.empty())
        p["x0"] = pair_json(c.x0, "--x0");
    return o;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"State-constrained optimal control and mean field games under Grushin dynamics"};
    app.require_subcommand(1);

    Common common;
    std::function<cli::RunResult(const RunConfig &)> action;

    auto *reach = app.add_subcommand("reach", "reachability probes");
    reach->require_subcommand(1);
    struct Sub
    {
        const char *name, *help;
        cli::RunResult (*fn)(const RunConfig &);
    };
    for (const Sub &s : {Sub{"connect", "connector from --source (or x0) to --target", cli::reach_connect},
                         Sub{"sequence", "connectors from a sequence of sources approaching --target",
                             cli::reach_sequence},
                         Sub{"certify-cone", "cone apex unreachability evidence", cli::reach_certify_cone},
                         Sub{"modulus", "uniform modulus over random pairs", cli::reach_modulus}})
    {
        auto *sub = reach->add_subcommand(s.name, s.help);
        add_common(sub, common);
        sub->callback([&action, fn = s.fn] { action = fn; });
    }
    for (const Sub &s : {Sub{"value", "value function on a grid (u_grid.csv)", cli::value},
                         Sub{"ocp", "optimal trajectory from x0 (trajectory.csv, cost.json)", cli::ocp},
                         Sub{"certify", "reachability or unreachability certificate at --target", cli::certify}})
    {
        auto *sub = app.add_subcommand(s.name, s.help);
        add_common(sub, common);
        sub->callback([&action, fn = s.fn] { action = fn; });
    }
    auto *mfg = app.add_subcommand("mfg", "fictitious play and mild solution");
    add_common(mfg, common);
    mfg->callback([&action] { action = cli::mfg; });
    auto *mfg_run = mfg->add_subcommand("run", "same as mfg");
    add_common(mfg_run, common);
    mfg_run->callback([&action] { action = cli::mfg; });

    auto *pre = app.add_subcommand("preset", "list presets, or print one merged config");
    std::string preset_name;
    pre->add_option("name", preset_name, "preset to print");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kConfigError;
    }

    try
    {
        if (pre->parsed())
        {
            if (preset_name.empty())
            {
                for (const auto &n : config::preset_names())
                    std::cout << n << "\n";
                return 0;
            }
            json merged = config::defaults();
            config::detail::layer(merged, config::preset(preset_name));
            std::cout << merged.dump(2) << "\n";
            return 0;
        }
        const RunConfig rc = config::parse_config(overrides(common));
        return cli::run(rc, action, std::cout, std::cerr);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << "\n";
        return cli::kConfigError;
    }
}
