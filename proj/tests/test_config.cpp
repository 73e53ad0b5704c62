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

#include "grushin/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace grushin;
namespace fs = std::filesystem;

namespace
{

RunConfig from_preset(const std::string &name, json patch = json::object())
{
    config::Overrides o;
    o.preset = name;
    o.patch = std::move(patch);
    return config::parse_config(o);
}

std::string config_error(const std::function<void()> &f)
{
    try
    {
        f();
    }
    catch (const ConfigError &e)
    {
        return e.what();
    }
    return "<no error>";
}

std::string slurp(const fs::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name)
{
    fs::path p = fs::temp_directory_path() / ("grushin_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Presets, EveryNameParses)
{
    EXPECT_EQ(config::preset_names().size(), 6u);
    for (const auto &n : config::preset_names())
    {
        auto rc = from_preset(n);
        EXPECT_TRUE(rc.sigma().contains(rc.x0)) << n;
        EXPECT_EQ(rc.reach.sources.size(), 10u) << n;
    }
}

TEST(Presets, BandMatchesTheExampleSet)
{
    auto rc = from_preset("band-ex53");
    EXPECT_EQ(rc.nu, 1.0);
    const auto &s = rc.sigma();
    // 0 <= x1 <= 1, x1^2 <= x2 <= 1, lower curve included
    EXPECT_TRUE(s.contains({0.5, 0.25}));
    EXPECT_TRUE(s.contains({0.0, 0.0}));
    EXPECT_TRUE(s.contains({1.0, 1.0}));
    EXPECT_FALSE(s.contains({0.5, 0.2}));
    EXPECT_FALSE(s.contains({0.5, 1.01}));
    EXPECT_FALSE(s.contains({-0.01, 0.5}));
    ASSERT_EQ(s.witnesses().size(), 1u);
    EXPECT_EQ(s.witnesses()[0].family, CurveFamily::power_curve_pos);
    EXPECT_EQ(rc.mfg.m0.size(), 8u);
    EXPECT_TRUE(rc.mfg.m0.normalized(0.0));
}

TEST(Presets, ConeSlopes)
{
    auto rc = from_preset("cone-ex54");
    const auto *c = std::get_if<Cone>(&rc.sigma().shape());
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->m1, 1.0);
    EXPECT_EQ(c->m2, 2.0);
}

TEST(Presets, ConeHalfPlaneUnion)
{
    auto rc = from_preset("cone-halfplane-ex56");
    ASSERT_TRUE(std::holds_alternative<Union>(rc.sigma().shape()));
    EXPECT_TRUE(rc.sigma().contains({-50.0, -3.0})); // lower half-plane x2 <= 0
    EXPECT_TRUE(rc.sigma().contains({7.0, 0.0}));
    EXPECT_TRUE(rc.sigma().contains({1.0, 1.5}));  // cone
    EXPECT_FALSE(rc.sigma().contains({-1.0, 1.0}));
    EXPECT_EQ(rc.T, 5.0);
    EXPECT_EQ(rc.cost.ell({3.0, 0.0}, 0.0), -3.0);
    EXPECT_EQ(rc.cost.ell({30.0, 0.0}, 0.0), -10.0);
}

TEST(Config, UnknownKeysNameThePath)
{
    EXPECT_NE(config_error([] { from_preset("band-ex53", {{"grid", {{"bogus", 1}}}}); }).find("'grid.bogus'"),
              std::string::npos);
    EXPECT_NE(config_error([] { from_preset("band-ex53", {{"colour", 1}}); }).find("'colour'"), std::string::npos);
    json bad_set = {{"set", {{"type", "cone"}, {"m1", 1.0}, {"m2", 2.0}, {"m3", 3.0}}}};
    EXPECT_NE(config_error([&] { from_preset("band-ex53", bad_set); }).find("'set.m3'"), std::string::npos);
}

TEST(Config, TypeMismatchAndMissingKeys)
{
    EXPECT_NE(config_error([] { from_preset("band-ex53", {{"grid", {{"nx1", 3.5}}}}); }).find("'grid.nx1'"),
              std::string::npos);
    EXPECT_NE(config_error([] { from_preset("band-ex53", {{"nu", "one"}}); }).find("'nu'"), std::string::npos);
    EXPECT_NE(config_error([] { from_preset("band-ex53", {{"disc", nullptr}}); }).find("'disc'"),
              std::string::npos);
    EXPECT_NE(config_error([] { config::parse_config({}); }).find("'set'"), std::string::npos);
    json no_m2 = {{"set", {{"type", "cone"}, {"m1", 1.0}}}};
    EXPECT_NE(config_error([&] { from_preset("band-ex53", no_m2); }).find("'set.m2'"), std::string::npos);
    EXPECT_THROW(from_preset("no-such-preset"), ConfigError);
    // variant parameter checks surface as configuration errors
    json bad_cone = {{"set", {{"type", "cone"}, {"m1", 2.0}, {"m2", 1.0}}}};
    EXPECT_THROW(from_preset("band-ex53", bad_cone), ConfigError);
    EXPECT_THROW(from_preset("band-ex53", {{"nu", 0.0}}), ConfigError);
    EXPECT_THROW(from_preset("band-ex53", {{"T", -1.0}}), ConfigError);
}

TEST(Config, LayerOrder)
{
    const fs::path dir = scratch("layers");
    fs::create_directories(dir);
    io::write_file(dir / "c.json", R"({"T": 2.0, "grid": {"nx1": 9, "nx2": 9}})");
    config::Overrides o;
    o.preset = "band-ex53";
    o.file = dir / "c.json";
    o.patch = {{"grid", {{"nx2", 5}}}};
    auto rc = config::parse_config(o);
    EXPECT_EQ(rc.T, 2.0);          // file over defaults
    EXPECT_EQ(rc.grid.nx1, 9);     // file over defaults
    EXPECT_EQ(rc.grid.nx2, 5);     // flags over file
    EXPECT_EQ(rc.grid.nt, 128);    // defaults survive
    EXPECT_EQ(rc.sigma().witnesses().size(), 1u); // preset survives
    // a set in a later layer replaces the preset's set whole
    o.patch = {{"set", {{"type", "rectangle"}, {"a1", 0}, {"b1", 1}, {"a2", 0}, {"b2", 1}}}};
    auto rc2 = config::parse_config(o);
    EXPECT_TRUE(std::holds_alternative<Rectangle>(rc2.sigma().shape()));
    EXPECT_TRUE(rc2.sigma().witnesses().empty());
}

TEST(Config, OutputDirectoryFromEnvironment)
{
    ::setenv("GRUSHIN_OUT", "/tmp/somewhere", 1);
    EXPECT_EQ(from_preset("band-ex53").out_dir, fs::path("/tmp/somewhere"));
    EXPECT_EQ(from_preset("band-ex53", {{"out_dir", "here"}}).out_dir, fs::path("here"));
    ::unsetenv("GRUSHIN_OUT");
    EXPECT_EQ(from_preset("band-ex53").out_dir, fs::path("out"));
}

TEST(Config, FieldDescriptors)
{
    auto f = config::detail::field(json::parse(R"({"type": "affine", "coef": [1, 2, 3], "t": 4, "max": 10})"), "f");
    EXPECT_EQ(f({1.0, 1.0}, 0.5), 8.0);
    EXPECT_EQ(f({10.0, 1.0}, 0.0), 10.0);
    auto q = config::detail::field(json::parse(R"({"type": "quadratic", "center": [1, 0], "weight": 2, "value": 1})"),
                                   "q");
    EXPECT_EQ(q({2.0, 1.0}, 0.0), 5.0);
    EXPECT_EQ(config::detail::field(json(1.5), "c")({9, 9}, 9), 1.5);
    EXPECT_EQ(config::detail::field(json(nullptr), "z")({9, 9}, 9), 0.0);
    EXPECT_THROW(config::detail::field(json::parse(R"({"type": "cubic"})"), "x"), ConfigError);
    EXPECT_THROW(config::detail::field(json::parse(R"({"type": "affine", "coef": [1, 2]})"), "x"), ConfigError);
}

TEST(Config, CurvesAndWitnesses)
{
    auto c = config::detail::curve(json::parse(R"({"constant": 1, "terms": [{"coef": 2, "power": 3, "odd": true}]})"),
                                   "c");
    EXPECT_EQ(c(-1.0), -1.0);
    EXPECT_EQ(c(2.0), 17.0);
    auto s = config::detail::set(json::parse(R"({"type": "sublevel", "f": 0, "shift": [1, 2], "tol_member": 0,
        "witnesses": [{"x0": [1, 2], "family": "segment_vertical", "side": 1}]})"),
                                 "set");
    EXPECT_TRUE(s.contains({5.0, 2.0}));
    EXPECT_FALSE(s.contains({5.0, 1.999}));
    EXPECT_EQ(s.tol_member(), 0.0);
    EXPECT_THROW(config::detail::set(json::parse(R"({"type": "sublevel", "f": 0,
        "witnesses": [{"x0": [0, 0], "family": "spiral"}]})"),
                                     "set"),
                 ConfigError);
}

TEST(Io, RoundTripNumbers)
{
    EXPECT_EQ(io::num(0.1), "0.1");
    EXPECT_EQ(io::num(1.0), "1");
    EXPECT_EQ(io::num(-2.5e-300), "-2.5e-300");
    Rng rng(3);
    for (int i = 0; i < 1000; ++i)
    {
        const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform(-60, 60)));
        EXPECT_EQ(std::strtod(io::num(x).c_str(), nullptr), x);
    }
}

TEST(Io, TrajectoryAndCostSchemas)
{
    auto tr = integrate({0, 0}, ControlSignal::uniform(0, 1, {{1, 2}, {0, -1}}), 1.0);
    const std::string csv = io::trajectory_csv(tr);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,y1,y2,a1,a2");
    EXPECT_NE(csv.find("\n0,0,0,1,2\n"), std::string::npos);
    EXPECT_NE(csv.find("\n0.5,0.5,0.25,0,-1\n"), std::string::npos);
    CostSpec spec;
    const json c = io::cost_json(cost_breakdown(tr, spec, 0.0));
    for (const char *k : {"control_energy", "running", "terminal", "total"})
        EXPECT_TRUE(c.contains(k)) << k;
    const json h = io::hypotheses_json({WitnessReport{2, true, 0.0, true}});
    EXPECT_EQ(h[0].size(), 3u);
    EXPECT_EQ(h[0]["witness_index"], 2);
    EXPECT_EQ(h[0]["pass"], true);
    EXPECT_EQ(h[0]["max_violation"], 0.0);
}

TEST(Cli, ValueWritesGridAndIsDeterministic)
{
    const fs::path a = scratch("value_a"), b = scratch("value_b");
    std::ostringstream out, err;
    auto rc = from_preset("band-ex53", {{"out_dir", a.string()}});
    EXPECT_EQ(cli::run(rc, cli::value, out, err), 0);
    rc.out_dir = b;
    EXPECT_EQ(cli::run(rc, cli::value, out, err), 0);
    for (const char *f : {"u_grid.csv", "u_grid.json", "config.json"})
    {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_EQ(slurp(a / "u_grid.csv").substr(0, 9), "x1,x2,t,u");
    const json meta = json::parse(slurp(a / "u_grid.json"));
    EXPECT_EQ(meta["nx1"], 64);
    EXPECT_EQ(meta["nt"], 128);
    EXPECT_FALSE(fs::exists(a / "_FAILED"));
}

TEST(Cli, CertifyConeApex)
{
    const fs::path d = scratch("certify_cone");
    std::ostringstream out, err;
    auto rc = from_preset("cone-ex54", {{"out_dir", d.string()}, {"reach", {{"target", {0.0, 0.0}}}}});
    EXPECT_EQ(cli::run(rc, cli::certify, out, err), 0);
    const json c = json::parse(slurp(d / "certificate.json"));
    EXPECT_EQ(c["unreachable"], true);
    EXPECT_EQ(c["method"], "gronwall");
    EXPECT_GE(c["gronwall_min_ratio"].get<double>(), 1.0 - 1e-6);
    EXPECT_NE(out.str().find("unreachable"), std::string::npos);
}

TEST(Cli, CertifyBandReachability)
{
    const fs::path d = scratch("certify_band");
    std::ostringstream out, err;
    auto rc = from_preset("band-ex53", {{"out_dir", d.string()}});
    EXPECT_EQ(cli::run(rc, cli::certify, out, err), 0);
    const json c = json::parse(slurp(d / "certificate.json"));
    EXPECT_EQ(c["reachable"], true);
    EXPECT_GT(c["l2_fit"]["exponent"].get<double>(), 0.0);
    const json h = json::parse(slurp(d / "hypotheses.json"));
    EXPECT_EQ(h[0]["pass"], true);
}

TEST(Cli, FailuresLeaveAMarker)
{
    std::ostringstream out, err;
    // no witness at the union's origin: the sequence is not established
    const fs::path d1 = scratch("fail_probe");
    auto rc = from_preset("cone-halfplane-ex56", {{"out_dir", d1.string()}});
    EXPECT_EQ(cli::run(rc, cli::certify, out, err), 1);
    EXPECT_TRUE(fs::exists(d1 / "_FAILED"));
    // mfg without initial atoms is a configuration error
    const fs::path d2 = scratch("fail_config");
    auto rc2 = from_preset("rectangle-ex51", {{"out_dir", d2.string()}});
    EXPECT_EQ(cli::run(rc2, cli::mfg, out, err), 2);
    EXPECT_TRUE(fs::exists(d2 / "_FAILED"));
    EXPECT_NE(err.str().find("m0"), std::string::npos);
    // target outside the set is a domain error
    const fs::path d3 = scratch("fail_domain");
    auto rc3 = from_preset("band-ex53", {{"out_dir", d3.string()}, {"reach", {{"source", {0.5, 0.1}}}}});
    EXPECT_EQ(cli::run(rc3, cli::reach_connect, out, err), 2);
    // a later success clears the marker
    auto rc4 = from_preset("band-ex53", {{"out_dir", d3.string()}, {"reach", {{"source", {0.5, 0.5}}}}});
    EXPECT_EQ(cli::run(rc4, cli::reach_connect, out, err), 0);
    EXPECT_FALSE(fs::exists(d3 / "_FAILED"));
}

TEST(Cli, SmallMfgRunWritesAllArtifacts)
{
    const fs::path d = scratch("mfg");
    std::ostringstream out, err;
    auto rc = from_preset("band-ex53", {{"out_dir", d.string()},
                                        {"mfg", {{"iters", 2}}},
                                        {"grid", {{"nx1", 16}, {"nx2", 16}, {"nt", 16}}}});
    EXPECT_EQ(cli::run(rc, cli::mfg, out, err), 0);
    for (const char *f : {"mu_atoms.csv", "m_path.csv", "diagnostics.json", "u_grid.csv", "trajectories/traj_0.csv"})
        EXPECT_TRUE(fs::exists(d / f)) << f;
    const json diag = json::parse(slurp(d / "diagnostics.json"));
    EXPECT_EQ(diag["exploitability"].size(), 3u);
    EXPECT_EQ(slurp(d / "m_path.csv").substr(0, 9), "t,x1,x2,w");
    EXPECT_EQ(slurp(d / "mu_atoms.csv").substr(0, 21), "id,origin,count,weigh");
}
