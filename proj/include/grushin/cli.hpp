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

#ifndef GRUSHIN_CLI_HPP
#define GRUSHIN_CLI_HPP

#include "grushin/config.hpp"
#include "grushin/io.hpp"

#include <filesystem>
#include <functional>
#include <iostream>
#include <string>

namespace grushin::cli
{

namespace fs = std::filesystem;

enum ExitCode
{
    kOk = 0,
    kProbeFailed = 1,
    kConfigError = 2,
};

struct RunResult
{
    int exit_code = kOk;
    std::string summary;
};

/// The merged config without the output directory, so that two runs into
/// different directories write identical files.
inline void write_config_echo(const RunConfig &rc)
{
    json j = rc.raw;
    j.erase("out_dir");
    io::write_json(rc.out_dir / "config.json", j);
}

// ---------------------------------------------------------------------------
// reach

inline RunResult reach_connect(const RunConfig &rc)
{
    const Point src = rc.reach.source.value_or(rc.x0);
    auto r = connect(rc.sigma(), rc.nu, src, rc.reach.target, rc.reach.connect);
    json j = io::connect_json(r);
    j["source"] = io::point_json(src);
    j["target"] = io::point_json(rc.reach.target);
    io::write_json(rc.out_dir / "connect.json", j);
    io::write_file(rc.out_dir / "connector.csv", io::trajectory_csv(r.traj));
    const bool ok = r.endpoint_error <= 1e-7 && r.max_violation <= rc.sigma().tol_member();
    return {ok ? kOk : kProbeFailed, "connect: case " + to_string(r.case_tag) + " delta=" + io::num(r.delta) +
                                         " l2=" + io::num(r.control_l2) + " endpoint_error=" +
                                         io::num(r.endpoint_error)};
}

inline RunResult reach_sequence(const RunConfig &rc)
{
    auto s = verify_reachability_sequence(rc.sigma(), rc.nu, rc.reach.target, rc.reach.sources, rc.reach.delta_thr,
                                          rc.reach.l2_thr, rc.reach.connect);
    io::write_file(rc.out_dir / "sequence.csv", io::sequence_csv(rc.reach.sources, rc.reach.target, s));
    json j = io::sequence_json(s);
    j["target"] = io::point_json(rc.reach.target);
    io::write_json(rc.out_dir / "sequence.json", j);
    std::string tail = s.deltas.empty() ? std::string("no connector")
                                        : "last delta=" + io::num(s.deltas.back()) +
                                              " l2=" + io::num(s.l2norms.back());
    return {s.monotone_to_zero ? kOk : kProbeFailed,
            std::string("sequence: ") + (s.established ? "established, " : "not established, ") + tail};
}

/// Cone apex facts: the truncated straight-line cost blows up like 1/eps, and
/// y2 stays above the Gronwall bound on random admissible trajectories, so the
/// apex is only reached with infinite cost.
inline json cone_certificate(const RunConfig &rc, bool &holds)
{
    const auto &set = rc.sigma();
    Rng rng(rc.seed);
    double min_ratio = kInf;
    std::size_t trials = 0;
    for (int i = 0; i < rc.reach.n_trials; ++i)
    {
        bool found = false;
        Point x = grushin::detail::sample_member(set, rng, found);
        if (!found || !(x.x2 > 0.0))
            continue;
        auto tr = random_admissible_trajectory(set, x, 1.0, 32, rc.nu, 2.0, rng);
        min_ratio = std::min(min_ratio, cone_gronwall_bound(set, tr).observed_min_ratio);
        ++trials;
    }
    std::vector<double> costs;
    json table = json::array();
    for (double e : rc.reach.eps)
    {
        costs.push_back(truncated_cone_cost(rc.x0, e));
        table.push_back({{"eps", e}, {"cost", costs.back()}});
    }
    const auto fit = fit_power(rc.reach.eps, costs);
    holds = trials > 0 && min_ratio >= 1.0 - 1e-6 && fit.exponent < 0.0;
    return {{"target", io::point_json(rc.reach.target)},
            {"unreachable", holds},
            {"method", "gronwall"},
            {"gronwall_trials", trials},
            {"gronwall_min_ratio", trials ? min_ratio : 0.0},
            {"x0", io::point_json(rc.x0)},
            {"truncated_cost", table},
            {"cost_fit", io::fit_json(fit)}};
}

inline RunResult reach_certify_cone(const RunConfig &rc)
{
    bool holds = false;
    const json c = cone_certificate(rc, holds);
    io::write_json(rc.out_dir / "cone_certificate.json", c);
    return {holds ? kOk : kProbeFailed, "certify-cone: gronwall min ratio " + io::num(c["gronwall_min_ratio"].get<double>()) +
                                            ", cost slope " + io::num(c["cost_fit"]["exponent"].get<double>())};
}

/// Random pairs of members at distance <= pair_radius.
inline std::vector<std::pair<Point, Point>> random_pairs(const ConstraintSet &set, int n, double radius, Rng &rng)
{
    std::vector<std::pair<Point, Point>> pairs;
    for (int tries = 0; static_cast<int>(pairs.size()) < n && tries < 1000 * n; ++tries)
    {
        bool fa = false, fb = false;
        const Point a = grushin::detail::sample_member(set, rng, fa);
        if (!fa)
            continue;
        Point b = a + Point{rng.uniform(-radius, radius), rng.uniform(-radius, radius)};
        fb = set.contains(b) && distance(a, b) > 0.0;
        if (fb)
            pairs.push_back({a, b});
    }
    if (static_cast<int>(pairs.size()) < n)
        throw ConfigError("modulus: could not sample enough pairs of members");
    return pairs;
}

inline RunResult reach_modulus(const RunConfig &rc)
{
    Rng rng(rc.seed);
    auto pairs = random_pairs(rc.sigma(), rc.reach.n_pairs, rc.reach.pair_radius, rng);
    auto m = uniform_modulus_probe(rc.sigma(), rc.nu, pairs, rc.reach.connect);
    io::write_file(rc.out_dir / "modulus.csv", io::modulus_csv(m));
    io::write_json(rc.out_dir / "modulus.json",
                   {{"delta_fit", io::fit_json(m.delta_fit)}, {"l2_fit", io::fit_json(m.l2_fit)},
                    {"dominated", m.dominated}});
    return {m.dominated ? kOk : kProbeFailed, "modulus: delta ~ d^" + io::num(m.delta_fit.exponent) +
                                                  ", l2 ~ d^" + io::num(m.l2_fit.exponent)};
}

// ---------------------------------------------------------------------------
// single-agent problems

inline RunResult value(const RunConfig &rc)
{
    auto vg = value_grid_backward(rc.sigma(), rc.nu, rc.cost, rc.grid);
    io::write_file(rc.out_dir / "u_grid.csv", io::value_grid_csv(vg));
    io::write_json(rc.out_dir / "u_grid.json", io::value_grid_json(vg));
    const auto u = vg.value_at(rc.x0, rc.t0);
    return {kOk, "value: u(x0, t0) = " + (u ? io::num(*u) : std::string("n/a"))};
}

inline RunResult ocp(const RunConfig &rc)
{
    auto sol = solve_trajectory(rc.x0, rc.t0, rc.sigma(), rc.nu, rc.cost, rc.disc);
    io::write_file(rc.out_dir / "trajectory.csv", io::trajectory_csv(sol.traj));
    json j = io::cost_json(cost_breakdown(sol.traj, rc.cost, rc.t0));
    j["value"] = sol.value;
    j["converged"] = sol.converged;
    j["residual"] = sol.residual;
    j["multistart_spread"] = sol.multistart_spread;
    j["max_violation"] = sol.max_violation;
    j["restart_values"] = sol.restart_values;
    io::write_json(rc.out_dir / "cost.json", j);
    return {kOk, "ocp: value " + io::num(sol.value) + (sol.converged ? "" : " (not converged)")};
}

// ---------------------------------------------------------------------------
// mean field game

inline RunResult mfg(const RunConfig &rc)
{
    if (rc.mfg.m0.size() == 0)
        throw ConfigError("config: missing key 'm0' (initial atoms [[x1, x2, w], ...])");
    auto res = fictitious_play(rc.mfg.m0, rc.sigma(), rc.nu, rc.coupling, rc.mfg.fp);
    io::write_measure(rc.out_dir, res.mu, res.diag);
    auto ms = mild_solution_extract(res.mu, rc.sigma(), rc.nu, rc.coupling, rc.grid);
    io::write_file(rc.out_dir / "m_path.csv", io::measure_path_csv(ms.u.times, ms.path));
    io::write_file(rc.out_dir / "u_grid.csv", io::value_grid_csv(ms.u));
    io::write_json(rc.out_dir / "u_grid.json", io::value_grid_json(ms.u));
    const double e = res.diag.exploitability.empty() ? 0.0 : res.diag.exploitability.back();
    return {res.diag.failure.empty() ? kOk : kProbeFailed,
            "mfg: " + std::to_string(res.diag.iterations) + " iterations, " + std::to_string(res.mu.size()) +
                " atoms, exploitability " + io::num(e)};
}

// ---------------------------------------------------------------------------
// certify

inline bool is_cone_apex(const ConstraintSet &set, Point target)
{
    return std::holds_alternative<Cone>(set.shape()) && set.shift() == Point{} && target == Point{};
}

/// Cone apex: unreachability certificate. Elsewhere: witness hypotheses and
/// the reachability sequence. Reachability is certified when every source
/// connects and both delta and ||alpha||_2 fit a positive power of the
/// distance (they vanish as the sources approach the target); the fixed
/// thresholds of the sequence are reported alongside.
inline RunResult certify(const RunConfig &rc)
{
    if (is_cone_apex(rc.sigma(), rc.reach.target))
    {
        bool holds = false;
        const json c = cone_certificate(rc, holds);
        io::write_json(rc.out_dir / "certificate.json", c);
        return {holds ? kOk : kProbeFailed,
                std::string("certify: apex ") + (holds ? "unreachable (gronwall bound)" : "not certified")};
    }
    std::vector<WitnessReport> hyp;
    if (!rc.sigma().witnesses().empty())
        hyp = verify_hypotheses(rc.sigma(), rc.nu, rc.reach.hyp_step);
    io::write_json(rc.out_dir / "hypotheses.json", io::hypotheses_json(hyp));
    auto s = verify_reachability_sequence(rc.sigma(), rc.nu, rc.reach.target, rc.reach.sources, rc.reach.delta_thr,
                                          rc.reach.l2_thr, rc.reach.connect);
    io::write_file(rc.out_dir / "sequence.csv", io::sequence_csv(rc.reach.sources, rc.reach.target, s));
    bool hyp_ok = true;
    for (const auto &h : hyp)
        hyp_ok = hyp_ok && h.pass;
    PowerFit df, lf;
    if (s.established)
    {
        std::vector<double> d;
        for (std::size_t k = 0; k < s.deltas.size(); ++k)
            d.push_back(distance(rc.reach.sources[k], rc.reach.target));
        df = fit_power(d, s.deltas);
        lf = fit_power(d, s.l2norms);
    }
    const bool vanishing = s.established && df.exponent > 0.0 && lf.exponent > 0.0;
    const bool reachable = vanishing && hyp_ok;
    json c{{"target", io::point_json(rc.reach.target)},
           {"reachable", reachable},
           {"method", "connector_sequence"},
           {"hypotheses_pass", hyp_ok},
           {"delta_fit", io::fit_json(df)},
           {"l2_fit", io::fit_json(lf)},
           {"below_thresholds", s.monotone_to_zero},
           {"sequence", io::sequence_json(s)}};
    io::write_json(rc.out_dir / "certificate.json", c);
    return {reachable ? kOk : kProbeFailed,
            std::string("certify: reachability ") + (reachable ? "established" : "not established") +
                (s.failure.empty() ? "" : " (" + s.failure + ")")};
}

// ---------------------------------------------------------------------------

/// Runs `fn` with the error-to-exit-code mapping, the `_FAILED` marker and
/// the one-line summary.
inline int run(const RunConfig &rc, const std::function<RunResult(const RunConfig &)> &fn, std::ostream &out,
               std::ostream &err)
{
    RunResult r;
    try
    {
        fs::create_directories(rc.out_dir);
        fs::remove(rc.out_dir / "_FAILED");
        write_config_echo(rc);
        r = fn(rc);
    }
    catch (const ConfigError &e)
    {
        r = {kConfigError, std::string("configuration error: ") + e.what()};
    }
    catch (const DomainError &e)
    {
        r = {kConfigError, std::string("domain error: ") + e.what()};
    }
    catch (const UnsupportedError &e)
    {
        r = {kConfigError, std::string("unsupported configuration: ") + e.what()};
    }
    catch (const std::exception &e)
    {
        r = {kProbeFailed, std::string("error: ") + e.what()};
    }
    if (r.exit_code != kOk)
    {
        std::error_code ec;
        fs::create_directories(rc.out_dir, ec);
        std::ofstream(rc.out_dir / "_FAILED") << r.summary << "\n";
        err << r.summary << " [" << rc.out_dir.string() << "]\n";
    }
    else
        out << r.summary << " [" << rc.out_dir.string() << "]\n";
    return r.exit_code;
}

} // namespace grushin::cli

#endif // GRUSHIN_CLI_HPP
