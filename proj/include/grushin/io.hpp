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

#ifndef GRUSHIN_IO_HPP
#define GRUSHIN_IO_HPP

#include "grushin/dynamics.hpp"
#include "grushin/geometry.hpp"
#include "grushin/mfg.hpp"
#include "grushin/ocp.hpp"
#include "grushin/reachability.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace grushin::io
{

using json = nlohmann::json;

/// Shortest decimal that reads back to the same double.
inline std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Plain CSV table; numbers are written with num().
class Csv
{
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size())
    {
        row_strings(header);
    }

    Csv &row(std::initializer_list<double> v)
    {
        std::vector<std::string> s;
        for (double x : v)
            s.push_back(num(x));
        return row_strings(s);
    }

    Csv &row_strings(const std::vector<std::string> &v)
    {
        if (v.size() != cols_)
            throw InternalError("csv: row width differs from header");
        for (std::size_t i = 0; i < v.size(); ++i)
            out_ << (i ? "," : "") << v[i];
        out_ << '\n';
        return *this;
    }

    std::string str() const { return out_.str(); }

private:
    std::size_t cols_;
    std::ostringstream out_;
};

inline void write_file(const std::filesystem::path &p, const std::string &text)
{
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + p.string());
    f << text;
}

/// nlohmann/json prints doubles with a shortest round-trip algorithm; NaN and
/// infinities have no JSON form and become null.
inline void write_json(const std::filesystem::path &p, const json &j) { write_file(p, j.dump(2) + "\n"); }

inline json point_json(Point p) { return json::array({p.x1, p.x2}); }

// ---------------------------------------------------------------------------
// Trajectories and costs

/// Header t,y1,y2,a1,a2; the control on each row is the one on the step that
/// starts there (the last row repeats the last piece).
inline std::string trajectory_csv(const Trajectory &tr)
{
    Csv c({"t", "y1", "y2", "a1", "a2"});
    for (std::size_t i = 0; i < tr.times.size(); ++i)
    {
        ControlValue a;
        if (!tr.control.values.empty())
            a = i + 1 < tr.times.size() ? tr.control_on_step(i) : tr.control.values.back();
        c.row({tr.times[i], tr.states[i].x1, tr.states[i].x2, a.a1, a.a2});
    }
    return c.str();
}

inline json cost_json(const CostBreakdown &c)
{
    return {{"control_energy", c.control_energy}, {"running", c.running}, {"terminal", c.terminal}, {"total", c.total}};
}

inline json hypotheses_json(const std::vector<WitnessReport> &reps)
{
    json a = json::array();
    for (const auto &r : reps)
        a.push_back({{"witness_index", r.witness_index}, {"pass", r.pass}, {"max_violation", r.max_violation}});
    return a;
}

// ---------------------------------------------------------------------------
// Reachability

inline json connect_json(const ConnectResult &r)
{
    json j{{"case", to_string(r.case_tag)},
           {"delta", r.delta},
           {"control_l2", r.control_l2},
           {"endpoint_error", r.endpoint_error},
           {"max_violation", r.max_violation},
           {"reversed", r.reversed}};
    j["witness_index"] = r.witness_index ? json(*r.witness_index) : json(nullptr);
    return j;
}

inline std::string sequence_csv(const std::vector<Point> &sources, Point target, const SequenceReport &s)
{
    Csv c({"k", "distance", "delta", "l2", "endpoint_error", "max_violation", "case"});
    for (std::size_t k = 0; k < s.deltas.size(); ++k)
        c.row_strings({std::to_string(k + 1), num(distance(sources[k], target)), num(s.deltas[k]), num(s.l2norms[k]),
                       num(s.endpoint_errors[k]), num(s.max_violations[k]), s.case_tags[k]});
    return c.str();
}

inline json sequence_json(const SequenceReport &s)
{
    return {{"established", s.established}, {"monotone_to_zero", s.monotone_to_zero}, {"deltas", s.deltas},
            {"l2norms", s.l2norms},         {"failure", s.failure}};
}

inline std::string modulus_csv(const ModulusReport &m)
{
    Csv c({"a1", "a2", "b1", "b2", "distance", "delta", "l2", "connected"});
    for (const auto &p : m.pairs)
        c.row({p.a.x1, p.a.x2, p.b.x1, p.b.x2, p.distance, p.delta, p.l2, p.connected ? 1.0 : 0.0});
    return c.str();
}

inline json fit_json(const PowerFit &f)
{
    return {{"exponent", f.exponent},
            {"log_coef", f.log_coef},
            {"r_squared", f.r_squared},
            {"dominating_coef", f.dominating_coef}};
}

// ---------------------------------------------------------------------------
// Value grids

/// Rows x1,x2,t,u for feasible nodes, time-major.
inline std::string value_grid_csv(const ValueGrid &vg)
{
    Csv c({"x1", "x2", "t", "u"});
    for (std::size_t k = 0; k < vg.times.size(); ++k)
        for (std::size_t n = 0; n < vg.feasible.size(); ++n)
            if (vg.feasible[n])
            {
                const Point p = vg.point(n);
                c.row({p.x1, p.x2, vg.times[k], vg.values[k][n]});
            }
    return c.str();
}

inline json value_grid_json(const ValueGrid &vg)
{
    const Box b = *vg.spec.box;
    std::size_t nf = 0;
    for (auto f : vg.feasible)
        nf += f;
    return {{"nx1", vg.nx1()},
            {"nx2", vg.nx2()},
            {"nt", vg.times.size() - 1},
            {"T", vg.times.back()},
            {"box", {b.x1_lo, b.x1_hi, b.x2_lo, b.x2_hi}},
            {"nu", vg.nu},
            {"a_max", vg.a_max},
            {"n_r", vg.spec.n_r},
            {"n_theta", vg.spec.n_theta},
            {"feasible_nodes", nf}};
}

// ---------------------------------------------------------------------------
// Mean field game

inline std::string mu_atoms_csv(const TrajectoryMeasure &mu)
{
    Csv c({"id", "origin", "count", "weight"});
    for (std::size_t a = 0; a < mu.size(); ++a)
        c.row_strings({std::to_string(a), std::to_string(mu.atoms[a].origin), std::to_string(mu.atoms[a].count),
                       num(mu.weight(a))});
    return c.str();
}

inline std::string measure_path_csv(const std::vector<double> &times, const std::vector<AtomicMeasure> &path)
{
    Csv c({"t", "x1", "x2", "w"});
    for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t i = 0; i < path[k].size(); ++i)
            c.row({times[k], path[k].points[i].x1, path[k].points[i].x2, path[k].weights[i]});
    return c.str();
}

inline json diagnostics_json(const EquilibriumDiagnostics &d)
{
    return {{"exploitability", d.exploitability},
            {"w1_successive", d.w1_successive},
            {"atom_counts", d.atom_counts},
            {"marginal_error", d.marginal_error},
            {"pinned", d.pinned},
            {"final_gap", d.final_gap},
            {"c_tilde", d.c_tilde},
            {"max_control_l2", d.max_control_l2},
            {"unconverged_solves", d.unconverged_solves},
            {"iterations", d.iterations},
            {"failure", d.failure}};
}

/// mu_atoms.csv, trajectories/traj_<id>.csv, diagnostics.json.
inline void write_measure(const std::filesystem::path &dir, const TrajectoryMeasure &mu,
                          const EquilibriumDiagnostics &d)
{
    write_file(dir / "mu_atoms.csv", mu_atoms_csv(mu));
    for (std::size_t a = 0; a < mu.size(); ++a)
        write_file(dir / "trajectories" / ("traj_" + std::to_string(a) + ".csv"), trajectory_csv(mu.atoms[a].traj));
    write_json(dir / "diagnostics.json", diagnostics_json(d));
}

} // namespace grushin::io

#endif // GRUSHIN_IO_HPP
