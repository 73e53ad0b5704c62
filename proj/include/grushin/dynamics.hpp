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

#ifndef GRUSHIN_DYNAMICS_HPP
#define GRUSHIN_DYNAMICS_HPP

#include "grushin/core.hpp"
#include "grushin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace grushin
{

/// Piecewise-constant control: values[i] on [breaks[i], breaks[i+1]).
/// Breaks need not be uniform (connectors and rescaled concatenations produce
/// uneven pieces); ControlSignal::uniform builds the usual grid.
struct ControlSignal
{
    std::vector<double> breaks;
    std::vector<ControlValue> values;

    static ControlSignal uniform(double t0, double t1, std::vector<ControlValue> v)
    {
        if (v.empty())
            throw ConfigError("control needs at least one piece");
        if (!(t1 > t0))
            throw ConfigError("control interval must have t1 > t0");
        ControlSignal c;
        const std::size_t n = v.size();
        c.breaks.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            c.breaks[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
        c.breaks[n] = t1;
        c.values = std::move(v);
        return c;
    }
    static ControlSignal constant(double t0, double t1, ControlValue v) { return uniform(t0, t1, {v}); }
    /// Zero-length control; used for the identity connector.
    static ControlSignal empty(double t0) { return ControlSignal{{t0}, {}}; }

    std::size_t pieces() const { return values.size(); }
    double t0() const { return breaks.front(); }
    double t1() const { return breaks.back(); }
    double duration(std::size_t i) const { return breaks[i + 1] - breaks[i]; }

    void validate() const
    {
        if (breaks.size() != values.size() + 1)
            throw ConfigError("control: breaks must have one more entry than values");
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
            if (!(breaks[i + 1] > breaks[i]))
                throw ConfigError("control: breaks must be strictly increasing");
        for (const auto &v : values)
            if (!std::isfinite(v.a1) || !std::isfinite(v.a2))
                throw ConfigError("control: non-finite value");
    }

    /// Index of the piece containing t; the last piece is closed on the right.
    std::size_t piece_at(double t) const
    {
        if (values.empty())
            throw DomainError("control has no pieces");
        auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        std::size_t i = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
        return std::min(i, values.size() - 1);
    }
    ControlValue at(double t) const { return values[piece_at(t)]; }

    /// Squared L2 norm, exact for piecewise-constant values.
    double energy() const
    {
        double e = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            e += values[i].squared_norm() * duration(i);
        return e;
    }
    double l2_norm() const { return std::sqrt(energy()); }
    double l1_norm_a2() const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += std::abs(values[i].a2) * duration(i);
        return s;
    }
    double max_abs() const
    {
        double m = 0.0;
        for (const auto &v : values)
            m = std::max(m, std::sqrt(v.squared_norm()));
        return m;
    }
};

/// Integral of |u0 + a1 s|^nu over s in [0, dt], in closed form. A zero of the
/// linear factor inside the interval is handled by splitting there; the
/// same-sign branch uses expm1/log1p so short pieces keep full precision.
inline double abs_pow_integral(double u0, double a1, double dt, double nu)
{
    if (dt <= 0.0)
        return 0.0;
    const double np1 = nu + 1.0;
    if (a1 == 0.0)
        return std::pow(std::abs(u0), nu) * dt;
    if (u0 == 0.0)
        return std::pow(std::abs(a1), nu) * std::pow(dt, np1) / np1;
    const double u1 = u0 + a1 * dt;
    if ((u0 > 0.0 && u1 < 0.0) || (u0 < 0.0 && u1 > 0.0))
        return (std::pow(std::abs(u0), np1) + std::pow(std::abs(u1), np1)) / (np1 * std::abs(a1));
    const double r = a1 * dt / u0; // > -1 here
    if (r <= -1.0)
        return std::pow(std::abs(u0), nu) * dt / np1;
    return std::pow(std::abs(u0), nu) * dt * std::expm1(np1 * std::log1p(r)) / (np1 * r);
}

/// Exact flow of the control system for a constant control over time dt.
inline Point flow(Point y, ControlValue a, double dt, double nu)
{
    return {y.x1 + a.a1 * dt, y.x2 + a.a2 * abs_pow_integral(y.x1, a.a1, dt, nu)};
}

struct CostBreakdown
{
    double control_energy = 0.0; ///< integral of |alpha|^2 / 2
    double running = 0.0;
    double terminal = 0.0;
    double total = 0.0;
};

/// The pair (y, alpha). Every control break is a recorded time, so on each
/// [times[i], times[i+1]] the control is constant and state_at is exact.
struct Trajectory
{
    std::vector<double> times;
    std::vector<Point> states;
    ControlSignal control;
    double nu = 1.0;
    std::optional<CostBreakdown> cost;

    double t0() const { return times.front(); }
    double t1() const { return times.back(); }
    Point start() const { return states.front(); }
    Point end() const { return states.back(); }

    /// Control value on the step [times[i], times[i+1]].
    ControlValue control_on_step(std::size_t i) const
    {
        if (control.values.empty())
            return {};
        return control.at(0.5 * (times[i] + times[i + 1]));
    }

    Point state_at(double t) const
    {
        if (t <= times.front())
            return states.front();
        if (t >= times.back())
            return states.back();
        auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
        return flow(states[i], control_on_step(i), t - times[i], nu);
    }
};

inline void check_nu(double nu)
{
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw ConfigError("nu must be a finite exponent > 0");
}

/// Integrates from x at control.t0(). Each piece is recorded at `substeps`
/// equally spaced sub-times; every recorded state is the exact flow from the
/// start of its piece.
inline Trajectory integrate(Point x, const ControlSignal &control, double nu, int substeps = 1)
{
    check_nu(nu);
    if (substeps < 1)
        throw ConfigError("substeps must be >= 1");
    control.validate();
    Trajectory tr;
    tr.nu = nu;
    tr.control = control;
    tr.times.reserve(control.pieces() * static_cast<std::size_t>(substeps) + 1);
    tr.states.reserve(tr.times.capacity());
    tr.times.push_back(control.t0());
    tr.states.push_back(x);
    Point y = x;
    for (std::size_t i = 0; i < control.pieces(); ++i)
    {
        const double ta = control.breaks[i], tb = control.breaks[i + 1];
        const double dt = tb - ta;
        for (int k = 1; k < substeps; ++k)
        {
            const double s = dt * k / substeps;
            tr.times.push_back(ta + s);
            tr.states.push_back(flow(y, control.values[i], s, nu));
        }
        y = flow(y, control.values[i], dt, nu);
        tr.times.push_back(tb);
        tr.states.push_back(y);
    }
    return tr;
}

/// Stay-put trajectory at x over [t0, t1] with n zero pieces.
inline Trajectory constant_trajectory(Point x, double t0, double t1, double nu, std::size_t n = 1)
{
    return integrate(x, ControlSignal::uniform(t0, t1, std::vector<ControlValue>(n)), nu);
}

/// Running cost ell(x, t), terminal cost g(x), bound K with |ell|, |g| <= K on
/// the working set, horizon T.
struct CostSpec
{
    std::function<double(Point, double)> ell = [](Point, double) { return 0.0; };
    std::function<double(Point)> g = [](Point) { return 0.0; };
    double bound_K = 1.0;
    double T = 1.0;
};

/// Cost over [t_start, T]: exact control energy, trapezoid rule for ell on the
/// recorded grid, terminal g at y(T).
inline CostBreakdown cost_breakdown(const Trajectory &traj, const CostSpec &spec, double t_start)
{
    const double tol_t = 1e-12 * std::max(1.0, std::abs(spec.T));
    if (std::abs(traj.t1() - spec.T) > tol_t)
        throw DomainError("cost: trajectory does not end at the horizon T");
    if (t_start < traj.t0() - tol_t || t_start > spec.T + tol_t)
        throw DomainError("cost: t_start outside the trajectory interval");

    CostBreakdown c;
    const auto &ctl = traj.control;
    for (std::size_t i = 0; i < ctl.pieces(); ++i)
    {
        const double a = std::max(ctl.breaks[i], t_start), b = ctl.breaks[i + 1];
        if (b > a)
            c.control_energy += 0.5 * ctl.values[i].squared_norm() * (b - a);
    }

    double t_prev = t_start;
    Point y_prev = traj.state_at(t_start);
    double l_prev = spec.ell(y_prev, t_prev);
    for (std::size_t i = 0; i < traj.times.size(); ++i)
    {
        if (traj.times[i] <= t_prev)
            continue;
        const double l = spec.ell(traj.states[i], traj.times[i]);
        c.running += 0.5 * (l_prev + l) * (traj.times[i] - t_prev);
        t_prev = traj.times[i];
        l_prev = l;
    }
    c.terminal = spec.g(traj.end());
    c.total = c.control_energy + c.running + c.terminal;
    return c;
}

/// Costs the trajectory and stores the breakdown on it.
inline double cost(Trajectory &traj, const CostSpec &spec, double t_start)
{
    traj.cost = cost_breakdown(traj, spec, t_start);
    return traj.cost->total;
}

/// Prefix on [t0, t0 + delta] followed by the tail compressed onto
/// [t0 + delta, T]: tail times s -> t0 + delta + (s - t0)(T - t0 - delta)/(T - t0)
/// and tail controls scaled by (T - t0)/(T - t0 - delta). States of the tail
/// are unchanged by the rescaling and are copied, so the final state is the
/// tail's final state bit for bit.
inline Trajectory rescale_concat(const Trajectory &prefix, const Trajectory &tail, double tol = kDefaultTolMember)
{
    if (distance(prefix.end(), tail.start()) > tol)
        throw DomainError("rescale_concat: prefix endpoint differs from tail start");
    const double delta = prefix.t1() - prefix.t0();
    const double t0 = tail.t0(), T = tail.t1();
    if (!(delta >= 0.0) || !(delta < T - t0))
        throw DomainError("rescale_concat: need 0 <= delta < T");
    if (delta == 0.0)
        return tail;

    const double span = T - t0;
    const double lambda = span / (span - delta);
    auto map_time = [&](double s) { return t0 + delta + (s - t0) / lambda; };

    Trajectory out;
    out.nu = tail.nu;
    for (std::size_t i = 0; i < prefix.times.size(); ++i)
    {
        out.times.push_back(t0 + (prefix.times[i] - prefix.t0()));
        out.states.push_back(prefix.states[i]);
    }
    for (std::size_t i = 1; i < tail.times.size(); ++i)
    {
        out.times.push_back(map_time(tail.times[i]));
        out.states.push_back(tail.states[i]);
    }
    out.times.back() = T;

    for (std::size_t i = 0; i < prefix.control.pieces(); ++i)
    {
        out.control.breaks.push_back(t0 + (prefix.control.breaks[i] - prefix.t0()));
        out.control.values.push_back(prefix.control.values[i]);
    }
    for (std::size_t i = 0; i < tail.control.pieces(); ++i)
    {
        out.control.breaks.push_back(map_time(tail.control.breaks[i]));
        out.control.values.push_back({lambda * tail.control.values[i].a1, lambda * tail.control.values[i].a2});
    }
    out.control.breaks.push_back(T);
    return out;
}

struct AdmissibilityReport
{
    double max_violation = 0.0;
    std::optional<double> first_exit_time;
};

/// Scans recorded states and step midpoints. max_violation is the largest
/// signed distance surrogate seen, floored at 0.
inline AdmissibilityReport admissibility_check(const Trajectory &traj, const ConstraintSet &set)
{
    AdmissibilityReport rep;
    auto probe = [&](Point p, double t) {
        const double v = set.violation(p);
        rep.max_violation = std::max(rep.max_violation, v);
        if (v > set.tol_member() && !rep.first_exit_time)
            rep.first_exit_time = t;
    };
    for (std::size_t i = 0; i < traj.times.size(); ++i)
    {
        if (i > 0)
        {
            const double tm = 0.5 * (traj.times[i - 1] + traj.times[i]);
            probe(flow(traj.states[i - 1], traj.control_on_step(i - 1), tm - traj.times[i - 1], traj.nu), tm);
        }
        probe(traj.states[i], traj.times[i]);
    }
    return rep;
}

} // namespace grushin

#endif // GRUSHIN_DYNAMICS_HPP
