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

#ifndef GRUSHIN_OCP_HPP
#define GRUSHIN_OCP_HPP

#include "grushin/dynamics.hpp"
#include "grushin/geometry.hpp"
#include "grushin/random.hpp"
#include "grushin/reachability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace grushin
{

/// Bound on ||alpha||_2 of any optimal control on [t, T] when |ell|, |g| <= K:
/// comparing with the zero control gives ||alpha||^2 / 2 - K(T - t) - K <= K(T - t) + K.
inline double a_priori_l2_bound(double K, double horizon) { return 2.0 * std::sqrt(K * (1.0 + horizon)); }

struct OcpDisc
{
    int n_steps = 32;
    int n_restarts = 4;
    double penalty_weight = 10.0;
    int max_iters = 200;
    std::uint64_t seed = 0;
    double fd_step = 1e-6;
    double residual_tol = 1e-5;
};

struct OcpSolution
{
    Trajectory traj;
    double value = 0.0;
    double multistart_spread = 0.0;
    bool converged = false;
    double residual = 0.0;
    double max_violation = 0.0;
    std::vector<double> restart_values;
};

namespace detail
{

/// Sample points inside one piece used to accept a control value.
inline bool piece_feasible(const ConstraintSet &set, Point y, ControlValue a, double dt, double nu)
{
    for (double f : {0.25, 0.5, 0.75, 1.0})
        if (!set.contains(flow(y, a, f * dt, nu)))
            return false;
    return true;
}

/// Largest tested scaling theta * a (theta in [0, 1]) that keeps the piece
/// feasible; theta = 0 always is when y is in the set.
inline ControlValue project_piece(const ConstraintSet &set, Point y, ControlValue a, double dt, double nu)
{
    if (piece_feasible(set, y, a, dt, nu))
        return a;
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 24; ++k)
    {
        const double mid = 0.5 * (lo + hi);
        if (piece_feasible(set, y, {mid * a.a1, mid * a.a2}, dt, nu))
            lo = mid;
        else
            hi = mid;
    }
    return {lo * a.a1, lo * a.a2};
}

/// Direct transcription of the control problem on a uniform grid of pieces:
/// projected rollout, exact energy, trapezoid running cost, terminal cost and
/// a quadratic penalty on the projection displacement.
class Transcription
{
public:
    Transcription(const ConstraintSet &set, double nu, const CostSpec &spec, Point x, double t, int n,
                  double penalty)
        : set_(set), nu_(nu), spec_(spec), x_(x), t_(t), n_(n), dt_((spec.T - t) / n), penalty_(penalty),
          y_(static_cast<std::size_t>(n) + 1), ell_(static_cast<std::size_t>(n) + 1),
          acc_(static_cast<std::size_t>(n) + 1), proj_(static_cast<std::size_t>(n))
    {
    }

    double dt() const { return dt_; }
    int pieces() const { return n_; }
    double time(int k) const { return k == n_ ? spec_.T : t_ + dt_ * k; }

    /// Objective for z (2n values), recomputing from piece `from` onward and
    /// reusing the stored prefix before it.
    double evaluate(const std::vector<double> &z, int from = 0)
    {
        if (from == 0)
        {
            y_[0] = x_;
            ell_[0] = spec_.ell(x_, t_);
            acc_[0] = 0.0;
        }
        for (int i = from; i < n_; ++i)
        {
            const ControlValue a{z[2 * i], z[2 * i + 1]};
            const ControlValue p = project_piece(set_, y_[i], a, dt_, nu_);
            proj_[i] = p;
            y_[i + 1] = flow(y_[i], p, dt_, nu_);
            ell_[i + 1] = spec_.ell(y_[i + 1], time(i + 1));
            const double da1 = a.a1 - p.a1, da2 = a.a2 - p.a2;
            acc_[i + 1] = acc_[i] + dt_ * (0.5 * p.squared_norm() + 0.5 * (ell_[i] + ell_[i + 1]) +
                                           penalty_ * (da1 * da1 + da2 * da2));
        }
        return acc_[n_] + spec_.g(y_[n_]);
    }

    /// Forward-difference gradient; each coordinate reuses the rollout prefix.
    double gradient(std::vector<double> &z, std::vector<double> &g, double fd_step)
    {
        const double f0 = evaluate(z);
        auto saved_y = y_;
        auto saved_ell = ell_;
        auto saved_acc = acc_;
        auto saved_proj = proj_;
        g.assign(z.size(), 0.0);
        for (std::size_t j = 0; j < z.size(); ++j)
        {
            const double h = fd_step * std::max(1.0, std::abs(z[j]));
            const double keep = z[j];
            z[j] = keep + h;
            const int piece = static_cast<int>(j / 2);
            g[j] = (evaluate(z, piece) - f0) / h;
            z[j] = keep;
            std::copy(saved_y.begin() + piece, saved_y.end(), y_.begin() + piece);
            std::copy(saved_ell.begin() + piece, saved_ell.end(), ell_.begin() + piece);
            std::copy(saved_acc.begin() + piece, saved_acc.end(), acc_.begin() + piece);
            std::copy(saved_proj.begin() + piece, saved_proj.end(), proj_.begin() + piece);
        }
        return f0;
    }

    /// Projected control of the last evaluation.
    ControlSignal projected_control() const
    {
        ControlSignal c = ControlSignal::uniform(t_, spec_.T, std::vector<ControlValue>(proj_));
        return c;
    }

    double residual(const std::vector<double> &g) const
    {
        double s = 0.0;
        for (double v : g)
            s += v * v;
        return std::sqrt(s / dt_);
    }

private:
    const ConstraintSet &set_;
    double nu_;
    const CostSpec &spec_;
    Point x_;
    double t_;
    int n_;
    double dt_;
    double penalty_;
    std::vector<Point> y_;
    std::vector<double> ell_;
    std::vector<double> acc_;
    std::vector<ControlValue> proj_;
};

struct DescentResult
{
    std::vector<double> z;
    double f = 0.0;
    double residual = 0.0;
};

/// Quasi-Newton (BFGS inverse update) descent with Armijo backtracking.
inline DescentResult bfgs_descent(Transcription &tr, std::vector<double> z, const OcpDisc &disc)
{
    const std::size_t d = z.size();
    std::vector<double> g, g_new, H(d * d, 0.0), p(d), s(d), yv(d), Hy(d);
    auto reset = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i)
            H[i * d + i] = 1.0 / tr.dt();
    };
    reset();
    double f = tr.gradient(z, g, disc.fd_step);
    double res = tr.residual(g);
    bool fresh = true;
    for (int it = 0; it < disc.max_iters && res >= 0.1 * disc.residual_tol; ++it)
    {
        double slope = 0.0;
        for (std::size_t i = 0; i < d; ++i)
        {
            double v = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                v -= H[i * d + j] * g[j];
            p[i] = v;
            slope += v * g[i];
        }
        if (!(slope < 0.0))
        {
            reset();
            fresh = true;
            for (std::size_t i = 0; i < d; ++i)
                p[i] = -g[i] / tr.dt();
            slope = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                slope += p[i] * g[i];
        }
        double step = 1.0;
        std::vector<double> z_new(d);
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls)
        {
            for (std::size_t i = 0; i < d; ++i)
                z_new[i] = z[i] + step * p[i];
            f_new = tr.evaluate(z_new);
            if (f_new <= f + 1e-4 * step * slope)
            {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
        {
            if (fresh)
                break;
            reset();
            fresh = true;
            continue;
        }
        tr.gradient(z_new, g_new, disc.fd_step);
        double sy = 0.0;
        for (std::size_t i = 0; i < d; ++i)
        {
            s[i] = z_new[i] - z[i];
            yv[i] = g_new[i] - g[i];
            sy += s[i] * yv[i];
        }
        if (sy > 1e-14)
        {
            double yHy = 0.0;
            for (std::size_t i = 0; i < d; ++i)
            {
                double v = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    v += H[i * d + j] * yv[j];
                Hy[i] = v;
                yHy += yv[i] * v;
            }
            const double r = 1.0 / sy;
            const double c = (1.0 + yHy * r) * r;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    H[i * d + j] += c * s[i] * s[j] - r * (Hy[i] * s[j] + s[i] * Hy[j]);
            fresh = false;
        }
        z.swap(z_new);
        g.swap(g_new);
        f = f_new;
        res = tr.residual(g);
    }
    tr.evaluate(z);
    return {z, f, res};
}

/// L2 projection of a control onto n uniform pieces of [t0, t1]; the control
/// is taken as zero outside its own interval.
inline std::vector<double> resample(const ControlSignal &c, double t0, double t1, int n)
{
    std::vector<double> z(2 * static_cast<std::size_t>(n), 0.0);
    const double h = (t1 - t0) / n;
    for (std::size_t i = 0; i < c.pieces(); ++i)
    {
        const double a = c.breaks[i], b = c.breaks[i + 1];
        for (int k = 0; k < n; ++k)
        {
            const double lo = std::max(a, t0 + h * k), hi = std::min(b, t0 + h * (k + 1));
            if (hi > lo)
            {
                z[2 * k] += c.values[i].a1 * (hi - lo) / h;
                z[2 * k + 1] += c.values[i].a2 * (hi - lo) / h;
            }
        }
    }
    return z;
}

inline std::size_t first_active_piece(const ControlSignal &c)
{
    for (std::size_t i = 0; i < c.pieces(); ++i)
        if (c.values[i].a1 != 0.0 || c.values[i].a2 != 0.0)
            return i;
    return c.pieces();
}

inline Point sample_member(const ConstraintSet &set, Rng &rng, bool &found)
{
    const Box b = set.bounding_box().clipped(2.0);
    for (int k = 0; k < 200; ++k)
    {
        Point p{rng.uniform(b.x1_lo, b.x1_hi), rng.uniform(b.x2_lo, b.x2_hi)};
        if (set.contains(p))
        {
            found = true;
            return p;
        }
    }
    found = false;
    return {};
}

} // namespace detail

/// Minimal-energy representative of the same path: on pieces where y1 stays
/// on the axis, alpha2 has no effect and is set to zero.
inline Trajectory normalize_control(const Trajectory &tr)
{
    Trajectory out = tr;
    for (std::size_t i = 0; i < out.control.pieces(); ++i)
    {
        auto &v = out.control.values[i];
        if (v.a1 == 0.0 && v.a2 != 0.0)
        {
            const Point y = tr.state_at(out.control.breaks[i]);
            if (y.x1 == 0.0)
                v.a2 = 0.0;
        }
    }
    out.cost.reset();
    return out;
}

/// Random admissible trajectory from x on [0, T]: each piece draws a control
/// uniformly in [-a_max, a_max]^2 and shrinks it until the piece stays inside.
inline Trajectory random_admissible_trajectory(const ConstraintSet &set, Point x, double T, int pieces, double nu,
                                               double a_max, Rng &rng)
{
    if (!set.contains(x))
        throw DomainError("random_admissible_trajectory: start is not in the set");
    if (pieces < 1 || !(T > 0.0))
        throw ConfigError("random_admissible_trajectory: need pieces >= 1 and T > 0");
    const double dt = T / pieces;
    std::vector<ControlValue> v;
    Point y = x;
    for (int i = 0; i < pieces; ++i)
    {
        ControlValue a{rng.uniform(-a_max, a_max), rng.uniform(-a_max, a_max)};
        a = detail::project_piece(set, y, a, dt, nu);
        v.push_back(a);
        y = flow(y, a, dt, nu);
    }
    return integrate(x, ControlSignal::uniform(0.0, T, v), nu);
}

/// Direct solver: multistart projected quasi-Newton descent over
/// piecewise-constant controls on [t, T]. Starts: the zero control, any
/// caller warm starts, then alternately connector-seeded controls (to seeded
/// random members of the set) and random controls.
inline OcpSolution solve_trajectory(Point x, double t, const ConstraintSet &set, double nu, const CostSpec &spec,
                                    const OcpDisc &disc, const std::vector<ControlSignal> &warm_starts = {})
{
    check_nu(nu);
    if (!set.contains(x))
        throw DomainError("solve_trajectory: initial point outside the constraint set");
    if (!(t < spec.T))
        throw DomainError("solve_trajectory: need t < T");
    if (disc.n_steps < 1 || disc.n_restarts < 1 || disc.max_iters < 0)
        throw ConfigError("solve_trajectory: n_steps, n_restarts must be >= 1");

    const int n = disc.n_steps;
    const double horizon = spec.T - t;
    detail::Transcription tr(set, nu, spec, x, t, n, disc.penalty_weight);
    Rng rng(disc.seed);

    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(2 * static_cast<std::size_t>(n), 0.0));
    for (const auto &w : warm_starts)
        starts.push_back(detail::resample(w, t, spec.T, n));
    const double amp = 0.5 * a_priori_l2_bound(spec.bound_K, horizon) / std::sqrt(horizon);
    ConnectOptions copt;
    copt.extended = true;
    copt.max_delta = 0.5 * horizon;
    for (int r = 0; static_cast<int>(starts.size()) < disc.n_restarts; ++r)
    {
        std::optional<std::vector<double>> z;
        if (r % 2 == 0)
        {
            bool found = false;
            Point target = detail::sample_member(set, rng, found);
            if (found)
            {
                try
                {
                    auto c = connect(set, nu, x, target, copt);
                    ControlSignal shifted = c.traj.control;
                    for (auto &b : shifted.breaks)
                        b += t;
                    if (c.traj.control.pieces() > 0)
                        z = detail::resample(shifted, t, spec.T, n);
                }
                catch (const UnsupportedError &)
                {
                }
            }
        }
        if (!z)
        {
            z = std::vector<double>(2 * static_cast<std::size_t>(n));
            for (auto &v : *z)
                v = rng.uniform(-amp, amp);
        }
        starts.push_back(std::move(*z));
    }

    OcpSolution best;
    bool have = false;
    double vmin = kInf, vmax = -kInf;
    std::size_t best_first = 0;
    for (const auto &z0 : starts)
    {
        auto res = detail::bfgs_descent(tr, z0, disc);
        Trajectory traj = integrate(x, tr.projected_control(), nu);
        const double value = cost(traj, spec, t);
        best.restart_values.push_back(value);
        vmin = std::min(vmin, value);
        vmax = std::max(vmax, value);
        const double energy = traj.control.energy();
        const std::size_t first = detail::first_active_piece(traj.control);
        bool better = !have;
        if (have)
        {
            const double scale = 1e-12 * std::max(1.0, std::abs(best.value));
            if (value < best.value - scale)
                better = true;
            else if (value <= best.value + scale)
            {
                const double be = best.traj.control.energy();
                const double etol = 1e-14 * std::max(1.0, be);
                if (energy < be - etol)
                    better = true;
                else if (energy <= be + etol && first < best_first)
                    better = true;
            }
        }
        if (better)
        {
            have = true;
            best.traj = std::move(traj);
            best.value = value;
            best.residual = res.residual;
            best_first = first;
        }
    }
    if (!have)
        throw InternalError("solve_trajectory: no admissible candidate");
    best.multistart_spread = vmax - vmin;
    best.max_violation = admissibility_check(best.traj, set).max_violation;
    best.converged = best.residual < disc.residual_tol && best.max_violation <= set.tol_member();
    return best;
}

// ---------------------------------------------------------------------------
// Semi-Lagrangian value grid

struct GridSpec
{
    int nx1 = 64;
    int nx2 = 64;
    int nt = 128;
    int n_r = 8;
    int n_theta = 16;
    double cap_cells = 8.0;
    std::optional<Box> box; ///< required when the set is unbounded
};

/// u(x, t) on a tensor grid; infeasible nodes are masked out.
struct ValueGrid
{
    std::vector<double> x1s, x2s, times;
    std::vector<unsigned char> feasible; ///< index i1 * nx2 + i2
    std::vector<std::vector<double>> values; ///< values[k][node], NaN at infeasible nodes
    double nu = 1.0;
    double a_max = 0.0;
    GridSpec spec;

    std::size_t nx1() const { return x1s.size(); }
    std::size_t nx2() const { return x2s.size(); }
    std::size_t node(std::size_t i1, std::size_t i2) const { return i1 * x2s.size() + i2; }
    Point point(std::size_t n) const { return {x1s[n / x2s.size()], x2s[n % x2s.size()]}; }

    /// Masked bilinear weights at p; empty when p is outside the grid or all
    /// four corners are infeasible.
    bool stencil(Point p, std::array<std::size_t, 4> &idx, std::array<double, 4> &w) const
    {
        const double h1 = x1s[1] - x1s[0], h2 = x2s[1] - x2s[0];
        const double f1 = (p.x1 - x1s.front()) / h1, f2 = (p.x2 - x2s.front()) / h2;
        const double e = 1e-9;
        if (f1 < -e || f2 < -e || f1 > nx1() - 1 + e || f2 > nx2() - 1 + e)
            return false;
        std::size_t i1 = static_cast<std::size_t>(std::clamp(std::floor(f1), 0.0, static_cast<double>(nx1() - 2)));
        std::size_t i2 = static_cast<std::size_t>(std::clamp(std::floor(f2), 0.0, static_cast<double>(nx2() - 2)));
        const double u = std::clamp(f1 - static_cast<double>(i1), 0.0, 1.0);
        const double v = std::clamp(f2 - static_cast<double>(i2), 0.0, 1.0);
        idx = {node(i1, i2), node(i1 + 1, i2), node(i1, i2 + 1), node(i1 + 1, i2 + 1)};
        w = {(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v};
        double s = 0.0;
        for (int c = 0; c < 4; ++c)
        {
            if (!feasible[idx[c]])
                w[c] = 0.0;
            s += w[c];
        }
        if (s <= 1e-12)
            return false;
        for (auto &x : w)
            x /= s;
        return true;
    }

    std::optional<double> interpolate(Point p, std::size_t k) const
    {
        std::array<std::size_t, 4> idx;
        std::array<double, 4> w;
        if (!stencil(p, idx, w))
            return std::nullopt;
        double v = 0.0;
        for (int c = 0; c < 4; ++c)
            if (w[c] != 0.0)
                v += w[c] * values[k][idx[c]];
        return v;
    }

    /// Interpolated in space and linearly in time.
    std::optional<double> value_at(Point p, double t) const
    {
        const double T = times.back();
        const double dt = T / static_cast<double>(times.size() - 1);
        const double f = std::clamp(t / dt, 0.0, static_cast<double>(times.size() - 1));
        const std::size_t k = static_cast<std::size_t>(std::min(std::floor(f), static_cast<double>(times.size() - 2)));
        const double th = f - static_cast<double>(k);
        auto a = interpolate(p, k), b = interpolate(p, k + 1);
        if (!a || !b)
            return std::nullopt;
        return (1 - th) * *a + th * *b;
    }
};

/// Backward sweep u(x, t_k) = min over sampled controls a of
/// dt (|a|^2/2 + ell(x, t_k)) + Interp u(., t_{k+1})(Phi_dt(x, a)), with Phi
/// the exact flow. Moves whose endpoint or midpoint leaves the set, or that
/// land where every interpolation corner is infeasible, are dropped; staying
/// put is always available.
inline ValueGrid value_grid_backward(const ConstraintSet &set, double nu, const CostSpec &spec, const GridSpec &gs)
{
    check_nu(nu);
    if (gs.nx1 < 2 || gs.nx2 < 2 || gs.nt < 1 || gs.n_r < 1 || gs.n_theta < 1)
        throw ConfigError("value grid: need nx1, nx2 >= 2 and nt, n_r, n_theta >= 1");
    if (!(spec.T > 0.0))
        throw ConfigError("value grid: need T > 0");
    Box box = gs.box ? *gs.box : set.bounding_box();
    if (!box.bounded())
        throw ConfigError("value grid: the set is unbounded, a grid box is required");
    if (!(box.x1_hi > box.x1_lo) || !(box.x2_hi > box.x2_lo))
        throw ConfigError("value grid: degenerate box");

    ValueGrid vg;
    vg.nu = nu;
    vg.spec = gs;
    vg.spec.box = box;
    for (int i = 0; i < gs.nx1; ++i)
        vg.x1s.push_back(box.x1_lo + (box.x1_hi - box.x1_lo) * i / (gs.nx1 - 1));
    for (int i = 0; i < gs.nx2; ++i)
        vg.x2s.push_back(box.x2_lo + (box.x2_hi - box.x2_lo) * i / (gs.nx2 - 1));
    const double dt = spec.T / gs.nt;
    for (int k = 0; k <= gs.nt; ++k)
        vg.times.push_back(k == gs.nt ? spec.T : dt * k);

    const std::size_t N = vg.x1s.size() * vg.x2s.size();
    vg.feasible.assign(N, 0);
    std::size_t n_feasible = 0;
    for (std::size_t n = 0; n < N; ++n)
        if (set.contains(vg.point(n)))
        {
            vg.feasible[n] = 1;
            ++n_feasible;
        }
    if (n_feasible == 0)
        throw ConfigError("value grid: no grid node lies in the constraint set");

    const double h_min = std::min(vg.x1s[1] - vg.x1s[0], vg.x2s[1] - vg.x2s[0]);
    vg.a_max = std::min(2.0 * std::sqrt(2.0 * spec.bound_K * (1.0 + spec.T)) / std::sqrt(dt),
                        gs.cap_cells * h_min / dt);
    // radii a_max 2^(r - n_r): optimal speeds are often far below a_max
    std::vector<ControlValue> controls{{0.0, 0.0}};
    for (int r = 1; r <= gs.n_r; ++r)
        for (int j = 0; j < gs.n_theta; ++j)
        {
            const double rad = vg.a_max * std::ldexp(1.0, r - gs.n_r), th = 2.0 * M_PI * j / gs.n_theta;
            controls.push_back({rad * std::cos(th), rad * std::sin(th)});
        }

    struct Move
    {
        std::array<std::size_t, 4> idx;
        std::array<double, 4> w;
        double energy;
    };
    std::vector<std::vector<Move>> moves(N);
    for (std::size_t n = 0; n < N; ++n)
    {
        if (!vg.feasible[n])
            continue;
        const Point x = vg.point(n);
        for (const auto &a : controls)
        {
            if (a.a1 == 0.0 && a.a2 == 0.0)
                continue;
            const Point dest = flow(x, a, dt, nu);
            if (!set.contains(dest) || !set.contains(flow(x, a, 0.5 * dt, nu)))
                continue;
            Move m;
            if (!vg.stencil(dest, m.idx, m.w))
                continue;
            m.energy = 0.5 * a.squared_norm() * dt;
            moves[n].push_back(m);
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    vg.values.assign(static_cast<std::size_t>(gs.nt) + 1, std::vector<double>(N, nan));
    for (std::size_t n = 0; n < N; ++n)
        if (vg.feasible[n])
            vg.values[static_cast<std::size_t>(gs.nt)][n] = spec.g(vg.point(n));
    for (int k = gs.nt - 1; k >= 0; --k)
    {
        const auto &next = vg.values[static_cast<std::size_t>(k) + 1];
        auto &cur = vg.values[static_cast<std::size_t>(k)];
        const double tk = vg.times[static_cast<std::size_t>(k)];
        for (std::size_t n = 0; n < N; ++n)
        {
            if (!vg.feasible[n])
                continue;
            const double run = dt * spec.ell(vg.point(n), tk);
            double best = next[n];
            for (const auto &m : moves[n])
            {
                double v = m.energy;
                for (int c = 0; c < 4; ++c)
                    if (m.w[c] != 0.0)
                        v += m.w[c] * next[m.idx[c]];
                best = std::min(best, v);
            }
            cur[n] = run + best;
        }
    }
    return vg;
}

/// Largest gap between g and its masked bilinear interpolant on the grid,
/// sampled at `per_cell` points per cell side.
inline double interpolation_error(const ValueGrid &vg, const std::function<double(Point)> &g,
                                  const ConstraintSet &set, int per_cell = 4)
{
    std::vector<double> gv(vg.feasible.size());
    for (std::size_t n = 0; n < gv.size(); ++n)
        gv[n] = vg.feasible[n] ? g(vg.point(n)) : 0.0;
    double worst = 0.0;
    for (std::size_t i1 = 0; i1 + 1 < vg.nx1(); ++i1)
        for (std::size_t i2 = 0; i2 + 1 < vg.nx2(); ++i2)
            for (int a = 0; a <= per_cell; ++a)
                for (int b = 0; b <= per_cell; ++b)
                {
                    Point p{vg.x1s[i1] + (vg.x1s[i1 + 1] - vg.x1s[i1]) * a / per_cell,
                            vg.x2s[i2] + (vg.x2s[i2 + 1] - vg.x2s[i2]) * b / per_cell};
                    if (!set.contains(p))
                        continue;
                    std::array<std::size_t, 4> idx;
                    std::array<double, 4> w;
                    if (!vg.stencil(p, idx, w))
                        continue;
                    double v = 0.0;
                    for (int c = 0; c < 4; ++c)
                        v += w[c] * gv[idx[c]];
                    worst = std::max(worst, std::abs(v - g(p)));
                }
    return worst;
}

// ---------------------------------------------------------------------------
// Probes

struct ClosedGraphReport
{
    Trajectory limit_traj;
    double limit_cost = 0.0;
    double target_value = 0.0;
    double gap = 0.0;
    bool limit_is_optimal = false;
    double uniform_gap = 0.0; ///< sup distance between the last two source trajectories
    std::vector<double> source_values;
    bool solver_converged = true;
};

/// Solves from every source and from the target. The limit candidate replays
/// the last source's control from the target through the projected rollout
/// and is costed with its minimal-energy control; gap = cost(limit) - value(target).
inline ClosedGraphReport closed_graph_probe(const ConstraintSet &set, double nu, const CostSpec &spec, Point target,
                                            const std::vector<Point> &sources, const OcpDisc &disc,
                                            double tol = 1e-2)
{
    if (sources.empty())
        throw ConfigError("closed_graph_probe: need at least one source");
    ClosedGraphReport rep;
    std::vector<OcpSolution> sols;
    for (const Point &s : sources)
    {
        sols.push_back(solve_trajectory(s, 0.0, set, nu, spec, disc));
        rep.source_values.push_back(sols.back().value);
        rep.solver_converged = rep.solver_converged && sols.back().converged;
    }
    if (sols.size() >= 2)
    {
        const auto &a = sols[sols.size() - 2].traj, &b = sols.back().traj;
        for (double tt : b.times)
            rep.uniform_gap = std::max(rep.uniform_gap, distance(a.state_at(tt), b.state_at(tt)));
    }
    auto at_target = solve_trajectory(target, 0.0, set, nu, spec, disc);
    rep.solver_converged = rep.solver_converged && at_target.converged;
    rep.target_value = at_target.value;

    detail::Transcription tr(set, nu, spec, target, 0.0, disc.n_steps, 0.0);
    tr.evaluate(detail::resample(sols.back().traj.control, 0.0, spec.T, disc.n_steps));
    rep.limit_traj = normalize_control(integrate(target, tr.projected_control(), nu));
    rep.limit_cost = cost(rep.limit_traj, spec, 0.0);
    rep.gap = rep.limit_cost - rep.target_value;
    rep.limit_is_optimal = rep.gap <= tol;
    return rep;
}

struct ContinuityReport
{
    double target_value = 0.0;
    std::vector<double> source_values;
    bool liminf_ok = false;
    bool continuity_ok = false;
};

/// liminf_ok: the smallest value over the second half of the sequence is at
/// least u(target) - tol. continuity_ok: the last source is within tol of u(target).
inline ContinuityReport continuity_from_values(double target_value, const std::vector<double> &source_values,
                                               double tol)
{
    ContinuityReport rep;
    rep.target_value = target_value;
    rep.source_values = source_values;
    if (source_values.empty())
        return rep;
    double tail_min = kInf;
    for (std::size_t i = source_values.size() / 2; i < source_values.size(); ++i)
        tail_min = std::min(tail_min, source_values[i]);
    rep.liminf_ok = tail_min >= target_value - tol;
    rep.continuity_ok = std::abs(source_values.back() - target_value) <= tol;
    return rep;
}

/// Pointwise version: u(., 0) from solve_trajectory.
inline ContinuityReport lsc_continuity_probe(const ConstraintSet &set, double nu, const CostSpec &spec,
                                             Point target, const std::vector<Point> &sources, const OcpDisc &disc,
                                             double tol = 1e-2)
{
    std::vector<double> vals;
    for (const Point &s : sources)
        vals.push_back(solve_trajectory(s, 0.0, set, nu, spec, disc).value);
    return continuity_from_values(solve_trajectory(target, 0.0, set, nu, spec, disc).value, vals, tol);
}

/// Grid version: u(., 0) interpolated from a value grid.
inline ContinuityReport lsc_continuity_probe(const ValueGrid &vg, Point target, const std::vector<Point> &sources,
                                             double tol = 1e-2)
{
    auto at = [&](Point p) {
        auto v = vg.value_at(p, 0.0);
        if (!v)
            throw DomainError("lsc_continuity_probe: point not covered by the value grid");
        return *v;
    };
    std::vector<double> vals;
    for (const Point &s : sources)
        vals.push_back(at(s));
    return continuity_from_values(at(target), vals, tol);
}

} // namespace grushin

#endif // GRUSHIN_OCP_HPP
