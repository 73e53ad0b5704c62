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

#ifndef GRUSHIN_REACHABILITY_HPP
#define GRUSHIN_REACHABILITY_HPP

#include "grushin/dynamics.hpp"
#include "grushin/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace grushin
{

enum class ConnectCase
{
    identity,
    off_axis_vertical,
    off_axis_slope,
    on_axis_power,
    interior,
};

inline std::string to_string(ConnectCase c)
{
    switch (c)
    {
    case ConnectCase::identity: return "identity";
    case ConnectCase::off_axis_vertical: return "off_axis_vertical";
    case ConnectCase::off_axis_slope: return "off_axis_slope";
    case ConnectCase::on_axis_power: return "on_axis_power";
    case ConnectCase::interior: return "interior";
    }
    return "?";
}

struct ConnectResult
{
    Trajectory traj; ///< on [0, delta]
    double delta = 0.0;
    double control_l2 = 0.0;
    ConnectCase case_tag = ConnectCase::identity;
    std::optional<std::size_t> witness_index;
    bool reversed = false; ///< built from target to source and run backwards
    double endpoint_error = 0.0;
    double max_violation = 0.0;
};

struct ConnectOptions
{
    /// Allowed drift between the tracked curve and the integrated path at
    /// piece midpoints; the piece count doubles until it is met.
    double curve_tol = 1e-11;
    int max_pieces = 1 << 16;
    double max_delta = kInf;
    /// Case 3 curve coefficient tried first.
    double interior_c_ref = 1.0;
    /// Also try constructions that need no declared witness at a boundary
    /// target: the vertical segment through the target, the local power curve
    /// through it, and both curves centred at the source and run backwards.
    bool extended = false;
};

namespace detail
{

/// A curve through x0 parameterized by u >= 0:
/// P(u) = (x01 + d u, x02 + s C phi(u)), phi(0) = 0, phi increasing.
/// d = 0 gives the vertical segment.
struct TrackedCurve
{
    Point x0;
    int d = 0;
    int s = 1;
    double C = 1.0;
    std::function<double(double)> phi;
    std::function<double(double)> phi_inv;
};

inline TrackedCurve linear_curve(Point x0, int d, int s, double C)
{
    return {x0, d, s, C, [](double u) { return u; }, [](double v) { return v; }};
}

inline TrackedCurve power_curve(Point x0, int d, int s, double C, double rho)
{
    return {x0, d, s, C, [rho](double u) { return std::pow(u, rho); },
            [rho](double v) { return std::pow(v, 1.0 / rho); }};
}

/// x2 - x02 = s C (|x1|^(nu+1) - |x01|^(nu+1)) on the side sigma of the axis,
/// parameterized by u = |x1| - |x01|.
inline TrackedCurve level_power_curve(Point x0, int sigma, int s, double C, double nu)
{
    const double a = std::abs(x0.x1);
    const double np1 = nu + 1.0;
    return {x0, sigma, s, C, [a, np1](double u) { return std::pow(a + u, np1) - std::pow(a, np1); },
            [a, np1](double v) { return std::pow(std::pow(a, np1) + v, 1.0 / np1) - a; }};
}

/// Horizontal leg from `source` onto the curve at the source's height, then
/// along the curve back to x0. Controls on the second leg are chosen piece by
/// piece so the path passes exactly through the curve nodes.
inline std::optional<Trajectory> curve_connector(Point source, const TrackedCurve &c, double nu,
                                                  const ConnectOptions &opt)
{
    const double v = (source.x2 - c.x0.x2) / (c.s * c.C);
    if (v < -1e-15 * std::max(1.0, std::abs(source.x2)))
        return std::nullopt;
    const double u_star = v <= 0.0 ? 0.0 : c.phi_inv(v);
    if (!std::isfinite(u_star))
        return std::nullopt;
    if (c.d == 0 && u_star > 0.0 && c.x0.x1 == 0.0)
        return std::nullopt;

    const double meet_x1 = c.x0.x1 + c.d * u_star;
    ControlSignal head;
    head.breaks.push_back(0.0);
    const double dx = meet_x1 - source.x1;
    if (dx != 0.0)
    {
        head.breaks.push_back(std::abs(dx));
        head.values.push_back({sign(dx), 0.0});
    }
    if (u_star == 0.0)
    {
        if (head.values.empty())
            return std::nullopt;
        return integrate(source, head, nu);
    }

    const double t_leg = head.breaks.back();
    const Point meet{meet_x1, source.x2};
    auto curve_x2 = [&](double u) { return c.x0.x2 + c.s * c.C * c.phi(u); };
    // pieces shorter than this would not give strictly increasing breaks
    const double min_piece = 64.0 * std::numeric_limits<double>::epsilon() * (t_leg + u_star);
    const int n_max = c.d == 0 ? 1
                               : static_cast<int>(std::clamp(std::floor(u_star / min_piece), 1.0,
                                                             static_cast<double>(opt.max_pieces)));

    for (int n = 1;; n *= 2)
    {
        ControlSignal ctl = head;
        Point y = meet;
        double worst = 0.0;
        bool ok = true;
        for (int k = 0; k < n; ++k)
        {
            const double ua = u_star * (1.0 - static_cast<double>(k) / n);
            const double ub = k + 1 == n ? 0.0 : u_star * (1.0 - static_cast<double>(k + 1) / n);
            const double dt = ua - ub;
            const double a1 = -static_cast<double>(c.d);
            const double I = abs_pow_integral(y.x1, a1, dt, nu);
            if (!(I > 0.0))
            {
                ok = false;
                break;
            }
            const double target_x2 = k + 1 == n ? c.x0.x2 : curve_x2(ub);
            const ControlValue a{a1, (target_x2 - y.x2) / I};
            if (c.d != 0)
            {
                const Point mid = flow(y, a, 0.5 * dt, nu);
                worst = std::max(worst, std::abs(mid.x2 - curve_x2(0.5 * (ua + ub))));
            }
            ctl.values.push_back(a);
            ctl.breaks.push_back(t_leg + (u_star - ub));
            y = flow(y, a, dt, nu);
        }
        if (!ok)
            return std::nullopt;
        if (worst <= opt.curve_tol * std::max(1.0, std::abs(source.x2 - c.x0.x2)) || n >= n_max)
            return integrate(source, ctl, nu);
    }
}

/// Runs a trajectory backwards: y(s) = z(delta - s), alpha(s) = -beta(delta - s).
inline Trajectory reversed(const Trajectory &z)
{
    ControlSignal ctl;
    const double T = z.control.t1(), t0 = z.control.t0();
    const std::size_t n = z.control.pieces();
    ctl.breaks.push_back(t0);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t j = n - 1 - i;
        ctl.breaks.push_back(t0 + (T - z.control.breaks[j]));
        ctl.values.push_back({-z.control.values[j].a1, -z.control.values[j].a2});
    }
    ctl.breaks.back() = T;
    return integrate(z.end(), ctl, z.nu);
}

struct Candidate
{
    Trajectory traj;
    ConnectCase tag;
    std::optional<std::size_t> witness;
    bool reversed = false;
};

} // namespace detail

/// Connecting trajectory from `source` to `target` inside the set. Tries the
/// two-leg constructions (every declared witness at the target; for interior
/// targets the local power curve x2 - x02 = C(|x1|^(nu+1) - |x01|^(nu+1));
/// more with ConnectOptions::extended), keeps those that stay in the set and
/// land on the target, and returns the one with the shortest duration (ties:
/// smaller L2 norm). Throws UnsupportedError when none qualifies.
inline ConnectResult connect(const ConstraintSet &set, double nu, Point source, Point target,
                             const ConnectOptions &opt = {})
{
    check_nu(nu);
    if (!set.contains(source))
        throw DomainError("connect: source outside the constraint set");
    if (!set.contains(target))
        throw DomainError("connect: target outside the constraint set");

    if (source == target)
    {
        ConnectResult r;
        r.traj = Trajectory{{0.0}, {source}, ControlSignal::empty(0.0), nu, {}};
        r.case_tag = ConnectCase::identity;
        return r;
    }

    const double tol = set.tol_member();
    const bool target_on_axis = std::abs(target.x1) <= tol;
    bool target_interior = false;
    {
        const double r = std::max(1e-6, 1e-3 * distance(source, target));
        target_interior = classify_point(set, target, r).kind == BoundaryKind::interior;
    }

    std::vector<detail::Candidate> cands;
    auto add = [&](std::optional<Trajectory> t, ConnectCase tag, std::optional<std::size_t> w, bool rev) {
        if (t)
            cands.push_back({std::move(*t), tag, w, rev});
    };
    auto add_reversed = [&](std::optional<Trajectory> t, ConnectCase tag) {
        if (t)
            cands.push_back({detail::reversed(*t), tag, std::nullopt, true});
    };
    auto sgn = [](double v) { return v >= 0.0 ? 1 : -1; };

    // declared witnesses at the target
    for (std::size_t i = 0; i < set.witnesses().size(); ++i)
    {
        const Witness &w = set.witnesses()[i];
        if (distance(w.x0, target) > tol)
            continue;
        const int d = w.family == CurveFamily::segment_vertical
                          ? 0
                          : (w.family == CurveFamily::segment_slope_pos || w.family == CurveFamily::power_curve_pos ? 1
                                                                                                                    : -1);
        if (w.family == CurveFamily::segment_vertical)
        {
            if (target_on_axis)
                continue;
            add(detail::curve_connector(source, detail::linear_curve(target, 0, w.side, 1.0), nu, opt),
                ConnectCase::off_axis_vertical, i, false);
        }
        else if (is_power_curve(w.family))
        {
            if (!target_on_axis && !w.rho)
                continue;
            add(detail::curve_connector(source, detail::power_curve(target, d, w.side, w.C, w.exponent(nu)), nu, opt),
                target_on_axis ? ConnectCase::on_axis_power : ConnectCase::off_axis_slope, i, false);
        }
        else
        {
            add(detail::curve_connector(source, detail::linear_curve(target, d, w.side, w.C), nu, opt),
                ConnectCase::off_axis_slope, i, false);
        }
    }

    if (opt.extended)
    {
        // vertical segment through the target (and through the source, reversed)
        if (!target_on_axis)
            add(detail::curve_connector(source, detail::linear_curve(target, 0, sgn(source.x2 - target.x2), 1.0), nu, opt),
                ConnectCase::off_axis_vertical, std::nullopt, false);
        if (std::abs(source.x1) > tol)
            add_reversed(detail::curve_connector(target, detail::linear_curve(source, 0, sgn(target.x2 - source.x2), 1.0),
                                                 nu, opt),
                         ConnectCase::off_axis_vertical);
    }

    // local power curve through the target; C = C_ref if admissible,
    // otherwise the smallest admissible C found by doubling then bisection
    if (target_interior || opt.extended)
    {
        const int s = sgn(source.x2 - target.x2);
        const int sigma = std::abs(target.x1) > tol ? sgn(target.x1) : sgn(source.x1);
        const ConnectCase tag = target_interior  ? ConnectCase::interior
                                : target_on_axis ? ConnectCase::on_axis_power
                                                 : ConnectCase::off_axis_slope;
        auto attempt = [&](double C) -> std::optional<Trajectory> {
            auto t = detail::curve_connector(source, detail::level_power_curve(target, sigma, s, C, nu), nu, opt);
            if (t && admissibility_check(*t, set).max_violation <= tol && distance(t->end(), target) <= tol)
                return t;
            return std::nullopt;
        };
        double C = opt.interior_c_ref;
        auto best = attempt(C);
        if (!best)
        {
            double lo = C;
            for (int k = 0; k < 12 && !best; ++k)
            {
                lo = C;
                C *= 2.0;
                best = attempt(C);
            }
            if (best)
            {
                double hi = C;
                for (int k = 0; k < 30; ++k)
                {
                    const double mid = 0.5 * (lo + hi);
                    if (auto t = attempt(mid))
                    {
                        hi = mid;
                        best = std::move(t);
                    }
                    else
                        lo = mid;
                }
            }
        }
        add(std::move(best), tag, std::nullopt, false);


        // same construction centred at the source, run backwards
        if (opt.extended)
        {
            const int s_rev = sgn(target.x2 - source.x2);
            const int sigma_rev = std::abs(source.x1) > tol ? sgn(source.x1) : sgn(target.x1);
            add_reversed(detail::curve_connector(
                             target, detail::level_power_curve(source, sigma_rev, s_rev, opt.interior_c_ref, nu), nu,
                             opt),
                         tag);
        }
    }

    std::optional<ConnectResult> best;
    for (auto &c : cands)
    {
        const double err = distance(c.traj.end(), target);
        const double dur = c.traj.t1() - c.traj.t0();
        if (err > tol || dur > opt.max_delta)
            continue;
        const auto adm = admissibility_check(c.traj, set);
        if (adm.max_violation > tol)
            continue;
        const double l2 = c.traj.control.l2_norm();
        if (best && (dur > best->delta || (dur == best->delta && l2 >= best->control_l2)))
            continue;
        ConnectResult r;
        r.delta = dur;
        r.control_l2 = l2;
        r.case_tag = c.tag;
        r.witness_index = c.witness;
        r.reversed = c.reversed;
        r.endpoint_error = err;
        r.max_violation = adm.max_violation;
        r.traj = std::move(c.traj);
        best = std::move(r);
    }
    if (!best)
        throw UnsupportedError("connect: no admissible connecting construction reaches the target");
    return *best;
}

// ---------------------------------------------------------------------------

struct SequenceReport
{
    std::vector<double> deltas;
    std::vector<double> l2norms;
    std::vector<double> endpoint_errors;
    std::vector<double> max_violations;
    std::vector<std::string> case_tags;
    bool established = false; ///< every source was connected
    bool monotone_to_zero = false;
    std::string failure; ///< message of the first failed connect
};

/// Connects each source to the target. monotone_to_zero holds when every
/// source connected and the last delta and L2 norm are below the thresholds.
inline SequenceReport verify_reachability_sequence(const ConstraintSet &set, double nu, Point target,
                                                   const std::vector<Point> &sources, double delta_threshold,
                                                   double l2_threshold, const ConnectOptions &opt = {})
{
    SequenceReport rep;
    rep.established = !sources.empty();
    for (const Point &s : sources)
    {
        try
        {
            auto r = connect(set, nu, s, target, opt);
            rep.deltas.push_back(r.delta);
            rep.l2norms.push_back(r.control_l2);
            rep.endpoint_errors.push_back(r.endpoint_error);
            rep.max_violations.push_back(r.max_violation);
            rep.case_tags.push_back(to_string(r.case_tag));
        }
        catch (const UnsupportedError &e)
        {
            rep.established = false;
            if (rep.failure.empty())
                rep.failure = e.what();
            break;
        }
    }
    rep.monotone_to_zero = rep.established && rep.deltas.back() < delta_threshold &&
                           rep.l2norms.back() < l2_threshold;
    return rep;
}

// ---------------------------------------------------------------------------
// Cone certificates

struct UnreachCertificate
{
    double m1 = 0.0;
    double x02 = 0.0;
    std::vector<double> times;
    std::vector<double> lower_bound; ///< x02 exp(-(1/m1) int_0^s |alpha2|)
    std::vector<double> observed;    ///< y2(s)
    double observed_min_ratio = 1.0;
    double l1_alpha2 = 0.0;
};

/// Lower bound on y2 along a trajectory that stays in the cone with nu = 1:
/// there x1 <= x2 / m1, so dy2/ds >= -(y2/m1)|alpha2|.
inline UnreachCertificate cone_gronwall_bound(const ConstraintSet &cone, const Trajectory &traj)
{
    const auto *c = std::get_if<Cone>(&cone.shape());
    if (!c || cone.shift() != Point{})
        throw ConfigError("cone_gronwall_bound: the set must be an unshifted cone");
    if (traj.nu != 1.0)
        throw ConfigError("cone_gronwall_bound: the bound is derived for nu = 1");
    if (!(traj.start().x2 > 0.0))
        throw DomainError("cone_gronwall_bound: need y2(0) > 0");
    const auto adm = admissibility_check(traj, cone);
    if (adm.max_violation > cone.tol_member())
        throw DomainError("cone_gronwall_bound: trajectory leaves the cone");

    UnreachCertificate cert;
    cert.m1 = c->m1;
    cert.x02 = traj.start().x2;
    double integral = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
    {
        if (i > 0)
            integral += std::abs(traj.control_on_step(i - 1).a2) * (traj.times[i] - traj.times[i - 1]);
        const double b = cert.x02 * std::exp(-integral / cert.m1);
        cert.times.push_back(traj.times[i]);
        cert.lower_bound.push_back(b);
        cert.observed.push_back(traj.states[i].x2);
        cert.observed_min_ratio = std::min(cert.observed_min_ratio, traj.states[i].x2 / b);
    }
    cert.l1_alpha2 = integral;
    return cert;
}

/// Energy int |alpha|^2/2 over [0, x01 - eps] of the control
/// alpha(s) = (-1, -x02 / (x01 (x01 - s))), by adaptive Gauss-Kronrod.
inline double truncated_cone_cost(Point x0, double eps)
{
    if (!(x0.x1 > 0.0))
        throw DomainError("truncated_cone_cost: need x01 > 0");
    if (!(eps > 0.0) || !(eps < x0.x1))
        throw DomainError("truncated_cone_cost: need 0 < eps < x01");
    auto integrand = [&](double s) {
        const double a2 = x0.x2 / (x0.x1 * (x0.x1 - s));
        return 0.5 * (1.0 + a2 * a2);
    };
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(integrand, 0.0, x0.x1 - eps, 20, 1e-13);
}

/// The same control, sampled at piece midpoints, which keeps the path exactly
/// on the ray through x0 at the nodes (nu = 1).
inline Trajectory cone_connector(Point x0, double eps, int pieces)
{
    if (!(eps > 0.0) || !(eps < x0.x1))
        throw DomainError("cone_connector: need 0 < eps < x01");
    if (pieces < 1)
        throw ConfigError("cone_connector: pieces must be >= 1");
    const double len = x0.x1 - eps;
    std::vector<ControlValue> v(static_cast<std::size_t>(pieces));
    for (int i = 0; i < pieces; ++i)
    {
        const double s = len * (i + 0.5) / pieces;
        v[static_cast<std::size_t>(i)] = {-1.0, -x0.x2 / (x0.x1 * (x0.x1 - s))};
    }
    return integrate(x0, ControlSignal::uniform(0.0, len, v), 1.0);
}

// ---------------------------------------------------------------------------

struct ModulusPair
{
    Point a, b;
    double distance = 0.0;
    double delta = 0.0;
    double l2 = 0.0;
    bool connected = false;
};

struct PowerFit
{
    double exponent = 0.0;
    double log_coef = 0.0;
    double r_squared = 0.0;
    double dominating_coef = 0.0; ///< smallest A with value <= A d^exponent on all pairs
};

struct ModulusReport
{
    std::vector<ModulusPair> pairs;
    PowerFit delta_fit;
    PowerFit l2_fit;
    bool dominated = false;
};

/// Least-squares fit of log y against log x.
inline PowerFit fit_power(const std::vector<double> &x, const std::vector<double> &y)
{
    PowerFit f;
    const std::size_t n = x.size();
    if (n < 2)
        return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        return f;
    f.exponent = sxy / sxx;
    f.log_coef = my - f.exponent * mx;
    f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
        f.dominating_coef = std::max(f.dominating_coef, y[i] / std::pow(x[i], f.exponent));
    return f;
}

/// Connects every pair and fits delta ~ d^p and ||alpha||_2 ~ d^q. dominated
/// means every pair connected and both fitted exponents are positive, so
/// A d^p (with A the dominating coefficient) is a modulus for all pairs.
inline ModulusReport uniform_modulus_probe(const ConstraintSet &set, double nu,
                                           const std::vector<std::pair<Point, Point>> &pairs,
                                           const ConnectOptions &opt = {})
{
    ModulusReport rep;
    std::vector<double> d, dl, dd, ll;
    bool all = true;
    for (const auto &[a, b] : pairs)
    {
        ModulusPair mp{a, b, distance(a, b), 0.0, 0.0, false};
        try
        {
            auto r = connect(set, nu, a, b, opt);
            mp.delta = r.delta;
            mp.l2 = r.control_l2;
            mp.connected = true;
        }
        catch (const UnsupportedError &)
        {
            all = false;
        }
        if (mp.connected && mp.distance > 0.0 && mp.delta > 0.0)
        {
            d.push_back(mp.distance);
            dd.push_back(mp.delta);
            dl.push_back(mp.distance);
            ll.push_back(mp.l2);
        }
        rep.pairs.push_back(mp);
    }
    rep.delta_fit = fit_power(d, dd);
    rep.l2_fit = fit_power(dl, ll);
    rep.dominated = all && (d.empty() || (rep.delta_fit.exponent > 0.0 && rep.l2_fit.exponent > 0.0));
    return rep;
}

} // namespace grushin

#endif // GRUSHIN_REACHABILITY_HPP
