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

#ifndef GRUSHIN_GEOMETRY_HPP
#define GRUSHIN_GEOMETRY_HPP

#include "grushin/core.hpp"
#include "grushin/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace grushin
{

/// One term coef * |x|^power, multiplied by sign(x) when odd.
struct PowerTerm
{
    double coef = 0.0;
    double power = 0.0;
    bool odd = false;
};

/// Scalar function of x1 given as constant + sum of power terms. Covers the
/// boundary curves used by the constraint sets (x1^2, x1|x1|, x1^(nu+1), ...).
struct ScalarCurve
{
    double constant = 0.0;
    std::vector<PowerTerm> terms;

    static ScalarCurve constant_value(double c) { return ScalarCurve{c, {}}; }
    static ScalarCurve power(double coef, double p, bool odd = false)
    {
        return ScalarCurve{0.0, {PowerTerm{coef, p, odd}}};
    }

    double operator()(double x) const
    {
        double v = constant;
        for (const auto &t : terms)
        {
            double m = std::pow(std::abs(x), t.power);
            v += t.coef * (t.odd ? sign(x) * m : m);
        }
        return v;
    }

    /// Centered finite-difference slope with step h.
    double slope(double x, double h = 1e-6) const
    {
        return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
    }
};

/// Axis-aligned box; sides may be infinite.
struct Box
{
    double x1_lo = -kInf;
    double x1_hi = kInf;
    double x2_lo = -kInf;
    double x2_hi = kInf;

    bool bounded() const
    {
        return std::isfinite(x1_lo) && std::isfinite(x1_hi) && std::isfinite(x2_lo) && std::isfinite(x2_hi);
    }
    Box hull(const Box &o) const
    {
        return {std::min(x1_lo, o.x1_lo), std::max(x1_hi, o.x1_hi), std::min(x2_lo, o.x2_lo),
                std::max(x2_hi, o.x2_hi)};
    }
    /// Replaces infinite sides by finite ones, extending `pad` beyond the finite extent.
    Box clipped(double pad = 10.0) const
    {
        auto lo = [&](double v, double other) { return std::isfinite(v) ? v : (std::isfinite(other) ? other - pad : -pad); };
        auto hi = [&](double v, double other) { return std::isfinite(v) ? v : (std::isfinite(other) ? other + pad : pad); };
        return {lo(x1_lo, x1_hi), hi(x1_hi, x1_lo), lo(x2_lo, x2_hi), hi(x2_hi, x2_lo)};
    }
};

enum class CurveFamily
{
    segment_vertical,
    segment_slope_pos,
    segment_slope_neg,
    power_curve_pos,
    power_curve_neg,
};

inline std::string to_string(CurveFamily f)
{
    switch (f)
    {
    case CurveFamily::segment_vertical: return "segment_vertical";
    case CurveFamily::segment_slope_pos: return "segment_slope_pos";
    case CurveFamily::segment_slope_neg: return "segment_slope_neg";
    case CurveFamily::power_curve_pos: return "power_curve_pos";
    case CurveFamily::power_curve_neg: return "power_curve_neg";
    }
    return "?";
}

inline bool is_power_curve(CurveFamily f)
{
    return f == CurveFamily::power_curve_pos || f == CurveFamily::power_curve_neg;
}

/// A segment or curve issued from a boundary point x0 and contained in the set
/// over the parameter range (0, R]. `side` is +1 when the curve enters
/// {x2 > x02} and -1 for the mirrored {x2 < x02} variant.
struct Witness
{
    Point x0;
    double C = 1.0;
    double R = 1.0;
    CurveFamily family = CurveFamily::segment_vertical;
    int side = +1;
    std::optional<double> rho; ///< power exponent override; default nu + 1

    double exponent(double nu) const { return rho.value_or(nu + 1.0); }

    /// Point of the curve at parameter u in (0, R].
    Point at(double u, double nu) const
    {
        const double s = static_cast<double>(side);
        switch (family)
        {
        case CurveFamily::segment_vertical: return {x0.x1, x0.x2 + s * u};
        case CurveFamily::segment_slope_pos: return {x0.x1 + u, x0.x2 + s * C * u};
        case CurveFamily::segment_slope_neg: return {x0.x1 - u, x0.x2 + s * C * u};
        case CurveFamily::power_curve_pos: return {x0.x1 + u, x0.x2 + s * C * std::pow(u, exponent(nu))};
        case CurveFamily::power_curve_neg: return {x0.x1 - u, x0.x2 + s * C * std::pow(u, exponent(nu))};
        }
        return x0;
    }
};

class ConstraintSet;

struct Rectangle
{
    double a1, b1, a2, b2;
};

/// { f(x1) - x2 <= 0, lo <= x1 <= hi }
struct Sublevel
{
    ScalarCurve f;
    double lo, hi;
};

/// { lower(x1) <= x2 <= upper(x1), lo <= x1 <= hi }
struct Band
{
    ScalarCurve lower, upper;
    double lo, hi;
};

/// { m1 x1 <= x2 <= m2 x1 }, 0 < m1 < m2 (forces x1 >= 0).
struct Cone
{
    double m1, m2;
};

/// { x2 = gamma(x1), 0 <= x1 <= R }
struct Curve
{
    ScalarCurve gamma;
    double R;
};

struct Union
{
    std::vector<ConstraintSet> parts;
};

namespace detail
{
inline double graph_distance(const ScalarCurve &f, double x1, double x2, double h = 1e-7)
{
    double s = f.slope(x1, h);
    return (f(x1) - x2) / std::sqrt(1.0 + s * s);
}
} // namespace detail

/// Closed constraint set in the plane. Immutable after construction; build it
/// through the static factories, which validate parameters.
class ConstraintSet
{
public:
    using Shape = std::variant<Rectangle, Sublevel, Band, Cone, Curve, Union>;

    static ConstraintSet rectangle(double a1, double b1, double a2, double b2)
    {
        if (!(a1 <= b1) || !(a2 <= b2))
            throw ConfigError("rectangle: need a1 <= b1 and a2 <= b2");
        return ConstraintSet(Rectangle{a1, b1, a2, b2});
    }
    static ConstraintSet sublevel(ScalarCurve f, double lo, double hi)
    {
        if (!(lo <= hi))
            throw ConfigError("sublevel: need lo <= hi");
        return ConstraintSet(Sublevel{std::move(f), lo, hi});
    }
    static ConstraintSet band(ScalarCurve lower, ScalarCurve upper, double lo, double hi)
    {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw ConfigError("band: need finite lo <= hi");
        return ConstraintSet(Band{std::move(lower), std::move(upper), lo, hi});
    }
    static ConstraintSet cone(double m1, double m2)
    {
        if (!(m1 > 0.0) || !(m2 > m1) || !std::isfinite(m2))
            throw ConfigError("cone: need 0 < m1 < m2");
        return ConstraintSet(Cone{m1, m2});
    }
    static ConstraintSet curve(ScalarCurve gamma, double R)
    {
        if (!(R > 0.0) || !std::isfinite(R))
            throw ConfigError("curve: need R > 0");
        return ConstraintSet(Curve{std::move(gamma), R});
    }
    static ConstraintSet union_of(std::vector<ConstraintSet> parts)
    {
        if (parts.empty())
            throw ConfigError("union: need at least one part");
        return ConstraintSet(Union{std::move(parts)});
    }

    ConstraintSet shifted(Point by) const
    {
        ConstraintSet c = *this;
        c.shift_ = c.shift_ + by;
        return c;
    }
    ConstraintSet with_tolerance(double tol) const
    {
        if (!(tol >= 0.0))
            throw ConfigError("tol_member must be >= 0");
        ConstraintSet c = *this;
        c.tol_ = tol;
        return c;
    }
    ConstraintSet with_witness(const Witness &w) const
    {
        if (!(w.C > 0.0) || !(w.R > 0.0))
            throw ConfigError("witness: need C > 0 and R > 0");
        if (w.side != 1 && w.side != -1)
            throw ConfigError("witness: side must be +1 or -1");
        if (w.rho && !(*w.rho != 0.0))
            throw ConfigError("witness: exponent rho must be nonzero");
        ConstraintSet c = *this;
        c.witnesses_.push_back(w);
        return c;
    }

    const Shape &shape() const { return shape_; }
    Point shift() const { return shift_; }
    double tol_member() const { return tol_; }
    const std::vector<Witness> &witnesses() const { return witnesses_; }

    /// Signed distance surrogate: <= 0 inside, > 0 outside, never larger than
    /// the exact distance to the set to first order.
    double violation(Point p) const
    {
        const Point q = p - shift_;
        return std::visit([&](const auto &s) { return violation_of(s, q); }, shape_);
    }

    bool contains(Point p) const { return within(p, tol_); }

    Box bounding_box() const
    {
        Box b = std::visit([&](const auto &s) { return box_of(s); }, shape_);
        return {b.x1_lo + shift_.x1, b.x1_hi + shift_.x1, b.x2_lo + shift_.x2, b.x2_hi + shift_.x2};
    }

private:
    explicit ConstraintSet(Shape s) : shape_(std::move(s)) {}

    /// Same answer as violation(p) <= tol; graph terms skip the slope when the
    /// raw vertical gap already decides.
    bool within(Point p, double tol) const
    {
        const Point q = p - shift_;
        return std::visit([&](const auto &s) { return within_of(s, q, tol); }, shape_);
    }
    template <class S> static bool within_of(const S &s, Point q, double tol) { return violation_of(s, q) <= tol; }
    static bool graph_within(const ScalarCurve &f, double sgn, Point q, double tol)
    {
        if (sgn * (f(q.x1) - q.x2) <= tol)
            return true;
        return sgn * detail::graph_distance(f, q.x1, q.x2) <= tol;
    }
    static bool within_of(const Band &b, Point q, double tol)
    {
        if (b.lo - q.x1 > tol || q.x1 - b.hi > tol)
            return false;
        return graph_within(b.lower, 1.0, q, tol) && graph_within(b.upper, -1.0, q, tol);
    }
    static bool within_of(const Sublevel &s, Point q, double tol)
    {
        if (s.lo - q.x1 > tol || q.x1 - s.hi > tol)
            return false;
        return graph_within(s.f, 1.0, q, tol);
    }
    static bool within_of(const Union &u, Point q, double tol)
    {
        for (const auto &part : u.parts)
            if (part.within(q, tol))
                return true;
        return false;
    }

    static double violation_of(const Rectangle &r, Point q)
    {
        return std::max({r.a1 - q.x1, q.x1 - r.b1, r.a2 - q.x2, q.x2 - r.b2});
    }
    static double violation_of(const Sublevel &s, Point q)
    {
        return std::max({detail::graph_distance(s.f, q.x1, q.x2), s.lo - q.x1, q.x1 - s.hi});
    }
    static double violation_of(const Band &b, Point q)
    {
        return std::max({detail::graph_distance(b.lower, q.x1, q.x2), -detail::graph_distance(b.upper, q.x1, q.x2),
                         b.lo - q.x1, q.x1 - b.hi});
    }
    static double violation_of(const Cone &c, Point q)
    {
        return std::max((c.m1 * q.x1 - q.x2) / std::sqrt(1.0 + c.m1 * c.m1),
                        (q.x2 - c.m2 * q.x1) / std::sqrt(1.0 + c.m2 * c.m2));
    }
    static double violation_of(const Curve &c, Point q)
    {
        return std::max({std::abs(detail::graph_distance(c.gamma, q.x1, q.x2)), -q.x1, q.x1 - c.R});
    }
    static double violation_of(const Union &u, Point q)
    {
        double v = kInf;
        for (const auto &part : u.parts)
            v = std::min(v, part.violation(q));
        return v;
    }

    static std::pair<double, double> range_of(const ScalarCurve &f, double lo, double hi)
    {
        double mn = kInf, mx = -kInf;
        const int n = 512;
        for (int i = 0; i <= n; ++i)
        {
            double v = f(lo + (hi - lo) * i / n);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        return {mn, mx};
    }
    static Box box_of(const Rectangle &r) { return {r.a1, r.b1, r.a2, r.b2}; }
    static Box box_of(const Sublevel &s)
    {
        if (!std::isfinite(s.lo) || !std::isfinite(s.hi))
            return {s.lo, s.hi, -kInf, kInf};
        return {s.lo, s.hi, range_of(s.f, s.lo, s.hi).first, kInf};
    }
    static Box box_of(const Band &b)
    {
        return {b.lo, b.hi, range_of(b.lower, b.lo, b.hi).first, range_of(b.upper, b.lo, b.hi).second};
    }
    static Box box_of(const Cone &) { return {0.0, kInf, 0.0, kInf}; }
    static Box box_of(const Curve &c)
    {
        auto [mn, mx] = range_of(c.gamma, 0.0, c.R);
        return {0.0, c.R, mn, mx};
    }
    static Box box_of(const Union &u)
    {
        Box b{kInf, -kInf, kInf, -kInf};
        for (const auto &part : u.parts)
            b = b.hull(part.bounding_box());
        return b;
    }

    Shape shape_;
    Point shift_{};
    double tol_ = kDefaultTolMember;
    std::vector<Witness> witnesses_;
};

inline bool contains(const ConstraintSet &set, Point p) { return set.contains(p); }

// ---------------------------------------------------------------------------
// x1-convexity

struct X1ConvexViolation
{
    Point left;  ///< member point
    Point right; ///< member point at the same height, to the right
    Point gap;   ///< non-member point strictly between them
};

struct X1ConvexReport
{
    std::vector<X1ConvexViolation> violations;
    int levels_checked = 0;
};

namespace detail
{
/// Scans horizontal lines and reports every pair of members separated by a
/// non-member grid point.
template <class Member>
void scan_levels(const Member &member, const Box &box, const std::vector<double> &levels, int n_grid,
                 X1ConvexReport &report)
{
    const double dx = (box.x1_hi - box.x1_lo) / n_grid;
    for (double y : levels)
    {
        ++report.levels_checked;
        std::optional<Point> last_in;
        std::optional<Point> first_gap;
        for (int i = 0; i <= n_grid; ++i)
        {
            Point q{box.x1_lo + dx * i, y};
            if (member(q))
            {
                if (last_in && first_gap)
                    report.violations.push_back({*last_in, q, *first_gap});
                last_in = q;
                first_gap.reset();
            }
            else if (last_in && !first_gap)
            {
                first_gap = q;
            }
        }
    }
}
} // namespace detail

/// Falsifier for x1-convexity: samples `n_samples` random heights and checks
/// that the members of each horizontal line form one interval at the grid
/// resolution. Unbounded sides of the set are clipped (Box::clipped).
inline X1ConvexReport check_x1_convex(const ConstraintSet &set, int n_samples, std::uint64_t seed,
                                      int n_grid = 1024)
{
    if (n_samples < 1)
        throw ConfigError("check_x1_convex: n_samples must be >= 1");
    const Box box = set.bounding_box().clipped();
    Rng rng(seed);
    std::vector<double> levels(static_cast<std::size_t>(n_samples));
    for (auto &y : levels)
        y = rng.uniform(box.x2_lo, box.x2_hi);
    X1ConvexReport report;
    detail::scan_levels([&](Point q) { return set.contains(q); }, box, levels, n_grid, report);
    return report;
}

// ---------------------------------------------------------------------------
// Point classification

enum class BoundaryKind
{
    interior,
    boundary_off_axis,
    boundary_on_axis,
};

inline std::string to_string(BoundaryKind k)
{
    switch (k)
    {
    case BoundaryKind::interior: return "interior";
    case BoundaryKind::boundary_off_axis: return "boundary_off_axis";
    case BoundaryKind::boundary_on_axis: return "boundary_on_axis";
    }
    return "?";
}

struct BoundaryClass
{
    BoundaryKind kind = BoundaryKind::interior;
    bool is_characteristic = false;
};

namespace detail
{
inline bool flat_graph_at(const ScalarCurve &f, Point q, double tol, double fd_step)
{
    if (std::abs(f(q.x1) - q.x2) > tol || std::abs(f.slope(q.x1, fd_step)) > 1e-6)
        return false;
    // the centered difference cannot see a symmetric cusp such as |x1|^(1/2)
    const double right = (f(q.x1 + fd_step) - f(q.x1)) / fd_step;
    const double left = (f(q.x1) - f(q.x1 - fd_step)) / fd_step;
    return std::max(std::abs(right), std::abs(left)) <= std::sqrt(fd_step);
}

/// Whether the boundary of one variant near q is a graph x2 = f(x1) with f' = 0.
inline bool flat_boundary(const ConstraintSet &set, Point p, double fd_step)
{
    const Point q = p - set.shift();
    const double tol = set.tol_member();
    return std::visit(
        [&](const auto &s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Rectangle>)
                return std::abs(q.x2 - s.a2) <= tol || std::abs(q.x2 - s.b2) <= tol;
            else if constexpr (std::is_same_v<S, Sublevel>)
                return flat_graph_at(s.f, q, tol, fd_step);
            else if constexpr (std::is_same_v<S, Band>)
                return flat_graph_at(s.lower, q, tol, fd_step) || flat_graph_at(s.upper, q, tol, fd_step);
            else if constexpr (std::is_same_v<S, Curve>)
                return flat_graph_at(s.gamma, q, tol, fd_step);
            else if constexpr (std::is_same_v<S, Union>)
            {
                for (const auto &part : s.parts)
                    if (part.contains(q) && flat_boundary(part, q, fd_step))
                        return true;
                return false;
            }
            else
                return false;
        },
        set.shape());
}
} // namespace detail

/// Interior when every sampled point of the closed disc of radius
/// `probe_radius` belongs to the set; otherwise boundary, split by x1 = 0.
/// Characteristic points are on-axis boundary points where the boundary is
/// locally a graph with vanishing slope (centered difference with `fd_step`).
inline BoundaryClass classify_point(const ConstraintSet &set, Point p, double probe_radius, double fd_step = 1e-6)
{
    if (!set.contains(p))
        throw DomainError("classify_point: point outside the constraint set");
    if (!(probe_radius > 0.0))
        throw ConfigError("classify_point: probe_radius must be > 0");
    bool inside = true;
    const int n_angles = 32;
    for (int ring = 1; ring <= 4 && inside; ++ring)
    {
        const double r = probe_radius * ring / 4.0;
        for (int k = 0; k < n_angles; ++k)
        {
            const double th = 2.0 * M_PI * k / n_angles;
            if (!set.contains({p.x1 + r * std::cos(th), p.x2 + r * std::sin(th)}))
            {
                inside = false;
                break;
            }
        }
    }
    if (inside)
        return {BoundaryKind::interior, false};
    if (std::abs(p.x1) > set.tol_member())
        return {BoundaryKind::boundary_off_axis, false};
    return {BoundaryKind::boundary_on_axis, detail::flat_boundary(set, p, fd_step)};
}

// ---------------------------------------------------------------------------
// Reachability hypotheses

struct WitnessReport
{
    std::size_t witness_index = 0;
    bool pass = false;
    double max_violation = 0.0;
    bool local_x1_convex = true;
};

/// Samples each witness curve at resolution `grid_step` over (0, R] and checks
/// containment; also re-runs the x1-convexity falsifier on the set restricted
/// to the ball B_R(x0).
inline std::vector<WitnessReport> verify_hypotheses(const ConstraintSet &set, double nu, double grid_step)
{
    if (!(nu > 0.0))
        throw ConfigError("verify_hypotheses: nu must be > 0");
    if (!(grid_step > 0.0))
        throw ConfigError("verify_hypotheses: grid_step must be > 0");
    if (set.witnesses().empty())
        throw ConfigError("verify_hypotheses: the set carries no witnesses");

    std::vector<WitnessReport> out;
    for (std::size_t i = 0; i < set.witnesses().size(); ++i)
    {
        const Witness &w = set.witnesses()[i];
        const bool on_axis = std::abs(w.x0.x1) <= set.tol_member();
        if (is_power_curve(w.family))
        {
            if (!on_axis && !w.rho)
                throw ConfigError("witness " + std::to_string(i) +
                                  ": power curve at an off-axis point needs an explicit exponent rho");
            if (on_axis && w.rho && !(*w.rho > nu + 0.5))
                throw ConfigError("witness " + std::to_string(i) + ": on-axis exponent rho must exceed nu + 1/2");
        }
        if (!set.contains(w.x0))
            throw ConfigError("witness " + std::to_string(i) + ": base point outside the set");

        WitnessReport rep;
        rep.witness_index = i;
        const int n = std::max(1, static_cast<int>(std::ceil(w.R / grid_step)));
        for (int k = 1; k <= n; ++k)
        {
            const double u = w.R * k / n;
            rep.max_violation = std::max(rep.max_violation, set.violation(w.at(u, nu)));
        }
        rep.max_violation = std::max(0.0, rep.max_violation);

        const Box ball{w.x0.x1 - w.R, w.x0.x1 + w.R, w.x0.x2 - w.R, w.x0.x2 + w.R};
        const int n_grid = std::clamp(static_cast<int>(std::ceil(2.0 * w.R / grid_step)), 16, 2048);
        const int n_levels = std::clamp(static_cast<int>(std::ceil(2.0 * w.R / grid_step)), 8, 256);
        std::vector<double> levels;
        for (int k = 0; k < n_levels; ++k)
            levels.push_back(ball.x2_lo + (ball.x2_hi - ball.x2_lo) * (k + 0.5) / n_levels);
        X1ConvexReport local;
        detail::scan_levels([&](Point q) { return distance(q, w.x0) <= w.R && set.contains(q); }, ball, levels,
                            n_grid, local);
        rep.local_x1_convex = local.violations.empty();
        rep.pass = rep.max_violation <= set.tol_member() && rep.local_x1_convex;
        out.push_back(rep);
    }
    return out;
}

} // namespace grushin

#endif // GRUSHIN_GEOMETRY_HPP
