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

#ifndef GRUSHIN_MFG_HPP
#define GRUSHIN_MFG_HPP

#include "grushin/core.hpp"
#include "grushin/dynamics.hpp"
#include "grushin/geometry.hpp"
#include "grushin/ocp.hpp"
#include "grushin/random.hpp"
#include "grushin/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace grushin
{

// ---------------------------------------------------------------------------
// Couplings

enum class CouplingKind
{
    kernel_congestion,
    mean_attraction,
    custom
};

inline std::string to_string(CouplingKind k)
{
    switch (k)
    {
    case CouplingKind::kernel_congestion:
        return "kernel_congestion";
    case CouplingKind::mean_attraction:
        return "mean_attraction";
    case CouplingKind::custom:
        return "custom";
    }
    return "?";
}

/// Running cost L[m](x, t) and terminal cost G[m](x).
///
/// kernel_congestion: ell0(x, t) + strength * sum_j w_j k((x - z_j)/h), with
/// the Gaussian k(r) = exp(-|r|^2/2) (k(0) = 1, positive definite).
/// mean_attraction: ell0(x, t) + strength * |x - mean(m)|^2.
/// The terminal cost is the same with g0 and terminal_strength. Both are
/// clipped to [-bound_K, bound_K].
struct CouplingSpec
{
    CouplingKind kind = CouplingKind::kernel_congestion;
    std::function<double(Point, double)> ell0 = [](Point, double) { return 0.0; };
    std::function<double(Point)> g0 = [](Point) { return 0.0; };
    double strength = 1.0;
    double terminal_strength = 1.0;
    double bandwidth = 0.2;
    double bound_K = 1.0;
    double T = 1.0;
    std::function<double(Point, double, const AtomicMeasure &)> custom_L;
    std::function<double(Point, const AtomicMeasure &)> custom_G;

    void validate() const
    {
        if (!(bandwidth > 0.0))
            throw ConfigError("coupling: bandwidth must be > 0");
        if (!(bound_K > 0.0))
            throw ConfigError("coupling: bound_K must be > 0");
        if (!(T > 0.0))
            throw ConfigError("coupling: T must be > 0");
        if (kind == CouplingKind::custom && (!custom_L || !custom_G))
            throw ConfigError("coupling: custom kind needs both custom_L and custom_G");
    }
};

inline double gaussian_kernel(Point d, double h) { return std::exp(-0.5 * (d.x1 * d.x1 + d.x2 * d.x2) / (h * h)); }

namespace detail
{

inline double interaction(const CouplingSpec &spec, const AtomicMeasure &m, Point x, double strength)
{
    if (strength == 0.0)
        return 0.0;
    if (spec.kind == CouplingKind::mean_attraction)
    {
        const Point d = x - m.mean();
        return strength * (d.x1 * d.x1 + d.x2 * d.x2);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j)
        s += m.weights[j] * gaussian_kernel(x - m.points[j], spec.bandwidth);
    return strength * s;
}

inline double clip(double v, double K) { return std::clamp(v, -K, K); }

} // namespace detail

struct CouplingValue
{
    double L = 0.0;
    double G = 0.0;
};

/// Unclipped values.
inline CouplingValue coupling_eval_raw(const CouplingSpec &spec, const AtomicMeasure &m, Point x, double t)
{
    spec.validate();
    if (spec.kind == CouplingKind::custom)
        return {spec.custom_L(x, t, m), spec.custom_G(x, m)};
    return {spec.ell0(x, t) + detail::interaction(spec, m, x, spec.strength),
            spec.g0(x) + detail::interaction(spec, m, x, spec.terminal_strength)};
}

inline CouplingValue coupling_eval(const CouplingSpec &spec, const AtomicMeasure &m, Point x, double t)
{
    const auto raw = coupling_eval_raw(spec, m, x, t);
    return {detail::clip(raw.L, spec.bound_K), detail::clip(raw.G, spec.bound_K)};
}

inline double coupling_running(const CouplingSpec &spec, const AtomicMeasure &m, Point x, double t)
{
    if (spec.kind == CouplingKind::custom)
        return detail::clip(spec.custom_L(x, t, m), spec.bound_K);
    return detail::clip(spec.ell0(x, t) + detail::interaction(spec, m, x, spec.strength), spec.bound_K);
}

inline double coupling_terminal(const CouplingSpec &spec, const AtomicMeasure &m, Point x)
{
    if (spec.kind == CouplingKind::custom)
        return detail::clip(spec.custom_G(x, m), spec.bound_K);
    return detail::clip(spec.g0(x) + detail::interaction(spec, m, x, spec.terminal_strength), spec.bound_K);
}

// ---------------------------------------------------------------------------
// Measures on trajectories

struct TrajectoryAtom
{
    Trajectory traj;
    std::size_t origin = 0; ///< index of the initial atom in m0
    std::uint64_t count = 0;
};

/// Finite measure on trajectories with its initial marginal pinned by
/// integer bookkeeping: the weight of an atom is m0.weights[origin] * count /
/// totals[origin], and the counts of each origin add up to its total, so the
/// initial marginal is m0 by construction.
struct TrajectoryMeasure
{
    AtomicMeasure m0;
    std::vector<TrajectoryAtom> atoms;
    std::vector<std::uint64_t> totals;
    double T = 1.0;

    std::size_t size() const { return atoms.size(); }

    double weight(std::size_t a) const
    {
        const auto &at = atoms[a];
        return m0.weights[at.origin] * static_cast<double>(at.count) / static_cast<double>(totals[at.origin]);
    }

    /// Stay-put trajectory for every initial atom.
    static TrajectoryMeasure stay_put(const AtomicMeasure &m0, double T, double nu, int n_steps)
    {
        m0.validate();
        TrajectoryMeasure mu;
        mu.m0 = m0;
        mu.T = T;
        for (std::size_t o = 0; o < m0.size(); ++o)
        {
            mu.atoms.push_back(
                {integrate(m0.points[o], ControlSignal::uniform(0.0, T, std::vector<ControlValue>(n_steps)), nu), o, 1});
            mu.totals.push_back(1);
        }
        return mu;
    }

    /// True when the counts of every origin add up to its total.
    bool pinned() const
    {
        std::vector<std::uint64_t> s(totals.size(), 0);
        for (const auto &a : atoms)
        {
            if (a.origin >= totals.size() || a.traj.start() != m0.points[a.origin])
                return false;
            s[a.origin] += a.count;
        }
        return s == totals;
    }

    /// Largest |y(t)| over atoms and recorded states (|y1| is linear on each
    /// piece, so the recorded nodes carry the maximum of |y1|).
    double max_state_norm() const
    {
        double m = 0.0;
        for (const auto &a : atoms)
            for (Point p : a.traj.states)
                m = std::max(m, p.norm());
        return m;
    }

    double max_control_l2() const
    {
        double m = 0.0;
        for (const auto &a : atoms)
            m = std::max(m, a.traj.control.l2_norm());
        return m;
    }

    /// The C of the trajectory class: max of sup|y| and ||alpha||_2 over atoms.
    double c_bound() const { return std::max(max_state_norm(), max_control_l2()); }
};

/// m(t) = e_t # mu, with coincident points merged.
inline AtomicMeasure pushforward_at(const TrajectoryMeasure &mu, double t, double tol = kDefaultTolMember)
{
    AtomicMeasure m;
    for (std::size_t a = 0; a < mu.size(); ++a)
        m.push(mu.atoms[a].traj.state_at(t), mu.weight(a));
    return merged(m, tol);
}

/// Largest weight or position mismatch between e_0 # mu and m0 (atom for
/// atom after merging both); infinite when the supports differ in size.
inline double initial_marginal_error(const TrajectoryMeasure &mu, double tol = kDefaultTolMember)
{
    const AtomicMeasure a = pushforward_at(mu, 0.0, tol), b = merged(mu.m0, tol);
    if (a.size() != b.size())
        return kInf;
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max({e, std::abs(a.weights[i] - b.weights[i]), distance(a.points[i], b.points[i])});
    return e;
}

/// Frozen m^mu(t) with a per-time cache, turned into a CostSpec for the
/// single-agent solvers.
class FrozenField
{
public:
    FrozenField(const TrajectoryMeasure &mu, CouplingSpec spec) : mu_(mu), spec_(std::move(spec)) {}

    const AtomicMeasure &at(double t)
    {
        auto it = cache_.find(t);
        if (it == cache_.end())
            it = cache_.emplace(t, pushforward_at(mu_, t)).first;
        return it->second;
    }

    double running(Point x, double t) { return coupling_running(spec_, at(t), x, t); }
    double terminal(Point x) { return coupling_terminal(spec_, at(spec_.T), x); }

    const CouplingSpec &spec() const { return spec_; }

private:
    const TrajectoryMeasure &mu_;
    CouplingSpec spec_;
    std::map<double, AtomicMeasure> cache_;
};

/// J^mu as a CostSpec; the field must outlive the returned spec.
inline CostSpec frozen_cost(const std::shared_ptr<FrozenField> &f)
{
    CostSpec c;
    c.ell = [f](Point x, double t) { return f->running(x, t); };
    c.g = [f](Point x) { return f->terminal(x); };
    c.bound_K = f->spec().bound_K;
    c.T = f->spec().T;
    return c;
}

// ---------------------------------------------------------------------------
// Best responses and exploitability

struct BestResponse
{
    Trajectory traj;
    double value = 0.0;
    std::optional<std::size_t> atom; ///< set when an existing atom is at least as good
    bool converged = false;
};

struct ExploitabilityReport
{
    double value = 0.0; ///< sum_a w_a (J(y_a) - u(x_a))
    double gap = 0.0;   ///< max_a (J(y_a) - u(x_a))
    std::vector<double> atom_costs;
    std::vector<double> origin_values;
    std::vector<BestResponse> responses;
};

namespace detail
{

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xBF58476D1CE4E5B9ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Best response of every initial atom against frozen mu. The value of an
/// origin is the smaller of the solver's value and the costs of the atoms of
/// mu that start there, so the report is never negative.
inline ExploitabilityReport best_responses(const TrajectoryMeasure &mu, const ConstraintSet &set, double nu,
                                           const CouplingSpec &spec, const OcpDisc &disc, std::uint64_t salt,
                                           const std::vector<std::optional<ControlSignal>> &warm)
{
    auto field = std::make_shared<FrozenField>(mu, spec);
    const CostSpec cs = frozen_cost(field);
    ExploitabilityReport rep;
    rep.atom_costs.resize(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a)
        rep.atom_costs[a] = cost_breakdown(mu.atoms[a].traj, cs, 0.0).total;

    for (std::size_t o = 0; o < mu.m0.size(); ++o)
    {
        OcpDisc d = disc;
        d.seed = mix_seed(disc.seed, salt, o);
        std::vector<ControlSignal> ws;
        if (o < warm.size() && warm[o])
            ws.push_back(*warm[o]);
        auto sol = solve_trajectory(mu.m0.points[o], 0.0, set, nu, cs, d, ws);
        BestResponse br;
        br.converged = sol.converged;
        br.value = sol.value;
        br.traj = std::move(sol.traj);
        const double tie = 1e-12 * std::max(1.0, std::abs(br.value));
        for (std::size_t a = 0; a < mu.size(); ++a)
            if (mu.atoms[a].origin == o && rep.atom_costs[a] <= br.value + tie &&
                (!br.atom || rep.atom_costs[a] < rep.atom_costs[*br.atom]))
                br.atom = a;
        if (br.atom)
        {
            br.value = rep.atom_costs[*br.atom];
            br.traj = mu.atoms[*br.atom].traj;
        }
        rep.origin_values.push_back(br.value);
        rep.responses.push_back(std::move(br));
    }
    for (std::size_t a = 0; a < mu.size(); ++a)
    {
        const double d = std::max(0.0, rep.atom_costs[a] - rep.origin_values[mu.atoms[a].origin]);
        rep.value += mu.weight(a) * d;
        rep.gap = std::max(rep.gap, d);
    }
    return rep;
}

} // namespace detail

/// Weighted violation of support optimality: how much the atoms of mu lose
/// against a best response computed under the costs mu itself induces.
inline ExploitabilityReport exploitability(const TrajectoryMeasure &mu, const ConstraintSet &set, double nu,
                                           const CouplingSpec &spec, const OcpDisc &disc)
{
    spec.validate();
    if (!mu.m0.normalized())
        throw DomainError("exploitability: initial measure is not normalized");
    return detail::best_responses(mu, set, nu, spec, disc, 0, {});
}

// ---------------------------------------------------------------------------
// Fictitious play

struct FictitiousPlayOptions
{
    int n_iters = 200;
    OcpDisc disc{16, 1, 10.0, 100, 0, 1e-6, 1e-5};
    double prune_tol = 1e-10;
    /// W1 between successive m(t) is evaluated on every `w1_stride`-th node
    /// time of the solver grid (the end point is always included).
    int w1_stride = 1;
    /// Evaluate exploitability of the final iterate (one more round of solves).
    bool final_round = true;
};

struct EquilibriumDiagnostics
{
    std::vector<double> exploitability; ///< entry k for the k-th iterate
    std::vector<double> w1_successive;  ///< entry k: sup_t W1(m^k(t), m^{k+1}(t))
    std::vector<std::size_t> atom_counts;
    std::vector<double> marginal_error;
    bool pinned = true;
    double final_gap = 0.0;
    double c_tilde = 0.0;
    double max_control_l2 = 0.0;
    std::size_t unconverged_solves = 0;
    int iterations = 0;
    std::string failure;
};

struct FictitiousPlayResult
{
    TrajectoryMeasure mu;
    EquilibriumDiagnostics diag;
};

/// Harmonic-weight fictitious play: mu^{k+1} = (k mu^k + beta^k)/(k + 1)
/// with beta^k the best responses of the initial atoms against m^{mu^k}.
/// Starts from stay-put trajectories; the first update replaces them.
inline FictitiousPlayResult fictitious_play(const AtomicMeasure &m0, const ConstraintSet &set, double nu,
                                            const CouplingSpec &spec, const FictitiousPlayOptions &opt)
{
    spec.validate();
    m0.validate();
    if (!m0.normalized())
        throw DomainError("fictitious_play: m0 must have total mass 1");
    for (Point p : m0.points)
        if (!set.contains(p))
            throw DomainError("fictitious_play: an initial atom lies outside the constraint set");
    if (opt.n_iters < 0 || opt.w1_stride < 1)
        throw ConfigError("fictitious_play: need n_iters >= 0 and w1_stride >= 1");

    FictitiousPlayResult res;
    auto &mu = res.mu;
    auto &dg = res.diag;
    mu = TrajectoryMeasure::stay_put(m0, spec.T, nu, opt.disc.n_steps);
    dg.c_tilde = a_priori_l2_bound(spec.bound_K, spec.T);
    std::vector<std::optional<ControlSignal>> warm(m0.size());

    std::vector<double> w1_times;
    for (int i = 0; i <= opt.disc.n_steps; i += opt.w1_stride)
        w1_times.push_back(i == opt.disc.n_steps ? spec.T : spec.T * i / opt.disc.n_steps);
    if (w1_times.back() != spec.T)
        w1_times.push_back(spec.T);

    auto record_marginal = [&] {
        const bool ok = mu.pinned();
        dg.pinned = dg.pinned && ok;
        dg.marginal_error.push_back(initial_marginal_error(mu));
    };
    record_marginal();

    const int rounds = opt.n_iters + (opt.final_round ? 1 : 0);
    for (int k = 0; k < rounds; ++k)
    {
        ExploitabilityReport rep;
        try
        {
            rep = detail::best_responses(mu, set, nu, spec, opt.disc, static_cast<std::uint64_t>(k), warm);
        }
        catch (const std::exception &e)
        {
            dg.failure = "iteration " + std::to_string(k) + ": " + e.what();
            break;
        }
        dg.exploitability.push_back(rep.value);
        dg.final_gap = rep.gap;
        for (const auto &br : rep.responses)
            dg.unconverged_solves += br.converged ? 0 : 1;
        if (k == opt.n_iters)
            break;

        // W1(m^k, m^{k+1}) = W1(m^k, beta^k) / (k + 1) since m^{k+1} - m^k = (beta^k - m^k)/(k + 1)
        const double theta = 1.0 / static_cast<double>(k + 1);
        double w1 = 0.0;
        for (double t : w1_times)
        {
            AtomicMeasure beta;
            for (std::size_t o = 0; o < m0.size(); ++o)
                beta.push(rep.responses[o].traj.state_at(t), m0.weights[o]);
            w1 = std::max(w1, theta * wasserstein1(pushforward_at(mu, t), merged(beta)));
        }
        dg.w1_successive.push_back(w1);

        if (k == 0)
        {
            TrajectoryMeasure next;
            next.m0 = mu.m0;
            next.T = mu.T;
            next.totals.assign(m0.size(), 1);
            for (std::size_t o = 0; o < m0.size(); ++o)
                next.atoms.push_back({rep.responses[o].traj, o, 1});
            mu = std::move(next);
        }
        else
        {
            std::vector<TrajectoryAtom> added;
            for (std::size_t o = 0; o < m0.size(); ++o)
            {
                mu.totals[o] += 1;
                const auto &br = rep.responses[o];
                if (br.atom)
                    mu.atoms[*br.atom].count += 1;
                else
                    added.push_back({br.traj, o, 1});
            }
            for (auto &a : added)
                mu.atoms.push_back(std::move(a));
        }
        for (std::size_t o = 0; o < m0.size(); ++o)
        {
            const double l2 = rep.responses[o].traj.control.l2_norm();
            dg.max_control_l2 = std::max(dg.max_control_l2, l2);
            if (l2 > dg.c_tilde * (1.0 + 1e-9))
                throw InternalError("fictitious_play: best response exceeds the a priori L2 bound");
            warm[o] = rep.responses[o].traj.control;
        }

        // prune negligible atoms; their counts leave the totals
        std::vector<TrajectoryAtom> kept;
        for (std::size_t a = 0; a < mu.size(); ++a)
        {
            if (mu.weight(a) < opt.prune_tol * mu.m0.weights[mu.atoms[a].origin])
                mu.totals[mu.atoms[a].origin] -= mu.atoms[a].count;
            else
                kept.push_back(std::move(mu.atoms[a]));
        }
        mu.atoms = std::move(kept);

        dg.atom_counts.push_back(mu.size());
        dg.iterations = k + 1;
        record_marginal();
    }
    return res;
}

// ---------------------------------------------------------------------------
// Mild solution and path regularity

struct MildSolution
{
    ValueGrid u;
    std::vector<AtomicMeasure> path; ///< m(t) at u.times
};

/// Value function under the costs frozen at m^mu, and the pushforward path at
/// the grid's time steps.
inline MildSolution mild_solution_extract(const TrajectoryMeasure &mu, const ConstraintSet &set, double nu,
                                          const CouplingSpec &spec, const GridSpec &grid)
{
    spec.validate();
    auto field = std::make_shared<FrozenField>(mu, spec);
    MildSolution ms;
    ms.u = value_grid_backward(set, nu, frozen_cost(field), grid);
    for (double t : ms.u.times)
        ms.path.push_back(field->at(t));
    return ms;
}

/// C_H = C (1 + max(1, |y|_inf)^nu) with C the largest atom L2 norm:
/// |y(t) - y(s)| <= int |a1| + |y1|^nu |a2| <= (1 + max|y1|^nu) ||a||_2 sqrt|t - s|.
inline double holder_constant(const TrajectoryMeasure &mu, double nu)
{
    return mu.max_control_l2() * (1.0 + std::pow(std::max(1.0, mu.max_state_norm()), nu));
}

struct HolderReport
{
    double c_h = 0.0;
    double max_ratio_coupling = 0.0; ///< max over pairs of sum_a w_a |y_a(t) - y_a(s)| / sqrt|t - s|, over C_H
    double max_ratio_exact = 0.0;    ///< same with exact W1, on the sampled pairs
    std::size_t pairs = 0;
    std::size_t exact_pairs = 0;
    bool pass = false;
};

/// Checks W1(m(s), m(t)) <= C_H sqrt|t - s| on every pair of `times`. The
/// synchronous coupling (each atom to itself) bounds W1 from above, which
/// certifies every pair; exact W1 is computed on every `exact_stride`-th time.
inline HolderReport holder_path_check(const TrajectoryMeasure &mu, double nu, const std::vector<double> &times,
                                      std::size_t exact_stride = 8)
{
    HolderReport rep;
    rep.c_h = holder_constant(mu, nu);
    std::vector<std::vector<Point>> pos(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        for (const auto &a : mu.atoms)
            pos[i].push_back(a.traj.state_at(times[i]));
    std::vector<AtomicMeasure> exact;
    std::vector<std::size_t> exact_idx;
    for (std::size_t i = 0; i < times.size(); i += std::max<std::size_t>(1, exact_stride))
    {
        exact.push_back(pushforward_at(mu, times[i]));
        exact_idx.push_back(i);
    }
    const double ch = rep.c_h > 0.0 ? rep.c_h : 1.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t j = i + 1; j < times.size(); ++j)
        {
            const double dt = std::abs(times[j] - times[i]);
            if (dt == 0.0)
                continue;
            double c = 0.0;
            for (std::size_t a = 0; a < mu.size(); ++a)
                c += mu.weight(a) * distance(pos[i][a], pos[j][a]);
            rep.max_ratio_coupling = std::max(rep.max_ratio_coupling, c / (ch * std::sqrt(dt)));
            ++rep.pairs;
        }
    for (std::size_t i = 0; i < exact.size(); ++i)
        for (std::size_t j = i + 1; j < exact.size(); ++j)
        {
            const double dt = std::abs(times[exact_idx[j]] - times[exact_idx[i]]);
            if (dt == 0.0)
                continue;
            rep.max_ratio_exact =
                std::max(rep.max_ratio_exact, wasserstein1(exact[i], exact[j]) / (ch * std::sqrt(dt)));
            ++rep.exact_pairs;
        }
    rep.pass = rep.c_h > 0.0 ? rep.max_ratio_coupling <= 1.0 && rep.max_ratio_exact <= 1.0
                             : rep.max_ratio_coupling == 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Monotonicity

struct MonotonicityReport
{
    double min_pairing_value = kInf;
    std::vector<double> pairings; ///< min of the running and terminal pairing, per sample pair
    bool is_monotone_on_samples = true;
};

/// int (F(x, m1) - F(x, m2)) d(m1 - m2)(x) for F = L(., t) and F = G.
inline CouplingValue pairing(const CouplingSpec &spec, const AtomicMeasure &m1, const AtomicMeasure &m2, double t)
{
    CouplingValue v;
    auto add = [&](const AtomicMeasure &m, double sgn) {
        for (std::size_t i = 0; i < m.size(); ++i)
        {
            const Point x = m.points[i];
            v.L += sgn * m.weights[i] * (coupling_running(spec, m1, x, t) - coupling_running(spec, m2, x, t));
            v.G += sgn * m.weights[i] * (coupling_terminal(spec, m1, x) - coupling_terminal(spec, m2, x));
        }
    };
    add(m1, 1.0);
    add(m2, -1.0);
    return v;
}

inline MonotonicityReport monotonicity_check(const CouplingSpec &spec,
                                             const std::vector<std::pair<AtomicMeasure, AtomicMeasure>> &samples,
                                             double t = 0.0)
{
    spec.validate();
    MonotonicityReport rep;
    for (const auto &[a, b] : samples)
    {
        if (!a.normalized() || !b.normalized())
            throw DomainError("monotonicity_check: sample measures must be normalized");
        const auto v = pairing(spec, a, b, t);
        const double m = std::min(v.L, v.G);
        rep.pairings.push_back(m);
        rep.min_pairing_value = std::min(rep.min_pairing_value, m);
    }
    rep.is_monotone_on_samples = rep.min_pairing_value >= -1e-9;
    return rep;
}

/// n atoms drawn uniformly from the set's bounding box (rejection), with
/// random positive weights normalized to 1.
inline AtomicMeasure random_measure(const ConstraintSet &set, std::size_t n, Rng &rng)
{
    AtomicMeasure m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        bool found = false;
        const Point p = detail::sample_member(set, rng, found);
        if (!found)
            throw ConfigError("random_measure: could not sample a point of the set");
        const double w = 0.05 + rng.uniform01();
        m.push(p, w);
        s += w;
    }
    for (auto &w : m.weights)
        w /= s;
    return m;
}

} // namespace grushin

#endif // GRUSHIN_MFG_HPP
