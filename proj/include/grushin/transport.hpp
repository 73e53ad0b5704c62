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

#ifndef GRUSHIN_TRANSPORT_HPP
#define GRUSHIN_TRANSPORT_HPP

#include "grushin/core.hpp"
#include "grushin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace grushin
{

/// Finitely supported measure on the plane.
struct AtomicMeasure
{
    std::vector<Point> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }

    double total() const
    {
        double s = 0.0;
        for (double w : weights)
            s += w;
        return s;
    }

    bool normalized(double tol = 1e-10) const { return std::abs(total() - 1.0) <= tol; }

    Point mean() const
    {
        Point m;
        for (std::size_t i = 0; i < size(); ++i)
            m = m + weights[i] * points[i];
        return m;
    }

    void push(Point p, double w)
    {
        points.push_back(p);
        weights.push_back(w);
    }

    static AtomicMeasure dirac(Point p) { return {{p}, {1.0}}; }

    /// Equal weights on the given points.
    static AtomicMeasure uniform(const std::vector<Point> &pts)
    {
        AtomicMeasure m;
        for (Point p : pts)
            m.push(p, 1.0 / static_cast<double>(pts.size()));
        return m;
    }

    void validate() const
    {
        if (points.size() != weights.size())
            throw ConfigError("measure: points and weights differ in length");
        if (points.empty())
            throw ConfigError("measure: no atoms");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw ConfigError("measure: weights must be positive and finite");
    }

    /// Largest distance of an atom outside the set (0 when the support is inside).
    double support_violation(const ConstraintSet &set) const
    {
        double v = 0.0;
        for (Point p : points)
            v = std::max(v, set.violation(p));
        return v;
    }
};

/// Sorts atoms lexicographically and merges runs of points within `tol` of the
/// first point of the run. Weights are summed in sorted order.
inline AtomicMeasure merged(const AtomicMeasure &m, double tol = kDefaultTolMember)
{
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Point p = m.points[a], q = m.points[b];
        return p.x1 < q.x1 || (p.x1 == q.x1 && p.x2 < q.x2);
    });
    AtomicMeasure out;
    std::vector<char> used(m.size(), 0);
    for (std::size_t k = 0; k < idx.size(); ++k)
    {
        const std::size_t i = idx[k];
        if (used[i])
            continue;
        used[i] = 1;
        double w = m.weights[i];
        // x1-sorted, so candidates lie in a window of width tol
        for (std::size_t l = k + 1; l < idx.size() && m.points[idx[l]].x1 - m.points[i].x1 <= tol; ++l)
        {
            const std::size_t j = idx[l];
            if (!used[j] && distance(m.points[i], m.points[j]) <= tol)
            {
                used[j] = 1;
                w += m.weights[j];
            }
        }
        out.push(m.points[i], w);
    }
    return out;
}

namespace detail
{

/// Transportation problem solved by the primal network simplex on the
/// complete bipartite graph: northwest-corner start on x1-sorted atoms,
/// Dantzig pricing, spanning-tree basis with potentials rebuilt per pivot.
class TransportSimplex
{
public:
    TransportSimplex(const std::vector<double> &a, const std::vector<double> &b, std::vector<double> cost)
        : m_(a.size()), n_(b.size()), c_(std::move(cost))
    {
        northwest_corner(a, b);
    }

    double solve()
    {
        double cmax = 0.0;
        for (double c : c_)
            cmax = std::max(cmax, c);
        const double eps = 1e-13 * std::max(1.0, cmax);
        const std::size_t max_pivots = 100 * (m_ + n_) * (m_ + n_) + 1000;
        for (std::size_t it = 0; it < max_pivots; ++it)
        {
            build_tree();
            std::size_t bi = 0, bj = 0;
            double best = -eps;
            for (std::size_t i = 0; i < m_; ++i)
            {
                const double ui = pot_[i];
                const double *row = &c_[i * n_];
                for (std::size_t j = 0; j < n_; ++j)
                {
                    const double r = row[j] - ui - pot_[m_ + j];
                    if (r < best)
                    {
                        best = r;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (best == -eps)
                return objective();
            pivot(bi, bj);
        }
        throw InternalError("wasserstein1: simplex pivot limit reached");
    }

private:
    struct Edge
    {
        std::size_t i, j;
        double flow;
    };

    void northwest_corner(const std::vector<double> &a, const std::vector<double> &b)
    {
        std::size_t i = 0, j = 0;
        double ra = a[0], rb = b[0];
        for (;;)
        {
            const double f = std::min(ra, rb);
            edges_.push_back({i, j, f});
            const bool a_done = ra <= rb;
            ra -= f;
            rb -= f;
            if (i + 1 == m_ && j + 1 == n_)
                break;
            if ((a_done && i + 1 < m_) || j + 1 == n_)
            {
                ++i;
                ra = a[i];
            }
            else
            {
                ++j;
                rb = b[j];
            }
        }
    }

    void build_tree()
    {
        const std::size_t N = m_ + n_;
        adj_.assign(N, {});
        for (std::size_t e = 0; e < edges_.size(); ++e)
        {
            adj_[edges_[e].i].push_back(e);
            adj_[m_ + edges_[e].j].push_back(e);
        }
        pot_.assign(N, 0.0);
        parent_edge_.assign(N, SIZE_MAX);
        depth_.assign(N, SIZE_MAX);
        std::vector<std::size_t> queue{0};
        depth_[0] = 0;
        for (std::size_t q = 0; q < queue.size(); ++q)
        {
            const std::size_t u = queue[q];
            for (std::size_t e : adj_[u])
            {
                const std::size_t s = edges_[e].i, t = m_ + edges_[e].j;
                const std::size_t w = u == s ? t : s;
                if (depth_[w] != SIZE_MAX)
                    continue;
                depth_[w] = depth_[u] + 1;
                parent_edge_[w] = e;
                // c_ij = u_i + v_j on basic edges
                pot_[w] = c_[edges_[e].i * n_ + edges_[e].j] - pot_[u];
                queue.push_back(w);
            }
        }
        if (queue.size() != N)
            throw InternalError("wasserstein1: basis is not a spanning tree");
    }

    std::size_t other(std::size_t e, std::size_t u) const
    {
        const std::size_t s = edges_[e].i, t = m_ + edges_[e].j;
        return u == s ? t : s;
    }

    void pivot(std::size_t i, std::size_t j)
    {
        // tree path from sink j to source i; signs alternate starting with minus
        std::vector<std::size_t> from_j, from_i;
        std::size_t p = m_ + j, q = i;
        while (p != q)
        {
            if (depth_[p] >= depth_[q])
            {
                from_j.push_back(parent_edge_[p]);
                p = other(parent_edge_[p], p);
            }
            else
            {
                from_i.push_back(parent_edge_[q]);
                q = other(parent_edge_[q], q);
            }
        }
        std::vector<std::size_t> path = from_j;
        path.insert(path.end(), from_i.rbegin(), from_i.rend());

        std::size_t leave = SIZE_MAX;
        double theta = kInf;
        for (std::size_t k = 0; k < path.size(); k += 2)
            if (edges_[path[k]].flow < theta)
            {
                theta = edges_[path[k]].flow;
                leave = path[k];
            }
        for (std::size_t k = 0; k < path.size(); ++k)
            edges_[path[k]].flow += k % 2 == 0 ? -theta : theta;
        edges_[leave] = {i, j, theta};
    }

    double objective() const
    {
        double s = 0.0;
        for (const auto &e : edges_)
            s += e.flow * c_[e.i * n_ + e.j];
        return s;
    }

    std::size_t m_, n_;
    std::vector<double> c_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<double> pot_;
    std::vector<std::size_t> parent_edge_;
    std::vector<std::size_t> depth_;
};

} // namespace detail

/// Exact Wasserstein-1 distance with Euclidean ground cost between two
/// normalized atomic measures.
inline double wasserstein1(const AtomicMeasure &a, const AtomicMeasure &b)
{
    a.validate();
    b.validate();
    if (!a.normalized() || !b.normalized())
        throw DomainError("wasserstein1: measures must have total mass 1");
    if (a.size() == 1 || b.size() == 1)
    {
        const AtomicMeasure &many = a.size() == 1 ? b : a;
        const Point c = a.size() == 1 ? a.points[0] : b.points[0];
        double s = 0.0;
        for (std::size_t k = 0; k < many.size(); ++k)
            s += many.weights[k] * distance(many.points[k], c);
        return s;
    }
    auto order = [](const AtomicMeasure &m) {
        std::vector<std::size_t> idx(m.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) {
            const Point u = m.points[p], v = m.points[q];
            return u.x1 < v.x1 || (u.x1 == v.x1 && u.x2 < v.x2);
        });
        return idx;
    };
    const auto ia = order(a), ib = order(b);
    std::vector<double> wa(a.size()), wb(b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        wa[k] = a.weights[ia[k]];
    // balance exactly: rescale b to the mass of a
    const double scale = a.total() / b.total();
    for (std::size_t k = 0; k < b.size(); ++k)
        wb[k] = b.weights[ib[k]] * scale;
    std::vector<double> cost(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            cost[i * b.size() + j] = distance(a.points[ia[i]], b.points[ib[j]]);
    detail::TransportSimplex ts(wa, wb, std::move(cost));
    return std::max(0.0, ts.solve());
}

} // namespace grushin

#endif // GRUSHIN_TRANSPORT_HPP
