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

#include "grushin/reachability.hpp"

#include <gtest/gtest.h>

using namespace grushin;

namespace
{
ConstraintSet band(double nu)
{
    return ConstraintSet::band(ScalarCurve::power(1.0, nu + 1.0), ScalarCurve::constant_value(1.0), 0.0, 1.0)
        .with_witness({{0, 0}, 1.0, 1.0, CurveFamily::power_curve_pos, +1, std::nullopt});
}
} // namespace

TEST(Connect, VerticalWitnessDurations)
{
    for (double nu : {0.5, 1.0, 2.0})
    {
        auto set = ConstraintSet::rectangle(1, 2, 0, 1)
                       .with_witness({{1, 0}, 1.0, 1.0, CurveFamily::segment_vertical, +1, std::nullopt});
        auto r = connect(set, nu, {1.2, 0.5}, {1.0, 0.0});
        EXPECT_EQ(r.case_tag, ConnectCase::off_axis_vertical);
        ASSERT_EQ(r.traj.control.pieces(), 2u);
        EXPECT_NEAR(r.traj.control.breaks[1], 0.2, 1e-15);
        EXPECT_NEAR(r.traj.control.breaks[2], 0.7, 1e-15);
        EXPECT_NEAR(r.delta, 0.7, 1e-15);
        EXPECT_EQ(r.traj.control.values[0], (ControlValue{-1.0, 0.0}));
        EXPECT_NEAR(r.traj.control.values[1].a2, -1.0, 1e-15);
        EXPECT_LE(distance(r.traj.end(), {1, 0}), 1e-12);
        EXPECT_LE(r.max_violation, 1e-9);
    }
}

TEST(Connect, OnAxisPowerCurveFormula)
{
    // s1 = |0.3 - 0.2| = 0.1, s2 = 0.1 + 0.2; second leg (-1, -C(nu+1))
    ConnectOptions opt;
    auto tr = detail::curve_connector({0.3, 0.04}, detail::power_curve({0, 0}, 1, 1, 1.0, 2.0), 1.0, opt);
    ASSERT_TRUE(tr);
    ASSERT_EQ(tr->control.pieces(), 2u);
    EXPECT_NEAR(tr->control.breaks[1], 0.1, 1e-15);
    EXPECT_NEAR(tr->control.breaks[2], 0.3, 1e-15);
    EXPECT_NEAR(tr->control.values[1].a1, -1.0, 0.0);
    EXPECT_NEAR(tr->control.values[1].a2, -2.0, 1e-13);
    EXPECT_LE(tr->end().norm(), 1e-15);
}

TEST(Connect, BandSequenceToTheCharacteristicPoint)
{
    auto set = band(1.0);
    std::vector<Point> sources;
    for (int k = 1; k <= 10; ++k)
        sources.push_back({std::ldexp(1.0, -k), std::ldexp(1.0, -2 * k)});
    auto rep = verify_reachability_sequence(set, 1.0, {0, 0}, sources, 1e-2, 1e-1);
    ASSERT_TRUE(rep.established);
    ASSERT_EQ(rep.deltas.size(), 10u);
    for (int k = 1; k <= 10; ++k)
    {
        const double r = std::ldexp(1.0, -k);
        // sources sit on the lower boundary: one leg of length r with alpha = (-1, -2)
        EXPECT_NEAR(rep.deltas[k - 1], r, 1e-15);
        EXPECT_NEAR(rep.l2norms[k - 1], std::sqrt(5.0 * r), 1e-13);
        EXPECT_LE(rep.endpoint_errors[k - 1], 1e-9);
        EXPECT_LE(rep.max_violations[k - 1], 1e-9);
        EXPECT_EQ(rep.case_tags[k - 1], "on_axis_power");
    }
    EXPECT_TRUE(rep.monotone_to_zero);
    EXPECT_FALSE(verify_reachability_sequence(set, 1.0, {0, 0}, sources, 1e-2, 1e-2).monotone_to_zero);
}

TEST(Connect, BandSourcesAboveTheCurve)
{
    for (double nu : {0.5, 1.0, 3.0})
    {
        auto set = band(nu);
        for (Point src : {Point{0.3, 0.5}, Point{0.9, 0.95}, Point{0.05, 0.9}})
        {
            auto r = connect(set, nu, src, {0, 0});
            EXPECT_LE(r.endpoint_error, 1e-9);
            EXPECT_LE(r.max_violation, 1e-9);
            const double rr = std::pow(src.x2, 1.0 / (nu + 1.0));
            EXPECT_NEAR(r.delta, std::abs(src.x1 - rr) + rr, 1e-12);
        }
    }
}

TEST(Connect, ConeApexIsRefused)
{
    auto cone = ConstraintSet::cone(1, 2);
    EXPECT_THROW(connect(cone, 1.0, {1.0, 1.5}, {0, 0}), UnsupportedError);
    ConnectOptions ext;
    ext.extended = true;
    EXPECT_THROW(connect(cone, 1.0, {0.1, 0.15}, {0, 0}, ext), UnsupportedError);
    auto rep = verify_reachability_sequence(cone, 1.0, {0, 0}, {{0.5, 0.75}, {0.25, 0.3}}, 1e-2, 1e-2);
    EXPECT_FALSE(rep.established);
    EXPECT_FALSE(rep.monotone_to_zero);
    EXPECT_FALSE(rep.failure.empty());
}

TEST(Connect, InteriorTargetRadialSources)
{
    auto sq = ConstraintSet::rectangle(0, 1, 0, 1);
    for (int k = 1; k <= 10; ++k)
    {
        const double r = std::ldexp(1.0, -k - 2);
        const double th = 0.7 * k;
        Point src{0.5 + r * std::cos(th), 0.5 + r * std::sin(th)};
        auto c = connect(sq, 1.0, src, {0.5, 0.5});
        EXPECT_EQ(c.case_tag, ConnectCase::interior);
        EXPECT_LE(c.endpoint_error, 1e-9);
        EXPECT_LE(c.max_violation, 1e-9);
        // the duration depends on the direction, so only its scale is pinned
        EXPECT_LT(c.delta, 3.0 * r);
    }
}

TEST(Connect, InteriorCurveCoefficientGrowsNearTheBoundary)
{
    // target close to the top edge: the default C = 1 curve leaves the square
    auto sq = ConstraintSet::rectangle(0, 1, 0, 1);
    Point target{0.5, 0.99}, src{0.45, 0.98};
    auto c = connect(sq, 1.0, src, target);
    EXPECT_LE(c.endpoint_error, 1e-9);
    EXPECT_LE(c.max_violation, 1e-9);
}

TEST(Connect, SlopedWitnessOnTheCone)
{
    auto cone = ConstraintSet::cone(1, 2)
                    .with_witness({{1, 1}, 1.5, 0.5, CurveFamily::segment_slope_pos, +1, std::nullopt})
                    .with_witness({{1, 1}, 1.0, 0.5, CurveFamily::segment_slope_pos, +1, std::nullopt});
    // s2 = |x01 - xn1 + (xn2 - x02)/C| + |(xn2 - x02)/C| with C = 1.5
    auto r = connect(cone, 1.0, {1.2, 1.45}, {1, 1});
    EXPECT_LE(r.endpoint_error, 1e-9);
    EXPECT_LE(r.max_violation, 1e-9);
    EXPECT_EQ(r.case_tag, ConnectCase::off_axis_slope);
    const double via15 = std::abs(1.0 - 1.2 + 0.45 / 1.5) + 0.45 / 1.5;
    const double via1 = std::abs(1.0 - 1.2 + 0.45) + 0.45;
    EXPECT_NEAR(r.delta, std::min(via15, via1), 1e-12);
    EXPECT_EQ(*r.witness_index, 0u);

    // a source on the edge itself: the tracked path hugs the boundary
    auto e = connect(cone, 1.0, {1.4, 1.4}, {1, 1});
    EXPECT_NEAR(e.delta, 0.4, 1e-12);
    EXPECT_LE(e.max_violation, 1e-9);
    EXPECT_EQ(*e.witness_index, 1u);
}

TEST(Connect, IdentityAndErrors)
{
    auto sq = ConstraintSet::rectangle(0, 1, 0, 1);
    auto r = connect(sq, 1.0, {0.3, 0.3}, {0.3, 0.3});
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_EQ(r.control_l2, 0.0);
    EXPECT_EQ(r.traj.control.pieces(), 0u);
    EXPECT_THROW(connect(sq, 1.0, {1.3, 0.3}, {0.3, 0.3}), DomainError);
    EXPECT_THROW(connect(sq, 1.0, {0.3, 0.3}, {0.3, -0.3}), DomainError);
    EXPECT_THROW(connect(sq, 0.0, {0.3, 0.3}, {0.3, 0.4}), ConfigError);
    // boundary target without a witness
    EXPECT_THROW(connect(sq, 1.0, {0.7, 0.3}, {1.0, 0.3}), UnsupportedError);
}

TEST(Connect, ReversedTrajectoryRetracesThePath)
{
    std::vector<ControlValue> v{{1, 0.5}, {-0.3, 2}, {0.2, -1}};
    auto tr = integrate({0.2, 0.1}, ControlSignal::uniform(0, 1, v), 1.5);
    auto back = detail::reversed(tr);
    EXPECT_NEAR(back.end().x1, 0.2, 1e-14);
    EXPECT_NEAR(back.end().x2, 0.1, 1e-14);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
    {
        Point p = back.state_at(1.0 - tr.times[i]);
        EXPECT_NEAR(p.x1, tr.states[i].x1, 1e-14);
        EXPECT_NEAR(p.x2, tr.states[i].x2, 1e-14);
    }
}

TEST(Gronwall, StayPutAndOscillation)
{
    auto cone = ConstraintSet::cone(1, 2);
    auto still = constant_trajectory({1, 1.5}, 0, 1, 1.0, 3);
    auto c0 = cone_gronwall_bound(cone, still);
    EXPECT_EQ(c0.observed_min_ratio, 1.0);
    EXPECT_EQ(c0.lower_bound.back(), 1.5);

    // up 2/3, down 1, up 1/3 at x1 = 0.75: int |alpha2| = 2
    ControlSignal ctl{{0.0, 2.0 / 3.0, 5.0 / 3.0, 2.0}, {{0, 1}, {0, -1}, {0, 1}}};
    auto tr = integrate({0.75, 1.0}, ctl, 1.0);
    auto c = cone_gronwall_bound(cone, tr);
    EXPECT_NEAR(c.l1_alpha2, 2.0, 1e-15);
    EXPECT_NEAR(c.lower_bound.back(), std::exp(-2.0), 1e-15);
    EXPECT_GE(tr.end().x2, c.lower_bound.back());
    EXPECT_GE(c.observed_min_ratio, 1.0 - 1e-6);
}

TEST(Gronwall, ConnectorAlongAnInteriorRay)
{
    auto cone = ConstraintSet::cone(1, 2);
    for (double eps : {0.3, 0.1, 0.01})
    {
        auto tr = cone_connector({1.0, 1.5}, eps, 400);
        EXPECT_NEAR(tr.end().x2, 1.5 * tr.end().x1, 1e-12);
        auto c = cone_gronwall_bound(cone, tr);
        EXPECT_GE(c.observed_min_ratio, 1.0 - 1e-6);
    }
}

TEST(Gronwall, Errors)
{
    auto cone = ConstraintSet::cone(1, 2);
    auto leave = integrate({1, 1.5}, ControlSignal::constant(0, 1, {0, -1}), 1.0);
    EXPECT_THROW(cone_gronwall_bound(cone, leave), DomainError);
    auto nu2 = constant_trajectory({1, 1.5}, 0, 1, 2.0);
    EXPECT_THROW(cone_gronwall_bound(cone, nu2), ConfigError);
    EXPECT_THROW(cone_gronwall_bound(ConstraintSet::rectangle(0, 1, 0, 1), nu2), ConfigError);
}

TEST(TruncatedConeCost, MatchesAntiderivative)
{
    auto closed = [](Point x0, double eps) {
        return (x0.x1 - eps) / 2 + x0.x2 * x0.x2 / (2 * x0.x1 * x0.x1) * (1 / eps - 1 / x0.x1);
    };
    EXPECT_NEAR(truncated_cone_cost({1, 1}, 0.1), 4.95, 4.95e-6);
    EXPECT_NEAR(truncated_cone_cost({1, 1}, 0.5), 0.75, 0.75e-6);
    for (double eps : {0.9, 0.05, 1e-3, 1e-6})
        EXPECT_NEAR(truncated_cone_cost({1.3, 2.0}, eps), closed({1.3, 2.0}, eps), 1e-8 * closed({1.3, 2.0}, eps));
    EXPECT_THROW(truncated_cone_cost({1, 1}, 0.0), DomainError);
    EXPECT_THROW(truncated_cone_cost({1, 1}, 1.0), DomainError);

    std::vector<double> e, c;
    for (int k = 1; k <= 6; ++k)
    {
        e.push_back(std::pow(10.0, -k));
        c.push_back(truncated_cone_cost({1, 1}, e.back()));
    }
    auto fit = fit_power(e, c);
    EXPECT_NEAR(fit.exponent, -1.0, 0.02);
    EXPECT_GE(fit.r_squared, 0.999);
}

TEST(Modulus, RectangleAxisAlignedPairsAreManhattan)
{
    auto sq = ConstraintSet::rectangle(0, 1, 0, 1);
    std::vector<std::pair<Point, Point>> pairs;
    Rng rng(3);
    for (int i = 0; i < 20; ++i)
    {
        Point a{rng.uniform(0.5, 0.8), rng.uniform(0.1, 0.9)};
        const double d = rng.uniform(0.001, 0.1);
        pairs.push_back({a, i % 2 ? Point{a.x1 + d, a.x2} : Point{a.x1, std::min(1.0, a.x2 + d)}});
    }
    pairs.push_back({{0.6, 0.6}, {0.6, 0.6}});
    ConnectOptions ext;
    ext.extended = true;
    auto rep = uniform_modulus_probe(sq, 1.0, pairs, ext);
    for (const auto &p : rep.pairs)
    {
        ASSERT_TRUE(p.connected);
        EXPECT_NEAR(p.delta, std::abs(p.a.x1 - p.b.x1) + std::abs(p.a.x2 - p.b.x2), 1e-12);
    }
    EXPECT_TRUE(rep.dominated);
    EXPECT_NEAR(rep.delta_fit.exponent, 1.0, 1e-9);
}

TEST(Modulus, BandRandomPairs)
{
    auto set = band(1.0);
    Rng rng(9);
    std::vector<std::pair<Point, Point>> pairs;
    while (pairs.size() < 50)
    {
        Point a{rng.uniform(0, 1), rng.uniform(0, 1)};
        Point b{a.x1 + rng.uniform(-0.05, 0.05), a.x2 + rng.uniform(-0.05, 0.05)};
        if (set.contains(a) && set.contains(b))
            pairs.push_back({a, b});
    }
    ConnectOptions ext;
    ext.extended = true;
    auto rep = uniform_modulus_probe(set, 1.0, pairs, ext);
    EXPECT_TRUE(rep.dominated);
    for (const auto &p : rep.pairs)
        EXPECT_LE(p.delta, rep.delta_fit.dominating_coef * std::pow(p.distance, rep.delta_fit.exponent) * (1 + 1e-12));
}
