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

#include "grushin/geometry.hpp"

#include <gtest/gtest.h>

using namespace grushin;

namespace
{
ConstraintSet unit_square() { return ConstraintSet::rectangle(0, 1, 0, 1); }
ConstraintSet band_nu1()
{
    return ConstraintSet::band(ScalarCurve::power(1.0, 2.0), ScalarCurve::constant_value(1.0), 0.0, 1.0);
}
} // namespace

TEST(ScalarCurve, EvaluatesOddAndEvenTerms)
{
    ScalarCurve f{0.5, {{2.0, 2.0, false}, {1.0, 3.0, true}}};
    EXPECT_DOUBLE_EQ(f(-2.0), 0.5 + 8.0 - 8.0);
    EXPECT_DOUBLE_EQ(f(2.0), 0.5 + 8.0 + 8.0);
    EXPECT_NEAR(f.slope(1.0), 4.0 + 3.0, 1e-8);
}

TEST(ConstraintSet, RectangleMembershipAndViolation)
{
    auto s = unit_square();
    EXPECT_TRUE(s.contains({0.5, 0.5}));
    EXPECT_TRUE(s.contains({0.0, 1.0}));
    EXPECT_TRUE(s.contains({1.0 + 5e-10, 0.5}));
    EXPECT_FALSE(s.contains({1.0 + 1e-8, 0.5}));
    EXPECT_DOUBLE_EQ(s.violation({1.25, 0.5}), 0.25);
    EXPECT_DOUBLE_EQ(s.violation({0.5, 0.5}), -0.5);
}

TEST(ConstraintSet, InfiniteRectangleIsHalfPlane)
{
    auto s = ConstraintSet::rectangle(-kInf, kInf, -kInf, 0.0);
    EXPECT_TRUE(s.contains({-1e6, -3.0}));
    EXPECT_FALSE(s.contains({2.0, 0.1}));
}

TEST(ConstraintSet, ConeFactoryValidates)
{
    EXPECT_THROW(ConstraintSet::cone(2, 1), ConfigError);
    EXPECT_THROW(ConstraintSet::cone(0, 1), ConfigError);
    EXPECT_THROW(ConstraintSet::cone(1, 1), ConfigError);
    EXPECT_THROW(ConstraintSet::rectangle(1, 0, 0, 1), ConfigError);
    EXPECT_THROW(ConstraintSet::curve(ScalarCurve{}, 0.0), ConfigError);
}

TEST(ConstraintSet, ConeMembership)
{
    auto c = ConstraintSet::cone(1, 2);
    EXPECT_TRUE(c.contains({1.0, 1.5}));
    EXPECT_TRUE(c.contains({1.0, 1.0}));
    EXPECT_TRUE(c.contains({0.0, 0.0}));
    EXPECT_FALSE(c.contains({1.0, 0.5}));
    EXPECT_FALSE(c.contains({1.0, 2.5}));
    EXPECT_FALSE(c.contains({-1.0, -1.5}));
    // distance from (1, 0.5) to the line x2 = x1 is 0.5 / sqrt(2)
    EXPECT_NEAR(c.violation({1.0, 0.5}), 0.5 / std::sqrt(2.0), 1e-15);
}

TEST(ConstraintSet, BandAndSublevel)
{
    auto b = band_nu1();
    EXPECT_TRUE(b.contains({0.5, 0.25}));
    EXPECT_TRUE(b.contains({0.5, 0.6}));
    EXPECT_FALSE(b.contains({0.5, 0.2}));
    EXPECT_FALSE(b.contains({1.1, 0.9}));
    auto p = ConstraintSet::sublevel(ScalarCurve::power(1.0, 2.0), -1.0, 1.0);
    EXPECT_TRUE(p.contains({-0.5, 0.3}));
    EXPECT_FALSE(p.contains({-0.5, 0.2}));
}

TEST(ConstraintSet, CurveHasNoThickness)
{
    auto c = ConstraintSet::curve(ScalarCurve::power(1.0, 2.0), 1.0);
    EXPECT_TRUE(c.contains({0.5, 0.25}));
    EXPECT_FALSE(c.contains({0.5, 0.26}));
    EXPECT_FALSE(c.contains({0.5, 0.24}));
    EXPECT_FALSE(c.contains({1.5, 2.25}));
}

TEST(ConstraintSet, ShiftAndUnion)
{
    auto c = ConstraintSet::cone(1, 2);
    auto moved = c.shifted({5.0, 0.0});
    EXPECT_TRUE(moved.contains({6.0, 1.5}));
    EXPECT_FALSE(moved.contains({1.0, 1.5}));
    auto u = ConstraintSet::union_of({c, moved});
    EXPECT_TRUE(u.contains({6.0, 1.5}));
    EXPECT_TRUE(u.contains({1.0, 1.5}));
    EXPECT_FALSE(u.contains({3.0, 1.0}));
}

TEST(X1Convexity, ConvexSetsHaveNoViolations)
{
    EXPECT_TRUE(check_x1_convex(unit_square(), 200, 1).violations.empty());
    EXPECT_TRUE(check_x1_convex(ConstraintSet::cone(1, 2), 200, 2).violations.empty());
    EXPECT_TRUE(check_x1_convex(band_nu1(), 200, 3).violations.empty());
    auto halfplane_union = ConstraintSet::union_of(
        {ConstraintSet::cone(1, 2), ConstraintSet::rectangle(-kInf, kInf, -kInf, 0.0)});
    EXPECT_TRUE(check_x1_convex(halfplane_union, 200, 4).violations.empty());
}

TEST(X1Convexity, TwoDisjointConesAreFlagged)
{
    auto c = ConstraintSet::cone(1, 2);
    auto u = ConstraintSet::union_of({c, c.shifted({5.0, 0.0})});
    auto rep = check_x1_convex(u, 50, 7);
    ASSERT_FALSE(rep.violations.empty());
    for (const auto &v : rep.violations)
    {
        EXPECT_TRUE(u.contains(v.left));
        EXPECT_TRUE(u.contains(v.right));
        EXPECT_FALSE(u.contains(v.gap));
        EXPECT_LT(v.left.x1, v.gap.x1);
        EXPECT_LT(v.gap.x1, v.right.x1);
        EXPECT_EQ(v.left.x2, v.right.x2);
    }
}

TEST(X1Convexity, RejectsBadSampleCount)
{
    EXPECT_THROW(check_x1_convex(unit_square(), 0, 1), ConfigError);
}

TEST(ClassifyPoint, Kinds)
{
    auto sq = unit_square();
    EXPECT_EQ(classify_point(sq, {0.5, 0.5}, 1e-3).kind, BoundaryKind::interior);
    EXPECT_EQ(classify_point(sq, {1.0, 0.5}, 1e-3).kind, BoundaryKind::boundary_off_axis);
    auto side = classify_point(sq, {0.0, 0.5}, 1e-3);
    EXPECT_EQ(side.kind, BoundaryKind::boundary_on_axis);
    EXPECT_FALSE(side.is_characteristic);
    EXPECT_THROW(classify_point(sq, {2.0, 0.5}, 1e-3), DomainError);
}

TEST(ClassifyPoint, CharacteristicPoints)
{
    auto parabola = ConstraintSet::sublevel(ScalarCurve::power(1.0, 2.0), -1.0, 1.0);
    auto bottom = classify_point(parabola, {0.0, 0.0}, 1e-3);
    EXPECT_EQ(bottom.kind, BoundaryKind::boundary_on_axis);
    EXPECT_TRUE(bottom.is_characteristic);

    auto apex = classify_point(ConstraintSet::cone(1, 2), {0.0, 0.0}, 1e-3);
    EXPECT_EQ(apex.kind, BoundaryKind::boundary_on_axis);
    EXPECT_FALSE(apex.is_characteristic);

    EXPECT_TRUE(classify_point(band_nu1(), {0.0, 0.0}, 1e-3).is_characteristic);
    EXPECT_TRUE(classify_point(unit_square(), {0.0, 0.0}, 1e-3).is_characteristic);

    // x2 = x1|x1| is flat at 0 but |x1|^0.5 is not
    auto odd = ConstraintSet::sublevel(ScalarCurve::power(1.0, 2.0, true), -1.0, 1.0);
    EXPECT_TRUE(classify_point(odd, {0.0, 0.0}, 1e-3).is_characteristic);
    auto cusp = ConstraintSet::sublevel(ScalarCurve::power(1.0, 0.5), -1.0, 1.0);
    EXPECT_FALSE(classify_point(cusp, {0.0, 0.0}, 1e-3).is_characteristic);
}

TEST(Hypotheses, ConeSegmentPassesPowerCurveFails)
{
    Witness seg{{0, 0}, 1.5, 1.0, CurveFamily::segment_slope_pos, +1, std::nullopt};
    Witness pc{{0, 0}, 1.0, 1.0, CurveFamily::power_curve_pos, +1, std::nullopt};
    auto cone = ConstraintSet::cone(1, 2).with_witness(seg).with_witness(pc);
    auto reps = verify_hypotheses(cone, 1.0, 1e-2);
    ASSERT_EQ(reps.size(), 2u);
    EXPECT_TRUE(reps[0].pass);
    EXPECT_EQ(reps[0].max_violation, 0.0);
    EXPECT_FALSE(reps[1].pass);
    EXPECT_GT(reps[1].max_violation, 0.1);
}

TEST(Hypotheses, BandLowerBoundaryIsAWitness)
{
    Witness pc{{0, 0}, 1.0, 1.0, CurveFamily::power_curve_pos, +1, std::nullopt};
    auto reps = verify_hypotheses(band_nu1().with_witness(pc), 1.0, 1e-3);
    ASSERT_EQ(reps.size(), 1u);
    EXPECT_TRUE(reps[0].pass);
    EXPECT_TRUE(reps[0].local_x1_convex);
}

TEST(Hypotheses, MirroredWitnessBelowTheTopEdge)
{
    Witness below{{0, 1}, 1.0, 0.5, CurveFamily::power_curve_pos, -1, std::nullopt};
    EXPECT_TRUE(verify_hypotheses(unit_square().with_witness(below), 1.0, 1e-3)[0].pass);
}

TEST(Hypotheses, InconsistentWitnessesAreConfigErrors)
{
    Witness off{{0.5, 0}, 1.0, 0.2, CurveFamily::power_curve_pos, +1, std::nullopt};
    EXPECT_THROW(verify_hypotheses(unit_square().with_witness(off), 1.0, 1e-2), ConfigError);
    Witness low{{0, 0}, 1.0, 0.2, CurveFamily::power_curve_pos, +1, 1.4};
    EXPECT_THROW(verify_hypotheses(unit_square().with_witness(low), 1.0, 1e-2), ConfigError);
    EXPECT_THROW(verify_hypotheses(unit_square(), 1.0, 1e-2), ConfigError);
    Witness bad_c{{0, 0}, -1.0, 0.2, CurveFamily::segment_vertical, +1, std::nullopt};
    EXPECT_THROW(unit_square().with_witness(bad_c), ConfigError);
}
