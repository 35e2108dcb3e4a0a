/*
 Copyright 2026 The spherectl Authors

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

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace spherectl;
using spherectl::testing::Gen;

namespace
{

    const ClosedLoop &loop() { return spherectl::testing::six_star().loop; }

} // namespace

TEST(Beta, Branches)
{
    const ControllerParams c = loop().controller;
    EXPECT_DOUBLE_EQ(beta(c, 0.05), 1.0 / 0.05);
    EXPECT_DOUBLE_EQ(beta(c, c.epsilon1), 1.0 / c.epsilon1);
    EXPECT_EQ(beta(c, c.epsilon2), 1.0);
    EXPECT_EQ(beta(c, 0.5), 1.0);
    EXPECT_EQ(beta(c, 3.0), 1.0);
    for (int i = 0; i <= 100; ++i)
    {
        const double d = c.epsilon1 + (c.epsilon2 - c.epsilon1) * i / 100.0;
        EXPECT_GT(beta(c, d), 0.0);
        EXPECT_LE(beta(c, d), 1.0 / c.epsilon1 + 1e-12);
        EXPECT_GE(beta(c, d), 1.0 - 1e-12);
    }
}

TEST(Beta, ContinuouslyDifferentiableAtKnots)
{
    const ControllerParams c = loop().controller;
    // beta is only C^1, so use second-order one-sided stencils on each side.
    const double h = 1e-7;
    auto left = [&](double k) { return (3 * beta(c, k) - 4 * beta(c, k - h) + beta(c, k - 2 * h)) / (2 * h); };
    auto right = [&](double k) { return (-3 * beta(c, k) + 4 * beta(c, k + h) - beta(c, k + 2 * h)) / (2 * h); };
    for (double knot : {c.epsilon1, c.epsilon2})
    {
        EXPECT_NEAR(beta(c, std::nextafter(knot, 0.0)), beta(c, std::nextafter(knot, 1.0)), 1e-12);
        EXPECT_NEAR(left(knot), right(knot), 1e-6);
    }
    EXPECT_NEAR(right(c.epsilon1), -1.0 / (c.epsilon1 * c.epsilon1), 1e-6);
    EXPECT_NEAR(left(c.epsilon2), 0.0, 1e-6);
    EXPECT_TRUE(validate_bridge(c).ok);
}

TEST(Beta, NonPositiveSeparation)
{
    const ControllerParams c;
    for (double d : {0.0, -0.1})
    {
        try
        {
            beta(c, d);
            FAIL() << "expected an error";
        }
        catch (const Error &e)
        {
            EXPECT_EQ(e.kind(), ErrorKind::BoundaryContact);
        }
    }
}

TEST(Bridge, BadBridgeFlagged)
{
    ControllerParams c;
    c.bridge = [&](double d) { return 1.0 / d; }; // wrong value at epsilon2
    const BridgeCheck b = validate_bridge(c);
    EXPECT_FALSE(b.ok);
    EXPECT_FALSE(b.failures.empty());

    ControllerParams linear;
    // Matches both values but not the slopes.
    linear.bridge = [&](double d)
    {
        const double s = (d - linear.epsilon1) / (linear.epsilon2 - linear.epsilon1);
        return (1.0 - s) / linear.epsilon1 + s;
    };
    const BridgeCheck lb = validate_bridge(linear);
    EXPECT_FALSE(lb.ok);
    EXPECT_EQ(lb.failures.size(), 2u);
}

TEST(Control, ZeroAtTarget)
{
    const ClosedLoop &l = loop();
    const Vector u = control(l, SimState{l.planner.target, Vector::Zero(3)});
    EXPECT_LT(u.norm(), 1e-15);
}

TEST(Control, FormulaOracle)
{
    const ClosedLoop &l = loop();
    Gen g(41);
    for (int i = 0; i < 300; ++i)
    {
        const UnitPoint x = spherectl::testing::free_point(g, l.field, 3, 1e-3);
        const Vector v = g.gaussian(3);
        const double d = l.field.nearest(x.coords()).distance;
        const Vector nu = nu_d(l.planner, l.field, x).vec;
        const Matrix j = jacobian_jd(l.planner, l.field, x);
        double b = 1.0;
        if (d <= l.controller.epsilon1)
            b = 1.0 / d;
        else if (d < l.controller.epsilon2)
        {
            const double s = (d - l.controller.epsilon1) / (l.controller.epsilon2 - l.controller.epsilon1);
            const double w = 3 * s * s - 2 * s * s * s;
            b = (1.0 - w) / d + w;
        }
        const Vector oracle = -l.controller.k_d * b * (v - nu) + j * projector(x) * v;
        const Vector u = control(l, SimState{x, v});
        EXPECT_LT((u - oracle).norm(), 1e-12 * std::max(1.0, oracle.norm()));
        EXPECT_NEAR(lyapunov_v(l.planner, l.field, SimState{x, v}), 0.5 * (v - nu).squaredNorm(), 1e-14);
    }
}

TEST(Control, DampingScalesNearBoundary)
{
    const ClosedLoop &l = loop();
    const StarObstacle &o = l.field[2];
    const UnitPoint b = o.boundary_point(0.4);
    const Vector n = outward_normal(o, UnitPoint(b.coords() + 1e-3 * project_vec(b.coords(), b.coords() - o.kernel().coords()))).vec;
    const UnitPoint x(std::cos(0.01) * b.coords() + std::sin(0.01) * n);
    const ControlEval e = evaluate_control(l, x, Vector::Zero(3));
    EXPECT_NEAR(e.beta, 1.0 / e.separation, 1e-12);
    EXPECT_NEAR(e.separation, 0.01, 1e-6);
}

TEST(Control, DimensionMismatch)
{
    const ClosedLoop &l = loop();
    EXPECT_THROW(control(l, SimState{l.planner.target, Vector::Zero(4)}), Error);
}
