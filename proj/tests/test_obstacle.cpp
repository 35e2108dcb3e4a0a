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

    const UnitPoint kNorth({0.0, 0.0, 1.0});

    StarObstacle cap(const UnitPoint &g, double r) { return StarObstacle(g, RadialProfile::cap(r)); }

    StarObstacle wobbly()
    {
        return StarObstacle(UnitPoint({0.1, -0.2, 1.0}),
                            RadialProfile::fourier({0.35, 0.04, 0.0, 0.05, 0.0, 0.02}, {0.01, 0.03}));
    }

    // Spherical distance to U by dense boundary sampling.
    double brute_distance(const StarObstacle &o, const Vector &x, int n)
    {
        double best = 1e9;
        for (int k = 0; k < n; ++k)
            best = std::min(best, angle_between(o.boundary(2.0 * kPi * k / n).point, x));
        return best;
    }

    // Distance to a cap by sampling its boundary circle directly.
    double brute_cap_distance(const UnitPoint &g, double r, const Vector &x, int n)
    {
        const Matrix e = tangent_basis(g);
        double best = 1e9;
        for (int k = 0; k < n; ++k)
        {
            const double t = 2.0 * kPi * k / n;
            const Vector b = std::cos(r) * g.coords() + std::sin(r) * (std::cos(t) * e.col(0) + std::sin(t) * e.col(1));
            best = std::min(best, angle_between(b, x));
        }
        return best;
    }

} // namespace

TEST(Contains, Examples)
{
    const StarObstacle o = cap(kNorth, 0.3);
    EXPECT_TRUE(o.contains(kNorth));
    EXPECT_FALSE(o.contains(-kNorth));
    EXPECT_FALSE(o.contains(UnitPoint({std::sin(0.31), 0.0, std::cos(0.31)})));
    EXPECT_TRUE(o.contains(UnitPoint({std::sin(0.29), 0.0, std::cos(0.29)})));
}

TEST(Distance, CapAnalyticAndSampled)
{
    const StarObstacle o = cap(kNorth, 0.3);
    const UnitPoint x({std::sin(0.5), 0.0, std::cos(0.5)});
    EXPECT_NEAR(o.distance(x.coords()), 0.2, 1e-14);
    EXPECT_NEAR(closest_point(o, x).distance, 0.2, 1e-14);

    Gen g(21);
    for (int i = 0; i < 50; ++i)
    {
        const UnitPoint k = g.point(3);
        const double r = g.uniform(0.05, 1.2);
        const StarObstacle c = cap(k, r);
        const UnitPoint y = g.point(3);
        if (c.contains(y))
            continue;
        EXPECT_NEAR(c.distance(y.coords()), brute_cap_distance(k, r, y.coords(), 10000), 1e-4);
    }
}

TEST(Distance, CapInHigherDimensions)
{
    Gen g(22);
    for (int i = 0; i < 100; ++i)
    {
        const int m = 4 + i % 3;
        const UnitPoint k = g.point(m), y = g.point(m);
        const double r = g.uniform(0.05, 1.0);
        const StarObstacle c = cap(k, r);
        const double oracle = std::max(0.0, std::acos(std::clamp(k.coords().dot(y.coords()), -1.0, 1.0)) - r);
        EXPECT_NEAR(c.distance(y.coords()), oracle, 1e-7);
        if (oracle > 0.0)
        {
            const ClosestPoint cp = c.closest(y);
            EXPECT_NEAR(sphere_angle(cp.point, k), r, 1e-12);
            EXPECT_NEAR(sphere_angle(cp.point, y), oracle, 1e-7);
        }
    }
}

TEST(Separation, Variants)
{
    const ObstacleField field({cap(kNorth, 0.3)}, 0.1);
    const UnitPoint orth({std::sin(0.3 + kPi / 2), 0.0, std::cos(0.3 + kPi / 2)});
    EXPECT_NEAR(separation(field, orth, SeparationVariant::Spherical).value, kPi / 2, 1e-14);
    EXPECT_NEAR(separation(field, orth, SeparationVariant::Chordal).value, 1.0, 1e-14);

    Gen g(23);
    for (int i = 0; i < 100; ++i)
    {
        const UnitPoint x = g.point(3);
        if (field.contains(x))
            continue;
        EXPECT_EQ(separation(field, x, SeparationVariant::Product).value,
                  separation(field, x, SeparationVariant::Spherical).value);
    }
    const UnitPoint edge({std::sin(0.3), 0.0, std::cos(0.3)});
    for (auto v : {SeparationVariant::Spherical, SeparationVariant::Chordal, SeparationVariant::Product})
        EXPECT_NEAR(separation(field, edge, v).value, 0.0, 1e-14);
}

TEST(Separation, ZeroOnFourierBoundary)
{
    const StarObstacle o = wobbly();
    const ObstacleField field({o}, 0.1);
    for (int k = 0; k < 64; ++k)
    {
        const Vector b = o.boundary(2.0 * kPi * k / 64).point;
        for (auto v : {SeparationVariant::Spherical, SeparationVariant::Chordal, SeparationVariant::Product})
            EXPECT_LT(field.separation(b, v), 1e-9);
    }
}

TEST(ClosestPoint, FourierAgainstDenseSampling)
{
    const StarObstacle o = wobbly();
    Gen g(24);
    int tested = 0;
    while (tested < 40)
    {
        const UnitPoint x = g.point(3);
        if (o.contains(x) || sphere_angle(x, o.kernel()) > 1.2)
            continue;
        ++tested;
        const ClosestPoint cp = o.closest(x);
        const double brute = brute_distance(o, x.coords(), 100000);
        EXPECT_NEAR(cp.distance, brute, 1e-5);
        EXPECT_LE(cp.distance, brute + 1e-12);
        EXPECT_NEAR(sphere_angle(cp.point, x), cp.distance, 1e-12);
        // On the boundary: the radial gap vanishes.
        EXPECT_LT(std::abs(o.radial_gap(cp.point.coords())), 1e-6);
    }
}

TEST(ClosestPoint, InsideThrows)
{
    const StarObstacle o = wobbly();
    try
    {
        o.closest(o.kernel());
        FAIL() << "expected an error";
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::InfeasibleState);
    }
}

TEST(ClosestPoint, AmbiguousOppositeKernel)
{
    // Every boundary point of a cap is equidistant from -g.
    const StarObstacle c = cap(kNorth, 0.3);
    EXPECT_TRUE(c.closest(-kNorth).ambiguous);
    EXPECT_FALSE(c.closest(UnitPoint({0.5, 0.0, 0.1})).ambiguous);
}

TEST(OutwardNormal, UnitTangentAndGradient)
{
    const StarObstacle o = wobbly();
    const ObstacleField field({o}, 0.1);
    Gen g(25);
    int tested = 0;
    while (tested < 60)
    {
        const UnitPoint x = g.point(3);
        const double d = o.distance(x.coords());
        if (!(d > 1e-3 && d < 0.5))
            continue;
        ++tested;
        const Vector n = outward_normal(o, x).vec;
        EXPECT_NEAR(n.norm(), 1.0, 1e-12);
        EXPECT_LT(std::abs(n.dot(x.coords())), 1e-12);
        const Vector grad = separation_gradient(field, x).vec;
        const Matrix e = tangent_basis(x);
        for (int k = 0; k < 8; ++k)
        {
            const double t = 2.0 * kPi * k / 8;
            const Vector dir = std::cos(t) * e.col(0) + std::sin(t) * e.col(1);
            const double h = 1e-6;
            const double fd = (o.distance(UnitPoint(x.coords() + h * dir).coords()) -
                               o.distance(UnitPoint(x.coords() - h * dir).coords())) /
                              (2.0 * h);
            EXPECT_NEAR(grad.dot(dir), fd, 1e-5);
        }
    }
}

TEST(NormalAlignment, CapsAndShippedScenario)
{
    EXPECT_TRUE(validate_normal_alignment(cap(kNorth, 0.3), 0.13, 2000).ok);
    EXPECT_TRUE(validate_normal_alignment(cap(UnitPoint({1.0, 2.0, 0.5, -1.0}), 0.4), 0.13, 2000).ok);
    const Scenario &sc = spherectl::testing::six_star();
    for (std::size_t i = 0; i < sc.loop.field.size(); ++i)
    {
        const AlignmentReport r = validate_normal_alignment(sc.loop.field[i], sc.loop.planner.epsilon, 10000, 100 + i);
        EXPECT_TRUE(r.ok) << "obstacle " << i << " min cosine " << r.min_cosine;
        EXPECT_EQ(r.checked, 10000);
    }
}

TEST(NormalAlignment, ShallowKernelInDumbbellViolates)
{
    // Two lobes joined by a thin waist; a candidate kernel deep in one lobe
    // sees the far lobe's walls from behind.
    const StarObstacle o(kNorth, RadialProfile::fourier({0.5, 0.0, 0.42}, {}), Vector(UnitPoint({1, 0, 0}).coords()));
    const UnitPoint shallow(std::cos(0.7) * kNorth.coords() + std::sin(0.7) * o.frame_u());
    ASSERT_TRUE(o.contains(shallow));
    const AlignmentReport r = validate_normal_alignment(o, 0.13, 2000, 3, shallow);
    EXPECT_FALSE(r.ok);
    ASSERT_TRUE(r.violating.has_value());
    EXPECT_LT(r.min_cosine, 0.0);
    const double d = o.distance(r.violating->coords());
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, 0.13);
    // The obstacle's own kernel is fine.
    EXPECT_TRUE(validate_normal_alignment(o, 0.13, 2000, 3).ok);
}

TEST(ObstacleField, RejectsCloseObstaclesAndReportsPair)
{
    const StarObstacle a = cap(kNorth, 0.3);
    const StarObstacle b = cap(UnitPoint({std::sin(0.7), 0.0, std::cos(0.7)}), 0.3);
    try
    {
        ObstacleField({a, b}, 0.1);
        FAIL() << "expected an error";
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("obstacles 0 and 1"), std::string::npos);
    }
    EXPECT_NO_THROW(ObstacleField({a, b}, 0.04));
}

TEST(ObstacleField, PairwiseSeparationOnShippedScenario)
{
    const ObstacleField &f = spherectl::testing::six_star().loop.field;
    EXPECT_GE(f.min_pairwise_separation(), 2.0 * f.delta());
    // Free points have positive separation and lie within delta of at most one obstacle.
    Gen g(26);
    for (int i = 0; i < 1000; ++i)
    {
        const UnitPoint x = spherectl::testing::free_point(g, f, 3);
        EXPECT_GT(f.separation(x.coords(), SeparationVariant::Spherical), 0.0);
        int close = 0;
        for (double d : f.distances(x.coords()))
            close += d < f.delta();
        EXPECT_LE(close, 1);
    }
}

TEST(StarShaped, GeodesicsFromKernelStayInside)
{
    const StarObstacle o = wobbly();
    Gen g(27);
    int tested = 0;
    while (tested < 300)
    {
        const UnitPoint y = g.point(3);
        if (!o.contains(y))
            continue;
        ++tested;
        for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0})
            EXPECT_TRUE(o.contains(geodesic_point(o.kernel(), y, lambda)));
    }
}

TEST(RadialProfile, DerivativesMatchFiniteDifferences)
{
    const RadialProfile p = RadialProfile::fourier({0.4, 0.03, -0.02, 0.01}, {0.02, 0.0, -0.015});
    EXPECT_EQ(p.harmonics(), 3);
    const double h = 1e-5;
    for (int k = 0; k < 50; ++k)
    {
        const double psi = 2.0 * kPi * k / 50;
        const auto e = p.eval(psi);
        EXPECT_NEAR(e.d1, (p(psi + h) - p(psi - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(e.d2, (p(psi + h) - 2 * p(psi) + p(psi - h)) / (h * h), 1e-4);
        EXPECT_LE(e.value, p.upper_bound());
        EXPECT_GE(e.value, p.lower_bound());
    }
}

TEST(RadialProfile, BoundaryDerivatives)
{
    const StarObstacle o = wobbly();
    const double h = 1e-5;
    for (int k = 0; k < 20; ++k)
    {
        const double psi = 0.3 + k * 0.3;
        const auto b = o.boundary(psi);
        const Vector fd1 = (o.boundary(psi + h).point - o.boundary(psi - h).point) / (2 * h);
        const Vector fd2 = (o.boundary(psi + h).point - 2 * b.point + o.boundary(psi - h).point) / (h * h);
        EXPECT_LT((b.d1 - fd1).norm(), 1e-8);
        EXPECT_LT((b.d2 - fd2).norm(), 1e-4);
        EXPECT_NEAR(b.point.norm(), 1.0, 1e-14);
    }
}

TEST(StarObstacle, Validation)
{
    EXPECT_THROW(StarObstacle(kNorth, RadialProfile::cap(0.0)), Error);
    EXPECT_THROW(StarObstacle(kNorth, RadialProfile::cap(1.6)), Error);
    EXPECT_THROW(StarObstacle(kNorth, RadialProfile::fourier({0.3, 0.31}, {})), Error);
    EXPECT_THROW(StarObstacle(UnitPoint({1.0, 0.0, 0.0, 0.0}), RadialProfile::fourier({0.3, 0.1}, {})), Error);
    EXPECT_THROW(StarObstacle(kNorth, RadialProfile::fourier({0.3, 0, 0, 0, 0, 0, 0, 0, 0, 0.01}, {})), Error);
    EXPECT_THROW(RadialProfile::fourier({}, {}), Error);
    EXPECT_THROW(ObstacleField({cap(kNorth, 0.3)}, 0.0), Error);
}
