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

    // Gram-Schmidt: remove the component of v along x.
    Vector gram_schmidt(const Vector &x, const Vector &v)
    {
        Vector out = v;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out(i) = v(i) - (x.dot(v) / x.dot(x)) * x(i);
        return out;
    }

} // namespace

TEST(UnitPoint, NormalizesAndRejects)
{
    const UnitPoint x({3.0, 4.0});
    EXPECT_NEAR(x(0), 0.6, 1e-15);
    EXPECT_NEAR(x(1), 0.8, 1e-15);
    EXPECT_THROW(UnitPoint({1.0}), Error);
    EXPECT_THROW(UnitPoint({1e-9, 0.0, 0.0}), Error);
    EXPECT_THROW(UnitPoint(Vector::Zero(3)), Error);
}

TEST(UnitPoint, NormWithinTolerance)
{
    Gen g(1);
    for (int i = 0; i < 200; ++i)
    {
        const int m = 2 + i % 8;
        const Vector raw = g.gaussian(m) * std::pow(10.0, g.uniform(-6, 6));
        EXPECT_NEAR(UnitPoint(raw).coords().norm(), 1.0, 1e-12);
    }
}

TEST(Project, Examples)
{
    const UnitPoint e1 = UnitPoint::basis(3, 0);
    const Vector e1v = Vector::Unit(3, 0);
    const Vector e2v = Vector::Unit(3, 1);
    EXPECT_LT(project(e1, e1v).vec.norm(), 1e-15);
    EXPECT_LT((project(e1, e2v).vec - e2v).norm(), 1e-15);

    const UnitPoint x({1.0, 1.0, 0.0});
    const Vector r = project(x, e1v).vec;
    EXPECT_NEAR(r(0), 0.5, 1e-15);
    EXPECT_NEAR(r(1), -0.5, 1e-15);
    EXPECT_NEAR(r(2), 0.0, 1e-15);
    EXPECT_LT((r - gram_schmidt(x.coords(), e1v)).norm(), 1e-15);
}

TEST(Project, DimensionMismatch)
{
    const UnitPoint x({0.0, 0.0, 1.0});
    EXPECT_THROW(project(x, Vector::Ones(4)), Error);
}

TEST(Project, TangentAndIdempotent)
{
    Gen g(2);
    for (int i = 0; i < 500; ++i)
    {
        const int m = 2 + i % 10;
        const UnitPoint x = g.point(m);
        const Vector v = g.gaussian(m) * 10.0;
        const TangentVector t = project(x, v);
        EXPECT_LT(std::abs(t.vec.dot(x.coords())), 1e-10);
        EXPECT_LT((project(x, t.vec).vec - t.vec).norm(), 1e-12);
        EXPECT_LT((t.vec - gram_schmidt(x.coords(), v)).norm(), 1e-12);
    }
}

TEST(SphereAngle, Examples)
{
    const UnitPoint e1 = UnitPoint::basis(3, 0), e2 = UnitPoint::basis(3, 1);
    EXPECT_EQ(sphere_angle(e1, e1), 0.0);
    EXPECT_NEAR(sphere_angle(e1, e2), kPi / 2, 1e-15);
    EXPECT_NEAR(sphere_angle(e1, -e1), kPi, 1e-15);
}

TEST(SphereAngle, AgreesWithClampedArccos)
{
    Gen g(3);
    for (int i = 0; i < 500; ++i)
    {
        const UnitPoint a = g.point(4), b = g.point(4);
        const double oracle = std::acos(std::clamp(a.coords().dot(b.coords()), -1.0, 1.0));
        EXPECT_NEAR(sphere_angle(a, b), oracle, 1e-12);
    }
}

TEST(Geodesic, Examples)
{
    const UnitPoint e1 = UnitPoint::basis(3, 0), e2 = UnitPoint::basis(3, 1);
    EXPECT_LT((geodesic_point(e1, e2, 0.0).coords() - e1.coords()).norm(), 1e-15);
    EXPECT_LT((geodesic_point(e1, e2, 1.0).coords() - e2.coords()).norm(), 1e-15);
    const UnitPoint mid = geodesic_point(e1, e2, 0.5);
    EXPECT_NEAR(mid(0), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(mid(1), std::sqrt(0.5), 1e-15);
    const UnitPoint third = geodesic_point(e1, e2, 1.0 / 3.0);
    EXPECT_NEAR(third(0), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(third(1), 0.5, 1e-15);
    EXPECT_NEAR(sphere_angle(e1, third), kPi / 6, 1e-12);
}

TEST(Geodesic, AntipodalAndCoincident)
{
    const UnitPoint a({0.3, -0.2, 0.9});
    try
    {
        geodesic_point(a, -a, 0.5);
        FAIL() << "expected an error";
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::GeodesicUndefined);
    }
    EXPECT_LT((geodesic_point(a, a, 0.7).coords() - a.coords()).norm(), 1e-15);
}

TEST(Geodesic, PropertiesOnRandomPairs)
{
    Gen g(4);
    for (int i = 0; i < 100; ++i)
    {
        const int m = 3 + i % 4;
        const UnitPoint a = g.point(m), b = g.point(m);
        const double theta = sphere_angle(a, b);
        if (theta > kPi - 1e-3)
            continue;
        const double lambda = g.uniform(0.0, 1.0);
        const UnitPoint p = geodesic_point(a, b, lambda);
        EXPECT_NEAR(p.coords().norm(), 1.0, 1e-12);
        EXPECT_NEAR(sphere_angle(a, p), lambda * theta, 1e-9);

        // Acceleration along the curve is radial. Every even derivative of a
        // slerp curve is radial too, so a coarse step adds no tangential error.
        const double h = 1e-2;
        const double l = std::clamp(lambda, h, 1.0 - h);
        const Vector acc = (geodesic_point(a, b, l + h).coords() - 2.0 * geodesic_point(a, b, l).coords() +
                            geodesic_point(a, b, l - h).coords()) /
                           (h * h);
        EXPECT_LT(project_vec(geodesic_point(a, b, l).coords(), acc).norm(), 1e-9);
    }
}

TEST(TangentBasis, OrthonormalAndTangent)
{
    Gen g(5);
    for (int i = 0; i < 200; ++i)
    {
        const int m = 2 + i % 12;
        const UnitPoint x = g.point(m);
        const Matrix e = tangent_basis(x);
        ASSERT_EQ(e.rows(), m);
        ASSERT_EQ(e.cols(), m - 1);
        EXPECT_LT((e.transpose() * e - Matrix::Identity(m - 1, m - 1)).norm(), 1e-12);
        EXPECT_LT((e.transpose() * x.coords()).norm(), 1e-12);
        EXPECT_LT((e * e.transpose() - projector(x)).norm(), 1e-12);
    }
}
