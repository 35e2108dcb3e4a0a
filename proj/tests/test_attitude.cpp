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

    // Hamilton product, scalar first.
    Eigen::Vector4d qmul(const Eigen::Vector4d &a, const Eigen::Vector4d &b)
    {
        const Vector3 av = a.tail<3>(), bv = b.tail<3>();
        Eigen::Vector4d out;
        out(0) = a(0) * b(0) - av.dot(bv);
        out.tail<3>() = a(0) * bv + b(0) * av + av.cross(bv);
        return out;
    }

} // namespace

TEST(AMatrix, Orthonormal)
{
    Gen g(61);
    for (int i = 0; i < 200; ++i)
    {
        const UnitPoint x = g.point(4);
        const Matrix43 a = a_matrix(x);
        EXPECT_LT((a.transpose() * a - Matrix3::Identity()).norm(), 1e-14);
        EXPECT_LT((a.transpose() * Eigen::Vector4d(x.coords())).norm(), 1e-15);
        // A(x) w is the quaternion product x (0, w).
        const Vector3 w = g.gaussian(3);
        const Eigen::Vector4d pure(0.0, w.x(), w.y(), w.z());
        EXPECT_LT((a * w - qmul(x.coords(), pure)).norm(), 1e-14);
    }
    EXPECT_THROW(a_matrix(UnitPoint({1.0, 0.0, 0.0})), Error);
}

TEST(QuaternionStep, TorqueFreeSpinMatchesExponential)
{
    const InertiaMatrix inertia = InertiaMatrix::identity();
    const UnitPoint q0({0.3, -0.5, 0.7, 0.2});
    const Vector3 w(0.4, -1.1, 0.6);
    RigidBodyState s{q0, w};
    const double h = 1e-3;
    for (int k = 1; k <= 2000; ++k)
    {
        s = quaternion_step(inertia, s, Vector3(Vector3::Zero()), h);
        const double t = k * h;
        const double th = w.norm() * t / 2.0;
        Eigen::Vector4d e;
        e(0) = std::cos(th);
        e.tail<3>() = std::sin(th) * w.normalized();
        const Eigen::Vector4d oracle = qmul(q0.coords(), e);
        ASSERT_LT((s.x.coords() - oracle).norm(), 1e-11) << "t = " << t;
        ASSERT_LT((s.omega - w).norm(), 1e-15);
    }
}

TEST(QuaternionStep, TorqueFreeConservesMomentumAndEnergy)
{
    const Scenario &sc = spherectl::testing::attitude_scenario();
    const InertiaMatrix inertia(sc.attitude->inertia);
    const Matrix3 &j = inertia.matrix();
    RigidBodyState s{sc.attitude->initial_quaternion, Vector3(0.9, -0.4, 1.3)};
    const double l0 = (j * s.omega).norm();
    const double e0 = s.omega.dot(j * s.omega);
    for (int k = 0; k < 5000; ++k)
        s = quaternion_step(inertia, s, Vector3(Vector3::Zero()), 1e-3);
    EXPECT_NEAR((j * s.omega).norm(), l0, 1e-10);
    EXPECT_NEAR(s.omega.dot(j * s.omega), e0, 1e-10);
}

TEST(Torque, ZeroAtTargetAtRest)
{
    const Scenario &sc = spherectl::testing::attitude_scenario();
    const InertiaMatrix inertia(sc.attitude->inertia);
    const Vector3 tau = torque(sc.loop, inertia, RigidBodyState{sc.loop.planner.target, Vector3::Zero()});
    EXPECT_LT(tau.norm(), 1e-15);
}

TEST(Torque, MapsToSphereControl)
{
    // J_m^{-1}(tau - omega x J_m omega) = u_f and A u_f / 2 equals the tangent
    // part of the sphere control, shifted by the tangent-model curvature term.
    const Scenario &sc = spherectl::testing::attitude_scenario();
    const InertiaMatrix inertia(sc.attitude->inertia);
    Gen g(62);
    for (int i = 0; i < 100; ++i)
    {
        const UnitPoint x = spherectl::testing::free_point(g, sc.loop.field, 4, 1e-3);
        const Vector3 w = g.gaussian(3);
        const TorqueEval te = evaluate_torque(sc.loop, inertia, RigidBodyState{x, w});
        const Matrix43 a = a_matrix(x);
        const Vector v = 0.5 * a * w;
        const Vector u = evaluate_control(sc.loop, x, v).u;
        EXPECT_LT((0.5 * a * te.u_f - project_vec(x.coords(), u)).norm(), 1e-12);
        EXPECT_LT((te.omega_f - 2.0 * a.transpose() * nu_d(sc.loop.planner, sc.loop.field, x).vec).norm(), 1e-14);
    }
}

TEST(Equivalence, QuaternionAndSphereAgree)
{
    const Scenario &sc = spherectl::testing::attitude_scenario();
    const InertiaMatrix inertia(sc.attitude->inertia);
    const EquivalenceReport rep =
        attitude_equivalence(sc.loop, inertia, attitude_initial_state(*sc.attitude), 1e-3, 2.0, 50);
    ASSERT_TRUE(rep.completed) << rep.message;
    EXPECT_LT(rep.max_state_discrepancy, 1e-6);
    EXPECT_LT(rep.max_identity_error, 1e-10);
    EXPECT_EQ(rep.steps, 2000);
}

TEST(Inertia, Validation)
{
    Matrix3 m = Matrix3::Identity();
    m(0, 1) = 0.1;
    EXPECT_THROW(InertiaMatrix{m}, Error);
    EXPECT_THROW(InertiaMatrix(Matrix3(Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal())), Error);
    EXPECT_NO_THROW(InertiaMatrix(Matrix3(Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal())));
}
