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

#ifndef SPHERECTL_ATTITUDE_HPP
#define SPHERECTL_ATTITUDE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "spherectl/controller.hpp"
#include "spherectl/sim.hpp"

namespace spherectl
{

    using Vector3 = Eigen::Vector3d;
    using Matrix3 = Eigen::Matrix3d;
    using Matrix43 = Eigen::Matrix<double, 4, 3>;

    /// Unit quaternion [eta, q] stored as a point of S^3.
    inline UnitPoint make_quaternion(double eta, const Vector3 &q)
    {
        return UnitPoint({eta, q.x(), q.y(), q.z()});
    }

    inline void require_quaternion(const UnitPoint &x)
    {
        if (x.ambient_dim() != 4)
            throw Error(ErrorKind::Input, "attitude: expected a unit quaternion (point of S^3)");
    }

    inline Matrix3 skew(const Vector3 &q)
    {
        Matrix3 s;
        s << 0.0, -q.z(), q.y(),
            q.z(), 0.0, -q.x(),
            -q.y(), q.x(), 0.0;
        return s;
    }

    /// A(x) = [-q^T; eta I_3 + q^x]. Linear in x, so it is also used on
    /// non-unit arguments (A(x') for the kinematics identity).
    inline Matrix43 a_matrix(const Vector &x)
    {
        if (x.size() != 4)
            throw Error(ErrorKind::Input, "a_matrix: expected 4 coordinates");
        const double eta = x(0);
        const Vector3 q(x(1), x(2), x(3));
        Matrix43 a;
        a.row(0) = -q.transpose();
        a.bottomRows<3>() = eta * Matrix3::Identity() + skew(q);
        return a;
    }

    inline Matrix43 a_matrix(const UnitPoint &x) { return a_matrix(x.coords()); }

    /// Symmetric positive definite inertia J_m (kg m^2).
    class InertiaMatrix
    {
    public:
        explicit InertiaMatrix(const Matrix3 &jm) : jm_(jm)
        {
            if (!jm.allFinite())
                throw Error(ErrorKind::Validation, "inertia matrix is not finite");
            if ((jm - jm.transpose()).cwiseAbs().maxCoeff() > 1e-12)
                throw Error(ErrorKind::Validation, "inertia matrix is not symmetric");
            Eigen::SelfAdjointEigenSolver<Matrix3> es(jm);
            if (!(es.eigenvalues().minCoeff() > 0.0))
                throw Error(ErrorKind::Validation, "inertia matrix is not positive definite");
            inverse_ = jm.inverse();
        }

        static InertiaMatrix identity() { return InertiaMatrix(Matrix3::Identity()); }

        const Matrix3 &matrix() const noexcept { return jm_; }
        const Matrix3 &inverse() const noexcept { return inverse_; }

    private:
        Matrix3 jm_;
        Matrix3 inverse_;
    };

    struct RigidBodyState
    {
        UnitPoint x;  // attitude quaternion
        Vector3 omega; // body angular velocity (rad/s)
    };

    /// omega_f(x) = 2 A(x)^T nu_d(x).
    inline Vector3 omega_f(const PlannerParams &planner, const ObstacleField &field, const UnitPoint &x)
    {
        require_quaternion(x);
        return 2.0 * a_matrix(x).transpose() * nu_d(planner, field, x).vec;
    }

    struct TorqueEval
    {
        Vector3 tau;
        Vector3 u_f;
        Vector3 omega_f;
        double separation = 0.0;
        double spherical = 0.0;
        double beta = 1.0;
    };

    inline TorqueEval evaluate_torque(const ClosedLoop &loop, const InertiaMatrix &inertia,
                                      const RigidBodyState &state)
    {
        require_quaternion(state.x);
        const PlannerEval pe = evaluate_planner(loop.planner, loop.field, state.x);
        TorqueEval e;
        e.spherical = pe.location.proximity.distance;
        e.separation = separation_value(loop.field, loop.variant, state.x.coords(), pe.location.proximity);
        if (!(e.separation > 0.0))
            throw Error(ErrorKind::BoundaryContact, "separation reached zero");
        e.beta = beta(loop.controller, e.separation);
        const Matrix43 a = a_matrix(state.x);
        const Eigen::Matrix4d jd = pe.jd;
        e.omega_f = 2.0 * a.transpose() * Eigen::Vector4d(pe.nu);
        e.u_f = -loop.controller.k_d * e.beta * (state.omega - e.omega_f) + a.transpose() * jd * a * state.omega;
        const Matrix3 &jm = inertia.matrix();
        e.tau = state.omega.cross(jm * state.omega) + jm * e.u_f;
        return e;
    }

    /// tau = omega x J_m omega + J_m u_f, with
    /// u_f = -k_d beta(d_U(x)) (omega - omega_f(x)) + A(x)^T J_d(x) A(x) omega.
    inline Vector3 torque(const ClosedLoop &loop, const InertiaMatrix &inertia, const RigidBodyState &state)
    {
        return evaluate_torque(loop, inertia, state).tau;
    }

    inline Vector3 torque(const ControllerParams &ctrl, const PlannerParams &planner, const ObstacleField &field,
                          const InertiaMatrix &inertia, const RigidBodyState &state)
    {
        return torque(ClosedLoop{planner, ctrl, field, SeparationVariant::Spherical}, inertia, state);
    }

    struct RigidBodyDerivative
    {
        Eigen::Vector4d dx;
        Vector3 domega;
    };

    inline RigidBodyDerivative rigid_body_rhs(const InertiaMatrix &inertia, const Eigen::Vector4d &x,
                                              const Vector3 &omega, const Vector3 &tau)
    {
        const Matrix3 &jm = inertia.matrix();
        return {0.5 * a_matrix(Vector(x)) * omega, inertia.inverse() * (tau - omega.cross(jm * omega))};
    }

    /// One RK4 step of x' = A(x) omega / 2, J_m omega' = -omega x J_m omega + tau,
    /// then quaternion renormalization. `torque_source` is either a fixed
    /// torque (held over the step) or a callable RigidBodyState -> Vector3
    /// re-evaluated at every stage.
    template <typename TorqueSource>
    RigidBodyState quaternion_step(const InertiaMatrix &inertia, const RigidBodyState &state,
                                   const TorqueSource &torque_source, double h)
    {
        require_quaternion(state.x);
        if (!(h > 0.0))
            throw Error(ErrorKind::Input, "quaternion_step: h must be positive");
        auto tau_at = [&](const Eigen::Vector4d &x, const Vector3 &w) -> Vector3
        {
            if constexpr (std::is_base_of_v<Eigen::MatrixBase<TorqueSource>, TorqueSource>)
                return torque_source;
            else
                return torque_source(RigidBodyState{UnitPoint(Vector(x)), w});
        };
        const Eigen::Vector4d x0 = state.x.coords();
        const Vector3 &w0 = state.omega;
        const auto k1 = rigid_body_rhs(inertia, x0, w0, tau_at(x0, w0));
        const Eigen::Vector4d x2 = x0 + 0.5 * h * k1.dx;
        const Vector3 w2 = w0 + 0.5 * h * k1.domega;
        const auto k2 = rigid_body_rhs(inertia, x2, w2, tau_at(x2, w2));
        const Eigen::Vector4d x3 = x0 + 0.5 * h * k2.dx;
        const Vector3 w3 = w0 + 0.5 * h * k2.domega;
        const auto k3 = rigid_body_rhs(inertia, x3, w3, tau_at(x3, w3));
        const Eigen::Vector4d x4 = x0 + h * k3.dx;
        const Vector3 w4 = w0 + h * k3.domega;
        const auto k4 = rigid_body_rhs(inertia, x4, w4, tau_at(x4, w4));
        const Eigen::Vector4d x1 = x0 + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        const Vector3 w1 = w0 + (h / 6.0) * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
        if (!x1.allFinite() || !w1.allFinite())
            throw Error(ErrorKind::NumericalBlowup, "quaternion_step produced a non-finite state");
        return RigidBodyState{UnitPoint(Vector(x1)), w1};
    }

    /// v = A(x) omega / 2: the sphere-system state corresponding to a rigid-body state.
    inline SimState to_sphere_state(const RigidBodyState &s)
    {
        return SimState{s.x, Vector(0.5 * a_matrix(s.x) * s.omega)};
    }

    struct AttitudeSample
    {
        double t = 0.0;
        RigidBodyState state;
        double separation = 0.0;
        double norm_tau = 0.0;
        double norm_omega_err = 0.0; // ||omega - omega_f(x)||
    };

    struct AttitudeTrajectory
    {
        std::vector<AttitudeSample> samples;
        RunStatus status = RunStatus::Completed;
        std::string message;
        double min_separation = std::numeric_limits<double>::infinity();
        double max_norm_tau = 0.0;
        long monotone_violations = 0; // ||omega - omega_f|| increases beyond slack
    };

    /// Closed-loop rigid-body simulation with the torque re-evaluated at every
    /// RK4 stage. Uses config.h and config.horizon; no substepping.
    inline AttitudeTrajectory simulate_attitude(const ClosedLoop &loop, const InertiaMatrix &inertia,
                                                const RigidBodyState &initial, const SimConfig &config)
    {
        validate_sim_config(config);
        require_quaternion(initial.x);
        AttitudeTrajectory traj;
        const long total = std::lround(config.horizon / config.h);
        RigidBodyState state = initial;
        auto source = [&](const RigidBodyState &s) { return torque(loop, inertia, s); };
        double prev_err = std::numeric_limits<double>::infinity();
        for (long k = 0; k <= total; ++k)
        {
            try
            {
                const TorqueEval e = evaluate_torque(loop, inertia, state);
                AttitudeSample sample{k * config.h, state, e.spherical, e.tau.norm(), (state.omega - e.omega_f).norm()};
                traj.min_separation = std::min(traj.min_separation, e.spherical);
                traj.max_norm_tau = std::max(traj.max_norm_tau, sample.norm_tau);
                if (sample.norm_omega_err > prev_err + config.monotone_slack)
                    ++traj.monotone_violations;
                prev_err = sample.norm_omega_err;
                if (k % config.log_every == 0 || k == total)
                    traj.samples.push_back(sample);
                if (k == total)
                    break;
                state = quaternion_step(inertia, state, source, config.h);
            }
            catch (const Error &err)
            {
                traj.status = err.kind() == ErrorKind::NumericalBlowup ? RunStatus::NumericalBlowup
                                                                       : RunStatus::SafetyViolation;
                traj.message = err.what();
                break;
            }
        }
        return traj;
    }

    /// Result of running the rigid-body loop and the tangent-velocity S^3
    /// loop side by side from the same initial condition.
    struct EquivalenceReport
    {
        double max_state_discrepancy = 0.0; // max ||x_q - x_s|| + ||A(x_q) omega / 2 - v_s||
        double max_identity_error = 0.0;    // max | ||v_s - nu_d(x_s)|| - ||omega - omega_f(x_q)|| / 2 |
        double min_separation = std::numeric_limits<double>::infinity();
        long steps = 0;
        bool completed = true;
        std::string message;
        std::vector<double> times;
        std::vector<RigidBodyState> body;
        std::vector<SimState> sphere;
    };

    /// Both systems use plain RK4 with the same step h and no substepping, so
    /// their discrete trajectories differ only by local truncation terms.
    inline EquivalenceReport attitude_equivalence(const ClosedLoop &loop, const InertiaMatrix &inertia,
                                                  const RigidBodyState &initial, double h, double horizon,
                                                  int log_every = 1)
    {
        require_quaternion(initial.x);
        SimConfig cfg;
        cfg.h = h;
        cfg.horizon = horizon;
        validate_sim_config(cfg);
        EquivalenceReport rep;
        const long total = std::lround(horizon / h);
        RigidBodyState body = initial;
        SimState sphere = to_sphere_state(initial);
        auto source = [&](const RigidBodyState &s) { return torque(loop, inertia, s); };
        for (long k = 0; k <= total; ++k)
        {
            try
            {
                const TorqueEval te = evaluate_torque(loop, inertia, body);
                const ControlEval ce = evaluate_control(loop, sphere.x, sphere.v);
                const SimState mapped = to_sphere_state(body);
                const double disc = (mapped.x.coords() - sphere.x.coords()).norm() + (mapped.v - sphere.v).norm();
                rep.max_state_discrepancy = std::max(rep.max_state_discrepancy, disc);
                const double lhs = std::sqrt(2.0 * ce.V);
                const double rhs = 0.5 * (body.omega - te.omega_f).norm();
                rep.max_identity_error = std::max(rep.max_identity_error, std::abs(lhs - rhs));
                rep.min_separation = std::min(rep.min_separation, te.spherical);
                if (k % log_every == 0 || k == total)
                {
                    rep.times.push_back(k * h);
                    rep.body.push_back(body);
                    rep.sphere.push_back(sphere);
                }
                rep.steps = k;
                if (k == total)
                    break;
                body = quaternion_step(inertia, body, source, h);
                sphere = step(loop, sphere, h, VelocityModel::Tangent);
            }
            catch (const Error &err)
            {
                rep.completed = false;
                rep.message = err.what();
                break;
            }
        }
        return rep;
    }

} // namespace spherectl

#endif // SPHERECTL_ATTITUDE_HPP
