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

#ifndef SPHERECTL_PLANNER_HPP
#define SPHERECTL_PLANNER_HPP

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "spherectl/geometry.hpp"
#include "spherectl/obstacle.hpp"

namespace spherectl
{

    /// Parameters of the kinematic desired field v_d.
    struct PlannerParams
    {
        double k1 = 1.0;       // field gain
        double kappa = 1.0;    // repulsion scaling
        double epsilon = 0.13; // blend tube width (rad)
        UnitPoint target;      // x_d
    };

    // Quintic smoothstep alpha(p) = 6 s^5 - 15 s^4 + 10 s^3, s = p / eps.

    inline double smoothstep_clamp(double p, double eps)
    {
        if (p < 0.0 || p > eps)
        {
            if (p < -1e-12 || p > eps + 1e-12)
                std::clog << "spherectl: alpha argument " << p << " outside [0, " << eps << "], clamped\n";
            p = std::clamp(p, 0.0, eps);
        }
        return p / eps;
    }

    inline double alpha(double p, double eps)
    {
        const double s = smoothstep_clamp(p, eps);
        return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    }

    inline double alpha_prime(double p, double eps)
    {
        const double s = smoothstep_clamp(p, eps);
        return 30.0 * s * s * (s - 1.0) * (s - 1.0) / eps;
    }

    inline double alpha_second(double p, double eps)
    {
        const double s = smoothstep_clamp(p, eps);
        return 60.0 * s * (s - 1.0) * (2.0 * s - 1.0) / (eps * eps);
    }

    /// Where x sits relative to the blend tubes.
    struct TubeLocation
    {
        Proximity proximity;  // nearest obstacle (spherical distance)
        bool in_tube = false; // nearest distance < epsilon
    };

    inline TubeLocation locate(const PlannerParams &params, const ObstacleField &field, const Vector &x)
    {
        TubeLocation loc;
        loc.proximity = field.nearest(x, params.epsilon);
        if (loc.proximity.inside && loc.proximity.index >= 0 &&
            field[loc.proximity.index].radial_gap(x) < 0.0)
            throw Error(ErrorKind::InfeasibleState, "x lies inside obstacle " + std::to_string(loc.proximity.index));
        if (loc.proximity.second_within)
            throw Error(ErrorKind::ConfigurationInvalid, "two obstacles are active within the blend tube");
        loc.in_tube = loc.proximity.index >= 0 && loc.proximity.distance < params.epsilon;
        return loc;
    }

    inline Vector desired_field_at(const PlannerParams &params, const ObstacleField &field,
                                   const TubeLocation &loc)
    {
        const Vector &xd = params.target.coords();
        if (!loc.in_tube)
            return params.k1 * xd;
        const double a = alpha(loc.proximity.distance, params.epsilon);
        const Vector &g = field[loc.proximity.index].kernel().coords();
        return params.k1 * (a * xd - ((1.0 - a) / params.kappa) * g);
    }

    /// v_d(x): k1 x_d away from the tubes, blended towards -g_i/kappa inside tube i.
    inline Vector desired_field(const PlannerParams &params, const ObstacleField &field, const UnitPoint &x)
    {
        require_same_dim(x, params.target.coords(), "desired_field");
        return desired_field_at(params, field, locate(params, field, x.coords()));
    }

    /// nu_d(x) = P(x) v_d(x).
    inline TangentVector nu_d(const PlannerParams &params, const ObstacleField &field, const UnitPoint &x)
    {
        return project(x, desired_field(params, field, x));
    }

    inline constexpr double kJacobianMinDistance = 1e-6;

    /// Ambient derivative of v_d: zero outside the tubes and the rank-one
    ///   -k1 alpha'(d) / sin(d) (x_d + g_i / kappa) Pi(x)^T
    /// inside tube i.
    inline Matrix desired_field_jacobian_at(const PlannerParams &params, const ObstacleField &field,
                                            const UnitPoint &x, const TubeLocation &loc)
    {
        const Eigen::Index m = x.ambient_dim();
        if (!loc.in_tube)
            return Matrix::Zero(m, m);
        const double d = loc.proximity.distance;
        if (d < kJacobianMinDistance)
            throw Error(ErrorKind::NearBoundaryJacobian,
                        "separation " + std::to_string(d) + " too small for the tube Jacobian");
        const StarObstacle &obs = field[loc.proximity.index];
        const Vector closest = loc.proximity.point ? loc.proximity.point->coords() : obs.closest(x).point.coords();
        const double scale = -params.k1 * alpha_prime(d, params.epsilon) / std::sin(d);
        const Vector dir = params.target.coords() + obs.kernel().coords() / params.kappa;
        return scale * dir * closest.transpose();
    }

    /// The literal ambient expression P dv_d/dx - x v_d^T - (x^T v_d) I.
    /// Its radial column x -> -2 (x^T v_d) x depends on how nu_d is extended
    /// off the sphere; see jacobian_jd for the tangential version.
    inline Matrix jacobian_jd_ambient(const PlannerParams &params, const ObstacleField &field, const UnitPoint &x)
    {
        const TubeLocation loc = locate(params, field, x.coords());
        const Vector vd = desired_field_at(params, field, loc);
        const Matrix dvd = desired_field_jacobian_at(params, field, x, loc);
        const Vector &c = x.coords();
        const Eigen::Index m = c.size();
        return projector(x) * dvd - c * vd.transpose() - c.dot(vd) * Matrix::Identity(m, m);
    }

    /// J_d(x): derivative of nu_d along the sphere, i.e. the ambient expression
    /// composed with P(x). J_d(x) t agrees with the ambient form for every
    /// tangent t, and J_d(x) x = 0.
    inline Matrix jacobian_jd_at(const PlannerParams &params, const ObstacleField &field, const UnitPoint &x,
                                 const TubeLocation &loc, const Vector &vd)
    {
        const Matrix dvd = desired_field_jacobian_at(params, field, x, loc);
        const Vector &c = x.coords();
        const Eigen::Index m = c.size();
        const Matrix p = projector(x);
        const Matrix ambient = p * dvd - c * vd.transpose() - c.dot(vd) * Matrix::Identity(m, m);
        return ambient * p;
    }

    inline Matrix jacobian_jd(const PlannerParams &params, const ObstacleField &field, const UnitPoint &x)
    {
        require_same_dim(x, params.target.coords(), "jacobian_jd");
        const TubeLocation loc = locate(params, field, x.coords());
        return jacobian_jd_at(params, field, x, loc, desired_field_at(params, field, loc));
    }

    /// Everything the controller needs from the planner at one point.
    struct PlannerEval
    {
        TubeLocation location;
        Vector vd;
        Vector nu;
        Matrix jd;
    };

    inline PlannerEval evaluate_planner(const PlannerParams &params, const ObstacleField &field,
                                        const UnitPoint &x, bool with_jacobian = true)
    {
        PlannerEval e;
        e.location = locate(params, field, x.coords());
        e.vd = desired_field_at(params, field, e.location);
        e.nu = project_vec(x.coords(), e.vd);
        if (with_jacobian)
            e.jd = jacobian_jd_at(params, field, x, e.location, e.vd);
        return e;
    }

} // namespace spherectl

#endif // SPHERECTL_PLANNER_HPP
