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

#ifndef SPHERECTL_CONTROLLER_HPP
#define SPHERECTL_CONTROLLER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spherectl/geometry.hpp"
#include "spherectl/obstacle.hpp"
#include "spherectl/planner.hpp"

namespace spherectl
{

    /// Dynamic damping schedule k_d * beta(d).
    struct ControllerParams
    {
        double k_d = 1.0;
        double epsilon1 = 0.087;
        double epsilon2 = 0.13;
        // C^1 bridge phi on [epsilon1, epsilon2]; empty selects the cubic
        // Hermite blend (1 - b(s)) / p + b(s), b(s) = 3 s^2 - 2 s^3.
        std::function<double(double)> bridge;
    };

    inline double default_bridge(const ControllerParams &params, double d)
    {
        const double s = (d - params.epsilon1) / (params.epsilon2 - params.epsilon1);
        const double b = s * s * (3.0 - 2.0 * s);
        return (1.0 - b) / d + b;
    }

    /// beta(d) = 1/d below epsilon1, phi(d) between the knots, 1 above epsilon2.
    inline double beta(const ControllerParams &params, double d)
    {
        if (!(d > 0.0))
            throw Error(ErrorKind::BoundaryContact, "beta: separation " + std::to_string(d) + " is not positive");
        if (d <= params.epsilon1)
            return 1.0 / d;
        if (d >= params.epsilon2)
            return 1.0;
        return params.bridge ? params.bridge(d) : default_bridge(params, d);
    }

    struct BridgeCheck
    {
        bool ok = true;
        std::vector<std::string> failures;
    };

    /// Finite-difference check of the four endpoint conditions on phi plus
    /// positivity on a grid.
    inline BridgeCheck validate_bridge(const ControllerParams &params, double tol = 1e-6)
    {
        BridgeCheck check;
        auto phi = [&](double p)
        { return params.bridge ? params.bridge(p) : default_bridge(params, p); };
        const double e1 = params.epsilon1, e2 = params.epsilon2;
        const double h = 1e-7;
        auto fail = [&](const std::string &what)
        {
            check.ok = false;
            check.failures.push_back(what);
        };
        auto rel = [](double a, double b)
        { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
        if (rel(phi(e1), 1.0 / e1) > tol)
            fail("phi(epsilon1) != 1/epsilon1");
        if (rel(phi(e2), 1.0) > tol)
            fail("phi(epsilon2) != 1");
        // Second-order one-sided differences from inside the bridge interval.
        const double d1 = (-3.0 * phi(e1) + 4.0 * phi(e1 + h) - phi(e1 + 2.0 * h)) / (2.0 * h);
        const double d2 = (3.0 * phi(e2) - 4.0 * phi(e2 - h) + phi(e2 - 2.0 * h)) / (2.0 * h);
        if (rel(d1, -1.0 / (e1 * e1)) > tol)
            fail("phi'(epsilon1) != -1/epsilon1^2");
        if (std::abs(d2) > tol)
            fail("phi'(epsilon2) != 0");
        for (int i = 0; i <= 256; ++i)
            if (!(phi(e1 + (e2 - e1) * i / 256.0) > 0.0))
            {
                fail("phi not positive on [epsilon1, epsilon2]");
                break;
            }
        return check;
    }

    /// Controller, planner and unsafe set bundled for closed-loop evaluation.
    struct ClosedLoop
    {
        PlannerParams planner;
        ControllerParams controller;
        ObstacleField field;
        SeparationVariant variant = SeparationVariant::Spherical;

        int ambient_dim() const { return planner.target.ambient_dim(); }
    };

    /// Composite state xi = (x, v); v is kept in the ambient space.
    struct SimState
    {
        UnitPoint x;
        Vector v;
    };

    /// Separation in the requested variant, given the nearest-obstacle query.
    inline double separation_value(const ObstacleField &field, SeparationVariant variant, const Vector &x,
                                   const Proximity &nearest)
    {
        switch (variant)
        {
        case SeparationVariant::Spherical:
            return nearest.distance;
        case SeparationVariant::Chordal:
            return std::isfinite(nearest.distance) ? 1.0 - std::cos(nearest.distance)
                                                   : std::numeric_limits<double>::infinity();
        case SeparationVariant::Product:
            return field.separation(x, SeparationVariant::Product);
        }
        return nearest.distance;
    }

    /// One evaluation of the feedback law and its diagnostics.
    struct ControlEval
    {
        double separation = 0.0; // d_U(x), configured variant
        double spherical = 0.0;  // spherical distance to U
        double beta = 1.0;
        Vector nu;       // nu_d(x)
        Vector u;        // control input
        double V = 0.0;  // 1/2 ||v - nu_d(x)||^2
        int active = -1; // nearest obstacle
    };

    inline ControlEval evaluate_control(const PlannerParams &planner, const ControllerParams &params,
                                        const ObstacleField &field, SeparationVariant variant,
                                        const UnitPoint &x, const Vector &v)
    {
        require_same_dim(x, v, "control");
        const PlannerEval pe = evaluate_planner(planner, field, x);
        ControlEval e;
        e.active = pe.location.proximity.index;
        e.spherical = pe.location.proximity.distance;
        e.separation = separation_value(field, variant, x.coords(), pe.location.proximity);
        if (!(e.separation > 0.0))
            throw Error(ErrorKind::BoundaryContact, "separation reached zero");
        e.beta = beta(params, e.separation);
        e.nu = pe.nu;
        const Vector z = v - pe.nu;
        e.u = -params.k_d * e.beta * z + pe.jd * project_vec(x.coords(), v);
        e.V = 0.5 * z.squaredNorm();
        return e;
    }

    inline ControlEval evaluate_control(const ClosedLoop &loop, const UnitPoint &x, const Vector &v)
    {
        return evaluate_control(loop.planner, loop.controller, loop.field, loop.variant, x, v);
    }

    /// u(xi) = -k_d beta(d_U(x)) (v - nu_d(x)) + J_d(x) P(x) v.
    inline Vector control(const ClosedLoop &loop, const SimState &state)
    {
        return evaluate_control(loop, state.x, state.v).u;
    }

    inline Vector control(const ControllerParams &params, const PlannerParams &planner,
                          const ObstacleField &field, const SimState &state)
    {
        return evaluate_control(planner, params, field, SeparationVariant::Spherical, state.x, state.v).u;
    }

    /// V(xi) = 1/2 ||v - nu_d(x)||^2.
    inline double lyapunov_v(const PlannerParams &planner, const ObstacleField &field, const SimState &state)
    {
        require_same_dim(state.x, state.v, "lyapunov_v");
        const Vector nu = nu_d(planner, field, state.x).vec;
        return 0.5 * (state.v - nu).squaredNorm();
    }

} // namespace spherectl

#endif // SPHERECTL_CONTROLLER_HPP
