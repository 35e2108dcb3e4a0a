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

#ifndef SPHERECTL_SIM_HPP
#define SPHERECTL_SIM_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spherectl/controller.hpp"
#include "spherectl/geometry.hpp"

namespace spherectl
{

    /// How the velocity state evolves.
    ///
    /// Ambient: v in R^{n+1} with v' = u, the model the controller is designed for.
    /// Tangent: v constrained to T_x S^n, v' = P(x) u - ||P(x) v||^2 x. This is
    /// the image of the quaternion attitude loop under v = A(x) omega / 2.
    enum class VelocityModel
    {
        Ambient,
        Tangent
    };

    struct SimConfig
    {
        double h = 1e-3;       // logged step (s)
        double horizon = 60.0; // T (s)
        bool renormalize = true; // must stay true: UnitPoint keeps x on the sphere
        VelocityModel velocity = VelocityModel::Ambient;
        double monotone_slack = 1e-9; // allowed per-step increase of V
        double clearance = 0.0435;    // delta_d used for the eventual-clearance monitor
        int log_every = 1;            // keep every k-th state in the trajectory record
        // Stiffness guard: each logged step is split into RK4 substeps so that
        // k_d beta h_sub <= stiffness_limit and ||P v|| h_sub <= travel_fraction * d.
        double stiffness_limit = 0.5;
        double travel_fraction = 0.25;
        int max_substeps = 1 << 16;
    };

    inline void validate_sim_config(const SimConfig &c)
    {
        if (!(c.h > 0.0))
            throw Error(ErrorKind::Validation, "step h must be positive");
        if (c.h > 1e-2)
            throw Error(ErrorKind::Validation, "step h must not exceed 1e-2");
        if (!(c.horizon > 0.0))
            throw Error(ErrorKind::Validation, "horizon must be positive");
        if (c.horizon / c.h > 1e7)
            throw Error(ErrorKind::Validation, "horizon / h exceeds 1e7 steps");
        if (!c.renormalize)
            throw Error(ErrorKind::Validation, "renormalization cannot be disabled");
        if (c.log_every < 1)
            throw Error(ErrorKind::Validation, "log_every must be >= 1");
    }

    struct StateDerivative
    {
        Vector dx;
        Vector dv;
    };

    /// State derivative from an already evaluated control at the unit point x.
    inline StateDerivative derivative_from(const ControlEval &e, const UnitPoint &x, const Vector &v,
                                           VelocityModel model)
    {
        StateDerivative d;
        const Vector pv = project_vec(x.coords(), v);
        d.dx = pv;
        if (model == VelocityModel::Ambient)
            d.dv = e.u;
        else
            d.dv = project_vec(x.coords(), e.u) - pv.squaredNorm() * x.coords();
        return d;
    }

    /// Closed-loop vector field at (x, v). x need not be exactly unit (RK4
    /// stages leave the sphere by O(h^2)); it is normalized before evaluation.
    inline StateDerivative closed_loop_rhs(const ClosedLoop &loop, const Vector &x_raw, const Vector &v,
                                           VelocityModel model)
    {
        const UnitPoint x(x_raw);
        return derivative_from(evaluate_control(loop, x, v), x, v, model);
    }

    inline void check_finite(const SimState &s)
    {
        if (!s.x.coords().allFinite() || !s.v.allFinite())
            throw Error(ErrorKind::NumericalBlowup, "state became non-finite");
    }

    /// One classical RK4 step of x' = P(x) v, v' = u(x, v), control re-evaluated
    /// at every stage; x is renormalized afterwards.
    /// `first` may carry the derivative at `state` when the caller has it already.
    inline SimState step(const ClosedLoop &loop, const SimState &state, double h,
                         VelocityModel model = VelocityModel::Ambient, const StateDerivative *first = nullptr)
    {
        const Vector &x0 = state.x.coords();
        const Vector &v0 = state.v;
        const StateDerivative k1 = first ? *first : closed_loop_rhs(loop, x0, v0, model);
        const StateDerivative k2 = closed_loop_rhs(loop, x0 + 0.5 * h * k1.dx, v0 + 0.5 * h * k1.dv, model);
        const StateDerivative k3 = closed_loop_rhs(loop, x0 + 0.5 * h * k2.dx, v0 + 0.5 * h * k2.dv, model);
        const StateDerivative k4 = closed_loop_rhs(loop, x0 + h * k3.dx, v0 + h * k3.dv, model);
        const Vector x1 = x0 + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        Vector v1 = v0 + (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        if (!x1.allFinite() || !v1.allFinite())
            throw Error(ErrorKind::NumericalBlowup, "state became non-finite during RK4 step");
        SimState next;
        next.x = UnitPoint(x1);
        if (model == VelocityModel::Tangent)
            v1 = project_vec(next.x.coords(), v1);
        next.v = v1;
        return next;
    }

    /// Per-sample diagnostics logged alongside the state.
    struct Diagnostics
    {
        double separation = 0.0; // d_U(x), configured variant
        double norm_u = 0.0;
        double norm_v_err = 0.0; // ||v - nu_d(x)||
        double V = 0.0;
    };

    enum class RunStatus
    {
        Completed,
        SafetyViolation, // separation reached zero
        NumericalBlowup,
        Infeasible, // initial state not in the free space
        Failed      // any other library error
    };

    inline const char *to_string(RunStatus s)
    {
        switch (s)
        {
        case RunStatus::Completed:
            return "completed";
        case RunStatus::SafetyViolation:
            return "safety-violation";
        case RunStatus::NumericalBlowup:
            return "numerical-blowup";
        case RunStatus::Infeasible:
            return "infeasible";
        case RunStatus::Failed:
            return "failed";
        }
        return "unknown";
    }

    /// Monitor results over every integration step, independent of log_every.
    struct TrajectorySummary
    {
        RunStatus status = RunStatus::Completed;
        std::string message;
        long steps = 0;
        long substeps = 0;
        double min_separation = std::numeric_limits<double>::infinity(); // spherical
        double max_norm_u = 0.0;
        double max_V_increase = -std::numeric_limits<double>::infinity();
        long monotone_violations = 0;
        double max_unit_norm_error = 0.0;
        // Earliest time after which the spherical separation stays >= clearance;
        // infinity if the final state is still inside the clearance band.
        double clearance_time = 0.0;
        bool all_finite = true;
        double final_time = 0.0;
        SimState final_state;
        Diagnostics final_diagnostics;

        bool monitors_passed() const
        {
            return status == RunStatus::Completed && monotone_violations == 0 && all_finite;
        }
    };

    struct Trajectory
    {
        std::vector<double> times;
        std::vector<SimState> states;
        std::vector<Diagnostics> diagnostics;
        TrajectorySummary summary;
    };

    inline int substeps_for(const SimConfig &config, const ControllerParams &ctrl, const ControlEval &e,
                            const SimState &s)
    {
        double n = 1.0;
        n = std::max(n, std::ceil(ctrl.k_d * e.beta * config.h / config.stiffness_limit));
        const double speed = project_vec(s.x.coords(), s.v).norm();
        if (std::isfinite(e.spherical) && e.spherical > 0.0)
            n = std::max(n, std::ceil(speed * config.h / (config.travel_fraction * e.spherical)));
        return static_cast<int>(std::min<double>(n, config.max_substeps));
    }

    /// Integrates the closed loop from xi0 over [0, T] with fixed logged step h.
    /// Library errors end the run and are recorded in the summary.
    inline Trajectory simulate(const ClosedLoop &loop, const SimState &initial, const SimConfig &config)
    {
        validate_sim_config(config);
        require_same_dim(initial.x, initial.v, "simulate");
        Trajectory traj;
        TrajectorySummary &sum = traj.summary;
        const long total_steps = std::lround(config.horizon / config.h);

        SimState state = initial;
        if (config.velocity == VelocityModel::Tangent)
            state.v = project_vec(state.x.coords(), state.v);
        double t = 0.0;
        ControlEval eval;
        try
        {
            eval = evaluate_control(loop, state.x, state.v);
        }
        catch (const Error &err)
        {
            sum.status = RunStatus::Infeasible;
            sum.message = err.what();
            sum.final_state = state;
            return traj;
        }

        auto record = [&](long k, const ControlEval &e)
        {
            const Diagnostics diag{e.separation, e.u.norm(), std::sqrt(2.0 * e.V), e.V};
            sum.min_separation = std::min(sum.min_separation, e.spherical);
            sum.max_norm_u = std::max(sum.max_norm_u, diag.norm_u);
            sum.max_unit_norm_error = std::max(sum.max_unit_norm_error, std::abs(state.x.coords().norm() - 1.0));
            if (!std::isfinite(diag.norm_u) || !std::isfinite(diag.V))
                sum.all_finite = false;
            if (e.spherical < config.clearance)
                sum.clearance_time = std::numeric_limits<double>::infinity();
            else if (!std::isfinite(sum.clearance_time))
                sum.clearance_time = t;
            if (k % config.log_every == 0 || k == total_steps)
            {
                traj.times.push_back(t);
                traj.states.push_back(state);
                traj.diagnostics.push_back(diag);
            }
            sum.final_diagnostics = diag;
        };

        record(0, eval);
        for (long k = 1; k <= total_steps; ++k)
        {
            const double prev_V = eval.V;
            try
            {
                const int n = substeps_for(config, loop.controller, eval, state);
                const double hs = config.h / n;
                const StateDerivative k1 = derivative_from(eval, state.x, state.v, config.velocity);
                for (int j = 0; j < n; ++j)
                    state = step(loop, state, hs, config.velocity, j == 0 ? &k1 : nullptr);
                sum.substeps += n;
                t = k * config.h;
                eval = evaluate_control(loop, state.x, state.v);
            }
            catch (const Error &err)
            {
                sum.status = err.kind() == ErrorKind::NumericalBlowup ? RunStatus::NumericalBlowup
                             : (err.kind() == ErrorKind::BoundaryContact || err.kind() == ErrorKind::InfeasibleState)
                                 ? RunStatus::SafetyViolation
                                 : RunStatus::Failed;
                sum.message = "t=" + std::to_string(k * config.h) + ": " + err.what();
                if (sum.status == RunStatus::SafetyViolation)
                    sum.min_separation = 0.0;
                if (sum.status == RunStatus::NumericalBlowup)
                    sum.all_finite = false;
                break;
            }
            sum.steps = k;
            const double dV = eval.V - prev_V;
            sum.max_V_increase = std::max(sum.max_V_increase, dV);
            if (dV > config.monotone_slack)
                ++sum.monotone_violations;
            record(k, eval);
        }
        sum.final_time = t;
        sum.final_state = state;
        return traj;
    }

    /// Thread budget for batch work: SPHERECTL_THREADS if set, else hardware.
    inline unsigned batch_threads()
    {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char *env = std::getenv("SPHERECTL_THREADS"))
        {
            const long cap = std::strtol(env, nullptr, 10);
            if (cap > 0)
                return static_cast<unsigned>(std::min<long>(cap, hw));
        }
        return hw;
    }

    /// Independent simulate() calls; results are ordered by seed index and do
    /// not depend on scheduling. Per-seed failures stay in their summaries.
    inline std::vector<Trajectory> batch_simulate(const ClosedLoop &loop, const std::vector<SimState> &seeds,
                                                  const SimConfig &config, unsigned threads = 0)
    {
        validate_sim_config(config);
        std::vector<Trajectory> out(seeds.size());
        if (threads == 0)
            threads = batch_threads();
        threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
        std::atomic<std::size_t> next{0};
        auto worker = [&]
        {
            for (std::size_t i = next++; i < seeds.size(); i = next++)
            {
                try
                {
                    out[i] = simulate(loop, seeds[i], config);
                }
                catch (const std::exception &err)
                {
                    out[i].summary.status = RunStatus::Failed;
                    out[i].summary.message = err.what();
                }
            }
        };
        if (threads <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }
        return out;
    }

    /// Unit tangent vector at x pointing at the closest point of U (the
    /// initial-velocity convention of the reference scenario).
    inline Vector velocity_toward_unsafe_set(const ObstacleField &field, const UnitPoint &x)
    {
        const Proximity p = field.nearest(x.coords());
        if (p.index < 0)
            return Vector::Zero(x.ambient_dim());
        const ClosestPoint cp = field[p.index].closest(x);
        const Vector dir = project_vec(x.coords(), cp.point.coords());
        const double n = dir.norm();
        if (n < 1e-14)
            throw Error(ErrorKind::DegenerateNormal, "closest unsafe point coincides with x");
        return dir / n;
    }

    /// Geodesic distance to the target.
    inline double distance_to_target(const ClosedLoop &loop, const SimState &s)
    {
        return sphere_angle(s.x, loop.planner.target);
    }

} // namespace spherectl

#endif // SPHERECTL_SIM_HPP
