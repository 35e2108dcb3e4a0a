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

#ifndef SPHERECTL_CHECKS_HPP
#define SPHERECTL_CHECKS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "spherectl/analysis.hpp"
#include "spherectl/controller.hpp"
#include "spherectl/obstacle.hpp"
#include "spherectl/planner.hpp"

namespace spherectl
{

    struct CheckResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    inline std::string format_double(double v, const char *fmt = "%.3e")
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), fmt, v);
        return buf;
    }

    /// Uniform points of S^n satisfying lo <= d_U(x) < hi (spherical).
    inline std::vector<UnitPoint> sample_band(const ObstacleField &field, int ambient_dim, int count, double lo,
                                              double hi, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<UnitPoint> out;
        long attempts = 0;
        while (static_cast<int>(out.size()) < count && attempts < 1000L * count)
        {
            ++attempts;
            Vector g(ambient_dim);
            for (int i = 0; i < ambient_dim; ++i)
                g(i) = normal(rng);
            const UnitPoint x(g);
            if (field.contains(x))
                continue;
            const double d = field.nearest(x.coords()).distance;
            if (d >= lo && d < hi)
                out.push_back(x);
        }
        return out;
    }

    /// Central finite differences of a scalar function along an orthonormal
    /// tangent basis, assembled back into the ambient space.
    template <typename F>
    Vector tangent_gradient_fd(const UnitPoint &x, F &&f, double h)
    {
        const Matrix basis = tangent_basis(x);
        Vector g = Vector::Zero(x.ambient_dim());
        for (Eigen::Index k = 0; k < basis.cols(); ++k)
        {
            const UnitPoint xp(x.coords() + h * basis.col(k));
            const UnitPoint xm(x.coords() - h * basis.col(k));
            g += (f(xp) - f(xm)) / (2.0 * h) * basis.col(k);
        }
        return g;
    }

    /// separation_gradient against finite differences of d_U in the blend tubes.
    inline CheckResult check_separation_gradient(const ClosedLoop &loop, int samples, double tol = 1e-5,
                                                 std::uint64_t seed = 11)
    {
        CheckResult r{"separation_gradient vs finite differences", true, ""};
        if (loop.field.empty())
        {
            r.detail = "no obstacles";
            return r;
        }
        const auto pts = sample_band(loop.field, loop.ambient_dim(), samples, 1e-3, loop.planner.epsilon, seed);
        double worst = 0.0;
        for (const auto &x : pts)
        {
            const Vector g = separation_gradient(loop.field, x).vec;
            const Vector fd = tangent_gradient_fd(
                x, [&](const UnitPoint &y) { return loop.field.nearest(y.coords()).distance; }, 1e-6);
            worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-12));
        }
        r.passed = static_cast<int>(pts.size()) == samples && worst < tol;
        r.detail = std::to_string(pts.size()) + " samples, max rel err " + format_double(worst);
        return r;
    }

    /// J_d against central differences of x -> nu_d(x / |x|).
    inline CheckResult check_jacobian(const ClosedLoop &loop, int samples, double tol = 1e-4,
                                      std::uint64_t seed = 13)
    {
        CheckResult r{"jacobian_jd vs finite differences", true, ""};
        const auto pts = sample_band(loop.field, loop.ambient_dim(), samples, 1e-3,
                                     std::numeric_limits<double>::infinity(), seed);
        const double h = 1e-6;
        double worst = 0.0;
        for (const auto &x : pts)
        {
            const Matrix j = jacobian_jd(loop.planner, loop.field, x);
            Matrix fd(x.ambient_dim(), x.ambient_dim());
            for (int k = 0; k < x.ambient_dim(); ++k)
            {
                Vector e = Vector::Zero(x.ambient_dim());
                e(k) = h;
                const Vector np = nu_d(loop.planner, loop.field, UnitPoint(x.coords() + e)).vec;
                const Vector nm = nu_d(loop.planner, loop.field, UnitPoint(x.coords() - e)).vec;
                fd.col(k) = (np - nm) / (2.0 * h);
            }
            worst = std::max(worst, (j - fd).norm() / std::max(j.norm(), 1e-12));
        }
        r.passed = static_cast<int>(pts.size()) == samples && worst < tol;
        r.detail = std::to_string(pts.size()) + " samples, max rel err " + format_double(worst);
        return r;
    }

    inline CheckResult check_bridge(const ControllerParams &ctrl)
    {
        const BridgeCheck b = validate_bridge(ctrl);
        CheckResult r{"beta bridge endpoint conditions", b.ok, b.ok ? "C1 at both knots" : ""};
        for (const auto &f : b.failures)
            r.detail += (r.detail.empty() ? "" : "; ") + f;
        return r;
    }

    /// Outward normal has positive component along P(x)(x - g_i) in each tube.
    inline CheckResult check_normal_alignment(const ClosedLoop &loop, int samples)
    {
        CheckResult r{"normal alignment in blend tubes", true, ""};
        double worst = 1.0;
        for (std::size_t i = 0; i < loop.field.size(); ++i)
        {
            const AlignmentReport a = validate_normal_alignment(loop.field[i], loop.planner.epsilon, samples, 17 + i);
            worst = std::min(worst, a.min_cosine);
            if (!a.ok)
            {
                r.passed = false;
                r.detail += "obstacle " + std::to_string(i) + " violated; ";
            }
        }
        r.detail += "min cosine " + format_double(worst, "%.4f");
        return r;
    }

    /// Entrywise comparison of closed_loop_jacobian with central differences of
    /// the closed-loop vector field (x, v) -> (P(x) v, u(x / |x|, v)).
    inline double closed_loop_jacobian_fd_error(const ClosedLoop &loop, const UnitPoint &x_star, double h = 1e-6)
    {
        const Eigen::MatrixXd j = closed_loop_jacobian<double>(loop, x_star);
        const int m = x_star.ambient_dim();
        auto field = [&](const Eigen::VectorXd &z)
        {
            const UnitPoint x(Vector(z.head(m)));
            const Vector v = z.tail(m);
            Eigen::VectorXd out(2 * m);
            out.head(m) = project_vec(x.coords(), v);
            out.tail(m) = evaluate_control(loop, x, v).u;
            return out;
        };
        Eigen::VectorXd z0 = Eigen::VectorXd::Zero(2 * m);
        z0.head(m) = x_star.coords();
        Eigen::MatrixXd fd(2 * m, 2 * m);
        for (int k = 0; k < 2 * m; ++k)
        {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * m);
            e(k) = h;
            fd.col(k) = (field(z0 + e) - field(z0 - e)) / (2.0 * h);
        }
        // Relative where entries are O(1) or larger, absolute below that.
        return ((fd - j).cwiseAbs().array() / j.cwiseAbs().array().max(1.0)).maxCoeff();
    }

    struct EquilibriumCheck
    {
        std::vector<EquilibriumReport> reports;
        std::vector<EigenstructureReport> eigen;
        std::vector<double> jacobian_fd_error;
        std::vector<CheckResult> results;
    };

    inline EquilibriumCheck check_equilibria(const ClosedLoop &loop, int grid)
    {
        EquilibriumCheck out;
        out.reports = find_equilibria(loop, grid);
        bool target_ok = false, residual_ok = true, base_point_ok = true, eigen_ok = true, fd_ok = true, class_ok = true;
        double worst_res = 0.0, worst_base_point = 0.0, worst_fd = 0.0;
        int unstable = 0;
        std::string eigen_detail;
        for (const auto &rep : out.reports)
        {
            worst_res = std::max(worst_res, rep.residual);
            residual_ok = residual_ok && rep.residual < kEquilibriumResidual;
            if (rep.is_target && rep.classification == Classification::Target)
                target_ok = true;
            if (!rep.is_target && rep.classification != Classification::Unstable)
                class_ok = false;
            if (rep.classification == Classification::Unstable)
                ++unstable;
            const EigenstructureReport es = check_eigenstructure(loop, rep.x_star);
            out.eigen.push_back(es);
            worst_base_point = std::max(worst_base_point, es.base_point_residual);
            base_point_ok = base_point_ok && es.base_point_residual < 1e-6;
            eigen_ok = eigen_ok && es.ok;
            const double fd = closed_loop_jacobian_fd_error(loop, rep.x_star);
            out.jacobian_fd_error.push_back(fd);
            worst_fd = std::max(worst_fd, fd);
            fd_ok = fd_ok && fd < 1e-4;
        }
        const std::string count = std::to_string(out.reports.size()) + " equilibria (" + std::to_string(unstable) +
                                  " unstable)";
        out.results.push_back({"equilibria found, target classified", target_ok, count});
        out.results.push_back({"equilibrium residual < 1e-9", residual_ok, "max " + format_double(worst_res)});
        out.results.push_back({"non-target equilibria unstable", class_ok, count});
        out.results.push_back({"|J_d(x*) x*| < 1e-6 at equilibria", base_point_ok, "max " + format_double(worst_base_point)});
        out.results.push_back({"closed-loop eigenstructure", eigen_ok, count});
        out.results.push_back({"closed-loop Jacobian vs finite differences", fd_ok, "max " + format_double(worst_fd)});
        return out;
    }

    /// The full suite behind `spherectl check`.
    inline std::vector<CheckResult> run_checks(const ClosedLoop &loop, int samples, int grid)
    {
        std::vector<CheckResult> out;
        out.push_back(check_bridge(loop.controller));
        out.push_back(check_separation_gradient(loop, samples));
        out.push_back(check_jacobian(loop, samples));
        out.push_back(check_normal_alignment(loop, samples));
        const EquilibriumCheck eq = check_equilibria(loop, grid);
        out.insert(out.end(), eq.results.begin(), eq.results.end());
        return out;
    }

} // namespace spherectl

#endif // SPHERECTL_CHECKS_HPP
