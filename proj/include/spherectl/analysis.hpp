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

#ifndef SPHERECTL_ANALYSIS_HPP
#define SPHERECTL_ANALYSIS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "spherectl/controller.hpp"
#include "spherectl/planner.hpp"

namespace spherectl
{

    enum class Classification
    {
        Target,       // x_d with every tangent eigenvalue in the open left half plane
        Stable,       // a non-target point with the same property
        Unstable,     // some tangent eigenvalue has positive real part
        Indeterminate // some tangent eigenvalue is within 1e-8 of the imaginary axis
    };

    inline const char *to_string(Classification c)
    {
        switch (c)
        {
        case Classification::Target:
            return "target";
        case Classification::Stable:
            return "stable";
        case Classification::Unstable:
            return "unstable";
        case Classification::Indeterminate:
            return "indeterminate";
        }
        return "unknown";
    }

    struct SpectrumEntry
    {
        std::complex<double> value;
        bool tangent = false; // eigenvector lies in T_x S^n
    };

    struct EquilibriumReport
    {
        UnitPoint x_star;
        double residual = 0.0; // ||nu_d(x*)||
        std::vector<SpectrumEntry> jacobian_spectrum; // spectrum of J_d(x*)
        Classification classification = Classification::Indeterminate;
        int support = 0;       // number of Newton starts that converged here
        double separation = 0.0; // spherical distance to U
        bool is_target = false;
    };

    inline constexpr double kEquilibriumResidual = 1e-9;
    inline constexpr double kDedupAngle = 1e-6;
    inline constexpr double kTangencyTol = 1e-6;
    inline constexpr double kIndeterminateBand = 1e-8;

    struct NewtonOptions
    {
        int max_iterations = 100;
        double tolerance = 1e-12; // on ||nu_d||
        int max_halvings = 40;
    };

    /// Damped Newton on the tangent residual nu_d(x) = 0 with retraction by
    /// renormalization. Returns nullopt on divergence or when an iterate would
    /// leave the free space.
    inline std::optional<UnitPoint> newton_equilibrium(const PlannerParams &planner, const ObstacleField &field,
                                                       UnitPoint x, const NewtonOptions &opt = {})
    {
        try
        {
            PlannerEval pe = evaluate_planner(planner, field, x);
            double res = pe.nu.norm();
            for (int it = 0; it < opt.max_iterations && res > opt.tolerance; ++it)
            {
                const Matrix basis = tangent_basis(x);
                const Matrix b = basis.transpose() * pe.jd * basis;
                const Vector g = basis.transpose() * pe.nu;
                Eigen::FullPivLU<Matrix> lu(b);
                if (!lu.isInvertible())
                    return std::nullopt;
                const Vector delta = -(lu.solve(g));
                double t = 1.0;
                bool accepted = false;
                for (int k = 0; k < opt.max_halvings; ++k, t *= 0.5)
                {
                    const UnitPoint trial(x.coords() + t * (basis * delta));
                    try
                    {
                        PlannerEval te = evaluate_planner(planner, field, trial);
                        const double tres = te.nu.norm();
                        if (tres < res)
                        {
                            x = trial;
                            pe = std::move(te);
                            res = tres;
                            accepted = true;
                            break;
                        }
                    }
                    catch (const Error &)
                    {
                        // Trial point left the free space or hit the boundary band.
                    }
                }
                if (!accepted)
                    return res <= kEquilibriumResidual ? std::optional<UnitPoint>(x) : std::nullopt;
            }
            if (res <= kEquilibriumResidual)
                return x;
        }
        catch (const Error &)
        {
        }
        return std::nullopt;
    }

    /// Spectrum of J_d(x) with eigenvector tangency flags.
    inline std::vector<SpectrumEntry> jd_spectrum(const Matrix &jd, const UnitPoint &x)
    {
        Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(jd), true);
        std::vector<SpectrumEntry> out;
        const Eigen::VectorXcd xc = Eigen::VectorXd(x.coords()).cast<std::complex<double>>();
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        {
            Eigen::VectorXcd v = es.eigenvectors().col(i);
            v.normalize();
            const double radial = std::abs(xc.dot(v));
            out.push_back({es.eigenvalues()(i), radial < kTangencyTol});
        }
        std::sort(out.begin(), out.end(), [](const SpectrumEntry &a, const SpectrumEntry &b)
                  { return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                                            : a.value.imag() < b.value.imag(); });
        return out;
    }

    /// Target / stable / unstable / indeterminate from the tangent spectrum.
    inline Classification classify_equilibrium(const EquilibriumReport &report)
    {
        bool any_positive = false;
        for (const auto &e : report.jacobian_spectrum)
        {
            if (!e.tangent)
                continue;
            if (std::abs(e.value.real()) < kIndeterminateBand)
                return Classification::Indeterminate;
            if (e.value.real() > 0.0)
                any_positive = true;
        }
        if (any_positive)
            return Classification::Unstable;
        return report.is_target ? Classification::Target : Classification::Stable;
    }

    inline Classification classify_equilibrium(const ClosedLoop &, const EquilibriumReport &report)
    {
        return classify_equilibrium(report);
    }

    inline EquilibriumReport make_report(const ClosedLoop &loop, const UnitPoint &x, int support = 1)
    {
        const PlannerEval pe = evaluate_planner(loop.planner, loop.field, x);
        EquilibriumReport r;
        r.x_star = x;
        r.residual = pe.nu.norm();
        r.jacobian_spectrum = jd_spectrum(pe.jd, x);
        r.support = support;
        r.separation = pe.location.proximity.distance;
        r.is_target = sphere_angle(x, loop.planner.target) < kDedupAngle;
        r.classification = classify_equilibrium(r);
        return r;
    }

    /// Deterministic, roughly uniform start points on S^n.
    inline std::vector<UnitPoint> sphere_grid(int ambient_dim, int count, std::uint64_t seed = 7)
    {
        std::vector<UnitPoint> pts;
        pts.reserve(count);
        if (ambient_dim == 3)
        {
            // Fibonacci lattice.
            const double golden = kPi * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < count; ++i)
            {
                const double z = 1.0 - (2.0 * i + 1.0) / count;
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = golden * i;
                pts.emplace_back(UnitPoint({r * std::cos(phi), r * std::sin(phi), z}));
            }
            return pts;
        }
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < count; ++i)
        {
            Vector v(ambient_dim);
            for (int k = 0; k < ambient_dim; ++k)
                v(k) = normal(rng);
            pts.emplace_back(v);
        }
        return pts;
    }

    /// Multi-start Newton over a grid of grid_density points, deduplicated at
    /// 1e-6 rad. The target is always included (it is an equilibrium whenever
    /// it sits outside the blend tubes, which scenario validation enforces).
    inline std::vector<EquilibriumReport> find_equilibria(const ClosedLoop &loop, int grid_density,
                                                          const NewtonOptions &opt = {})
    {
        if (grid_density < 1000)
            throw Error(ErrorKind::Input, "find_equilibria: grid density must be at least 1000");
        struct Found
        {
            UnitPoint x;
            int support;
        };
        std::vector<Found> found;
        auto add = [&](const UnitPoint &x)
        {
            for (auto &f : found)
                if (sphere_angle(f.x, x) < kDedupAngle)
                {
                    ++f.support;
                    return;
                }
            found.push_back({x, 1});
        };
        std::vector<UnitPoint> starts = sphere_grid(loop.ambient_dim(), grid_density);
        starts.insert(starts.begin(), loop.planner.target);
        for (const auto &s : starts)
        {
            if (loop.field.contains(s))
                continue;
            if (auto x = newton_equilibrium(loop.planner, loop.field, s, opt))
                add(*x);
        }
        std::vector<EquilibriumReport> reports;
        for (const auto &f : found)
            reports.push_back(make_report(loop, f.x, f.support));
        // Target first, then lexicographic by coordinates.
        std::sort(reports.begin(), reports.end(), [](const EquilibriumReport &a, const EquilibriumReport &b)
                  {
                      if (a.is_target != b.is_target)
                          return a.is_target;
                      const Vector &ca = a.x_star.coords();
                      const Vector &cb = b.x_star.coords();
                      for (Eigen::Index i = 0; i < ca.size(); ++i)
                          if (ca(i) != cb(i))
                              return ca(i) < cb(i);
                      return false; });
        return reports;
    }

    template <typename Scalar>
    using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    /// Jacobian of the closed loop at (x*, 0):
    ///   [ 0                 P(x*)                     ]
    ///   [ k_d beta J_d(x*)  J_d(x*) P(x*) - k_d beta I ]
    /// Assembled in `Scalar` from a renormalized x* so that P^2 = P and
    /// J_d P = J_d hold to working precision; with Scalar = long double the
    /// repeated eigenvalue -k_d beta stays resolvable below 1e-8.
    template <typename Scalar = double>
    DynMatrix<Scalar> closed_loop_jacobian(const ClosedLoop &loop, const UnitPoint &x_star)
    {
        const PlannerEval pe = evaluate_planner(loop.planner, loop.field, x_star);
        if (!(pe.nu.norm() < kEquilibriumResidual))
            throw Error(ErrorKind::Precondition, "closed_loop_jacobian: x is not an equilibrium (residual " +
                                                     std::to_string(pe.nu.norm()) + ")");
        const double d = separation_value(loop.field, loop.variant, x_star.coords(), pe.location.proximity);
        const Scalar kb = static_cast<Scalar>(loop.controller.k_d * beta(loop.controller, d));
        const Eigen::Index m = x_star.ambient_dim();
        using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
        using Mat = DynMatrix<Scalar>;
        Vec x = Eigen::VectorXd(x_star.coords()).cast<Scalar>();
        x /= x.norm();
        const Mat p = Mat::Identity(m, m) - x * x.transpose();
        const Mat ambient = Eigen::MatrixXd(jacobian_jd_ambient(loop.planner, loop.field, x_star)).cast<Scalar>();
        const Mat jd = ambient * p;
        Mat j = Mat::Zero(2 * m, 2 * m);
        j.topRightCorner(m, m) = p;
        j.bottomLeftCorner(m, m) = kb * jd;
        j.bottomRightCorner(m, m) = jd * p - kb * Mat::Identity(m, m);
        return j;
    }

    /// Numerical check of the closed-loop eigenstructure at an equilibrium.
    struct EigenstructureReport
    {
        double damping = 0.0;          // k_d beta(d_U(x*))
        int damping_cluster = 0;       // eigenvalues within tol of -k_d beta
        int damping_nullity = 0;       // dim ker(J + k_d beta I)
        bool zero_eigenvalue = false;  // some eigenvalue within tol of 0
        double radial_residual = 0.0;  // ||J [x*; 0]||
        double tangent_match = 0.0;    // max distance between leftover and J_d tangent eigenvalues
        double eigvec_residual = 0.0;  // max ||J n - lambda_g n|| / ||n|| for n = [(1/lambda_g) P n2; n2]
        double base_point_residual = 0.0;   // ||J_d(x*) x*||
        std::vector<std::complex<double>> spectrum;
        bool ok = false;
    };

    inline EigenstructureReport check_eigenstructure(const ClosedLoop &loop, const UnitPoint &x_star,
                                                     double tol = 1e-8)
    {
        using LD = long double;
        using CLD = std::complex<LD>;
        EigenstructureReport rep;
        const int m = x_star.ambient_dim();
        const int n = m - 1;
        const DynMatrix<LD> j = closed_loop_jacobian<LD>(loop, x_star);
        const PlannerEval pe = evaluate_planner(loop.planner, loop.field, x_star);
        const double d = separation_value(loop.field, loop.variant, x_star.coords(), pe.location.proximity);
        rep.damping = loop.controller.k_d * beta(loop.controller, d);
        rep.base_point_residual = (pe.jd * x_star.coords()).norm();

        Eigen::EigenSolver<DynMatrix<LD>> es(j, false);
        std::vector<CLD> eig(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        for (const auto &e : eig)
            rep.spectrum.emplace_back(static_cast<double>(e.real()), static_cast<double>(e.imag()));

        const CLD target(-static_cast<LD>(rep.damping), 0.0L);
        for (const auto &e : eig)
            if (std::abs(e - target) < tol)
                ++rep.damping_cluster;

        {
            DynMatrix<LD> shifted = j + static_cast<LD>(rep.damping) * DynMatrix<LD>::Identity(2 * m, 2 * m);
            Eigen::JacobiSVD<DynMatrix<LD>> svd(shifted);
            const auto &sv = svd.singularValues();
            const LD scale = std::max<LD>(1.0L, sv(0));
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv(i) < tol * scale)
                    ++rep.damping_nullity;
        }

        // Peel off one zero and n+1 copies of -k_d beta; the rest should be the
        // tangent spectrum of J_d.
        auto take_nearest = [&](const CLD &value)
        {
            auto it = std::min_element(eig.begin(), eig.end(), [&](const CLD &a, const CLD &b)
                                       { return std::abs(a - value) < std::abs(b - value); });
            const LD dist = std::abs(*it - value);
            eig.erase(it);
            return dist;
        };
        rep.zero_eigenvalue = take_nearest(CLD(0.0L, 0.0L)) < tol;
        for (int k = 0; k <= n && !eig.empty(); ++k)
            take_nearest(target);

        Eigen::VectorXd xs(x_star.coords());
        Eigen::VectorXd radial = Eigen::VectorXd::Zero(2 * m);
        radial.head(m) = xs;
        rep.radial_residual = static_cast<double>((j * radial.cast<LD>()).norm());

        const std::vector<SpectrumEntry> jd_spec = jd_spectrum(pe.jd, x_star);
        std::vector<std::complex<double>> tangent;
        for (const auto &e : jd_spec)
            if (e.tangent)
                tangent.push_back(e.value);
        rep.tangent_match = tangent.size() == eig.size() ? 0.0 : std::numeric_limits<double>::infinity();
        for (const auto &t : tangent)
        {
            if (eig.empty())
                break;
            const double dist = static_cast<double>(take_nearest(CLD(t.real(), t.imag())));
            rep.tangent_match = std::max(rep.tangent_match, dist);
        }

        // Eigenvector form for each nonzero tangent eigenpair of J_d. The first
        // block equation P n2 = lambda n1 fixes the sign of n1.
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(Eigen::MatrixXd(pe.jd).cast<std::complex<double>>());
        const Eigen::MatrixXcd jc = j.cast<CLD>().unaryExpr([](const CLD &c)
                                                            { return std::complex<double>(static_cast<double>(c.real()),
                                                                                          static_cast<double>(c.imag())); });
        const Eigen::MatrixXcd pc = Eigen::MatrixXd(projector(x_star)).cast<std::complex<double>>();
        for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i)
        {
            const std::complex<double> lg = ces.eigenvalues()(i);
            Eigen::VectorXcd n2 = ces.eigenvectors().col(i);
            n2.normalize();
            if (std::abs(lg) < tol || std::abs(xs.cast<std::complex<double>>().dot(n2)) > kTangencyTol)
                continue;
            Eigen::VectorXcd vec(2 * m);
            vec.head(m) = (pc * n2) / lg;
            vec.tail(m) = n2;
            rep.eigvec_residual = std::max(rep.eigvec_residual, (jc * vec - lg * vec).norm() / vec.norm());
        }

        rep.ok = rep.damping_cluster >= n + 1 && rep.damping_nullity >= n + 1 && rep.zero_eigenvalue &&
                 rep.radial_residual < tol && rep.tangent_match < tol && rep.eigvec_residual < tol &&
                 rep.base_point_residual < 1e-6;
        return rep;
    }

} // namespace spherectl

#endif // SPHERECTL_ANALYSIS_HPP
