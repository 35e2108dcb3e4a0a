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

#ifndef SPHERECTL_OBSTACLE_HPP
#define SPHERECTL_OBSTACLE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "spherectl/geometry.hpp"

namespace spherectl
{

    inline constexpr double kMinExtent = 1e-3;
    inline constexpr double kExtentMargin = 1e-3;
    inline constexpr int kProfileCheckGrid = 1024;
    inline constexpr int kClosestPointGrid = 720;
    inline constexpr int kDefaultMaxHarmonics = 8;

    /// Angular extent rho(psi) of a star-shaped obstacle, measured from the
    /// kernel along the great circle leaving it in direction psi.
    ///
    ///   rho(psi) = a_0 + sum_k a_k cos(k psi) + b_k sin(k psi),  k = 1..K
    ///
    /// A profile with K = 0 is a spherical cap and is the only kind allowed
    /// for n >= 3.
    class RadialProfile
    {
    public:
        struct Eval
        {
            double value;
            double d1;
            double d2;
        };

        RadialProfile() = default;

        static RadialProfile cap(double radius)
        {
            RadialProfile p;
            p.cos_ = {radius};
            return p;
        }

        /// cos_coeffs = [a_0, a_1, ..., a_K]; sin_coeffs = [b_1, ..., b_K] (may be shorter).
        static RadialProfile fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
        {
            if (cos_coeffs.empty())
                throw Error(ErrorKind::Input, "Fourier profile needs at least a_0");
            RadialProfile p;
            const std::size_t harmonics = std::max(cos_coeffs.size() - 1, sin_coeffs.size());
            cos_coeffs.resize(harmonics + 1, 0.0);
            sin_coeffs.resize(harmonics, 0.0);
            p.cos_ = std::move(cos_coeffs);
            p.sin_ = std::move(sin_coeffs);
            // Trailing zero harmonics do not count towards K.
            while (p.sin_.size() > 0 && p.cos_.back() == 0.0 && p.sin_.back() == 0.0)
            {
                p.cos_.pop_back();
                p.sin_.pop_back();
            }
            return p;
        }

        int harmonics() const noexcept { return static_cast<int>(sin_.size()); }
        bool is_cap() const noexcept { return sin_.empty(); }
        double mean() const noexcept { return cos_.front(); }
        const std::vector<double> &cos_coeffs() const noexcept { return cos_; }
        const std::vector<double> &sin_coeffs() const noexcept { return sin_; }

        Eval eval(double psi) const
        {
            Eval e{cos_.front(), 0.0, 0.0};
            if (sin_.empty())
                return e;
            const double c1 = std::cos(psi);
            const double s1 = std::sin(psi);
            double ck = c1;
            double sk = s1;
            for (std::size_t k = 1; k <= sin_.size(); ++k)
            {
                const double kk = static_cast<double>(k);
                const double a = cos_[k];
                const double b = sin_[k - 1];
                e.value += a * ck + b * sk;
                e.d1 += kk * (b * ck - a * sk);
                e.d2 -= kk * kk * (a * ck + b * sk);
                const double next_c = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = next_c;
            }
            return e;
        }

        double operator()(double psi) const { return eval(psi).value; }

        /// Rigorous bounds a_0 -+ sum |a_k| + |b_k|.
        double upper_bound() const
        {
            double s = cos_.front();
            for (std::size_t k = 1; k < cos_.size(); ++k)
                s += std::abs(cos_[k]) + std::abs(sin_[k - 1]);
            return s;
        }

        double lower_bound() const
        {
            double s = cos_.front();
            for (std::size_t k = 1; k < cos_.size(); ++k)
                s -= std::abs(cos_[k]) + std::abs(sin_[k - 1]);
            return s;
        }

        std::pair<double, double> sampled_range(int grid = kProfileCheckGrid) const
        {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (int i = 0; i < grid; ++i)
            {
                const double r = (*this)(2.0 * kPi * i / grid);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            return {lo, hi};
        }

    private:
        std::vector<double> cos_{0.0};
        std::vector<double> sin_;
    };

    /// Result of a closest-point query on one obstacle.
    struct ClosestPoint
    {
        UnitPoint point;
        double distance = 0.0;
        double param = 0.0;     // boundary parameter psi (caps: direction angle, informational)
        bool ambiguous = false; // a second, distinct near-minimizer exists
    };

    /// Star-shaped unsafe set: every geodesic from the kernel to a point of the
    /// set stays in the set, by construction of the radial profile.
    class StarObstacle
    {
    public:
        StarObstacle(UnitPoint kernel, RadialProfile profile,
                     std::optional<Vector> reference = std::nullopt,
                     int max_harmonics = kDefaultMaxHarmonics)
            : kernel_(std::move(kernel)), profile_(std::move(profile))
        {
            const int m = kernel_.ambient_dim();
            if (!profile_.is_cap() && m != 3)
                throw Error(ErrorKind::Validation, "Fourier profiles are only supported on S^2");
            if (profile_.harmonics() > max_harmonics)
                throw Error(ErrorKind::Validation, "profile has " + std::to_string(profile_.harmonics()) +
                                                       " harmonics, limit is " + std::to_string(max_harmonics));
            const auto [lo, hi] = profile_.sampled_range();
            if (!(lo > kMinExtent) || !(hi < kPi / 2 - kExtentMargin))
                throw Error(ErrorKind::Validation,
                            "angular extent must lie in (" + std::to_string(kMinExtent) + ", pi/2 - " +
                                std::to_string(kExtentMargin) + "), sampled range [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
            extent_max_ = std::max(hi, profile_.is_cap() ? hi : std::min(profile_.upper_bound(), kPi / 2));
            extent_min_ = lo;

            if (m == 3)
                build_frame(reference);
            if (!profile_.is_cap())
            {
                samples_.resize(3, kClosestPointGrid);
                for (int k = 0; k < kClosestPointGrid; ++k)
                    samples_.col(k) = Eigen::Vector3d(boundary(sample_param(k)).point);
            }
        }

        const UnitPoint &kernel() const noexcept { return kernel_; }
        const RadialProfile &profile() const noexcept { return profile_; }
        bool is_cap() const noexcept { return profile_.is_cap(); }
        int ambient_dim() const noexcept { return kernel_.ambient_dim(); }
        double extent_max() const noexcept { return extent_max_; }
        double extent_min() const noexcept { return extent_min_; }
        const Vector &frame_u() const noexcept { return e1_; }
        const Vector &frame_w() const noexcept { return e2_; }

        struct BoundaryEval
        {
            Vector point;
            Vector d1;
            Vector d2;
        };

        /// Boundary point b(psi) with first and second derivatives (S^2 only).
        BoundaryEval boundary(double psi) const
        {
            const auto r = profile_.eval(psi);
            const double cr = std::cos(r.value);
            const double sr = std::sin(r.value);
            const double cp = std::cos(psi);
            const double sp = std::sin(psi);
            const Vector &g = kernel_.coords();
            const Vector u = cp * e1_ + sp * e2_;
            const Vector w = -sp * e1_ + cp * e2_;
            const Vector radial = -sr * g + cr * u; // d/d(rho)
            BoundaryEval b;
            b.point = cr * g + sr * u;
            b.d1 = r.d1 * radial + sr * w;
            b.d2 = r.d2 * radial - r.d1 * r.d1 * (cr * g + sr * u) + 2.0 * r.d1 * cr * w - sr * u;
            return b;
        }

        UnitPoint boundary_point(double psi) const { return UnitPoint(boundary(psi).point); }

        /// Direction parameter psi of x as seen from the kernel (S^2 only).
        double direction_param(const Vector &x) const
        {
            double psi = std::atan2(x.dot(e2_), x.dot(e1_));
            if (psi < 0.0)
                psi += 2.0 * kPi;
            return psi;
        }

        /// Signed gap theta(kernel, x) - rho(direction of x); <= 0 means inside.
        double radial_gap(const Vector &x) const
        {
            const double theta = angle_between(kernel_.coords(), x);
            if (profile_.is_cap())
                return theta - profile_.mean();
            if (theta < kCoincidentAngle)
                return -profile_(0.0);
            return theta - profile_(direction_param(x));
        }

        bool contains(const UnitPoint &x) const
        {
            require_same_dim(kernel_, x.coords(), "contains");
            if (angle_between(kernel_.coords(), x.coords()) > kPi - kAntipodalMargin)
                return false;
            return radial_gap(x.coords()) <= 0.0;
        }

        /// Spherical distance inf_{a in U} arccos(x^T a); zero inside.
        double distance(const Vector &x) const
        {
            if (profile_.is_cap())
                return std::max(0.0, angle_between(kernel_.coords(), x) - profile_.mean());
            if (radial_gap(x) <= 0.0)
                return 0.0;
            return search(x).distance;
        }

        /// distance(x) together with the closest boundary point when x is outside
        /// (point left empty inside).
        ClosestPoint probe(const Vector &x) const
        {
            ClosestPoint cp;
            if (profile_.is_cap())
            {
                cp.distance = std::max(0.0, angle_between(kernel_.coords(), x) - profile_.mean());
                if (cp.distance > 0.0)
                    cp.point = cap_closest(x).point;
                return cp;
            }
            if (radial_gap(x) <= 0.0)
                return cp;
            return search(x);
        }

        /// Lower bound on distance(x) by the triangle inequality; cheap.
        double distance_lower_bound(const Vector &x) const
        {
            return angle_between(kernel_.coords(), x) - extent_max_;
        }

        ClosestPoint closest(const UnitPoint &x) const
        {
            require_same_dim(kernel_, x.coords(), "closest_point");
            const double gap = radial_gap(x.coords());
            if (gap < -1e-12)
                throw Error(ErrorKind::InfeasibleState, "closest_point: x lies inside the obstacle");
            if (profile_.is_cap())
                return cap_closest(x.coords());
            return search(x.coords());
        }

    private:
        double sample_param(int k) const { return 2.0 * kPi * k / kClosestPointGrid; }

        void build_frame(const std::optional<Vector> &reference)
        {
            const Vector &g = kernel_.coords();
            Vector ref;
            if (reference)
            {
                require_same_dim(kernel_, *reference, "obstacle reference direction");
                ref = project_vec(g, *reference);
                if (ref.norm() < 1e-8)
                    throw Error(ErrorKind::Validation, "obstacle reference direction is parallel to the kernel");
            }
            else
            {
                Eigen::Index axis = 0;
                g.cwiseAbs().minCoeff(&axis);
                ref = project_vec(g, Vector::Unit(3, axis));
            }
            e1_ = ref.normalized();
            const Eigen::Vector3d g3 = g, e13 = e1_;
            e2_ = g3.cross(e13);
        }

        ClosestPoint cap_closest(const Vector &x) const
        {
            const Vector &g = kernel_.coords();
            const double r = profile_.mean();
            Vector dir = project_vec(g, x);
            ClosestPoint cp;
            const double dn = dir.norm();
            if (dn < 1e-14)
            {
                // x is the kernel or its antipode: every rim point is equidistant.
                cp.ambiguous = angle_between(g, x) > kPi / 2;
                dir = tangent_basis(kernel_).col(0);
            }
            else
            {
                dir /= dn;
            }
            cp.point = UnitPoint(std::cos(r) * g + std::sin(r) * dir);
            cp.distance = angle_between(x, cp.point.coords());
            if (ambient_dim() == 3)
                cp.param = direction_param(cp.point.coords());
            return cp;
        }

        /// Grid scan over the boundary parameter followed by a safeguarded
        /// Newton solve of d/dpsi [x . b(psi)] = 0 inside the winning cell.
        ClosestPoint search(const Vector &x) const
        {
            const int n = kClosestPointGrid;
            const Eigen::Vector3d x3 = x;
            const Eigen::Matrix<double, kClosestPointGrid, 1> dots = samples_.transpose() * x3;
            int best = 0;
            dots.maxCoeff(&best);

            ClosestPoint cp;
            // Ambiguity: another local maximum that is nearly as good but far away.
            const double best_angle = angle_between(x3, samples_.col(best));
            // Only samples within about 1e-6 rad of the best can qualify.
            const double threshold = dots[best] - 2e-6;
            for (int k = 0; k < n; ++k)
            {
                if (k == best || dots[k] < threshold)
                    continue;
                const double prev = dots[(k + n - 1) % n];
                const double next = dots[(k + 1) % n];
                if (dots[k] < prev || dots[k] < next)
                    continue;
                int sep = std::abs(k - best);
                sep = std::min(sep, n - sep);
                if (2.0 * kPi * sep / n > 0.1 && angle_between(x3, samples_.col(k)) - best_angle < 1e-6)
                    cp.ambiguous = true;
            }

            const double cell = 2.0 * kPi / n;
            const double psi = refine(x, sample_param(best) - cell, sample_param(best) + cell, sample_param(best));
            const auto b = boundary(psi);
            cp.point = UnitPoint(b.point);
            cp.distance = angle_between(x, cp.point.coords());
            cp.param = std::fmod(psi + 4.0 * kPi, 2.0 * kPi);
            return cp;
        }

        double refine(const Vector &x, double lo, double hi, double start) const
        {
            auto slope = [&](double psi)
            {
                const auto b = boundary(psi);
                return std::pair{x.dot(b.d1), x.dot(b.d2)};
            };
            auto [f_lo, unused_lo] = slope(lo);
            auto [f_hi, unused_hi] = slope(hi);
            (void)unused_lo;
            (void)unused_hi;
            if (f_lo == 0.0)
                return lo;
            if (f_hi == 0.0)
                return hi;
            if (!(f_lo > 0.0 && f_hi < 0.0))
                return golden(x, lo, hi);

            // slope(a) > 0 > slope(c) brackets the maximum of x . b.
            double a = lo, c = hi;
            double psi = start;
            double step_old = c - a;
            double step = step_old;
            auto [f, df] = slope(psi);
            for (int it = 0; it < 100; ++it)
            {
                const bool newton_ok = df != 0.0 &&
                                       ((psi - c) * df - f) * ((psi - a) * df - f) < 0.0 &&
                                       std::abs(2.0 * f) < std::abs(step_old * df);
                step_old = step;
                if (newton_ok)
                {
                    step = f / df;
                    psi -= step;
                }
                else
                {
                    step = 0.5 * (c - a);
                    psi = a + step;
                }
                if (std::abs(step) < 1e-14)
                    break;
                std::tie(f, df) = slope(psi);
                if (f > 0.0)
                    a = psi;
                else
                    c = psi;
            }
            return psi;
        }

        double golden(const Vector &x, double a, double b) const
        {
            const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
            auto f = [&](double psi) { return x.dot(boundary(psi).point); };
            double c = b - invphi * (b - a);
            double d = a + invphi * (b - a);
            double fc = f(c), fd = f(d);
            while (b - a > 1e-10)
            {
                if (fc > fd)
                {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - invphi * (b - a);
                    fc = f(c);
                }
                else
                {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + invphi * (b - a);
                    fd = f(d);
                }
            }
            return 0.5 * (a + b);
        }

        UnitPoint kernel_;
        RadialProfile profile_;
        Vector e1_;
        Vector e2_;
        double extent_max_ = 0.0;
        double extent_min_ = 0.0;
        Eigen::Matrix3Xd samples_; // boundary samples, S^2 Fourier profiles only
    };

    enum class SeparationVariant
    {
        Spherical,
        Chordal,
        Product
    };

    inline const char *to_string(SeparationVariant v)
    {
        switch (v)
        {
        case SeparationVariant::Spherical:
            return "spherical";
        case SeparationVariant::Chordal:
            return "chordal";
        case SeparationVariant::Product:
            return "product";
        }
        return "unknown";
    }

    inline SeparationVariant parse_separation_variant(const std::string &name)
    {
        if (name == "spherical")
            return SeparationVariant::Spherical;
        if (name == "chordal")
            return SeparationVariant::Chordal;
        if (name == "product")
            return SeparationVariant::Product;
        throw Error(ErrorKind::Input, "unknown separation variant '" + name + "'");
    }

    /// Nearest obstacle in the spherical-distance sense.
    struct Proximity
    {
        double distance = std::numeric_limits<double>::infinity();
        int index = -1;
        bool inside = false;
        // Set when some other obstacle is also closer than the `within`
        // threshold passed to ObstacleField::nearest.
        bool second_within = false;
        // Closest boundary point of obstacle `index` (empty when inside).
        std::optional<UnitPoint> point;
    };

    /// The unsafe set U: pairwise-separated star obstacles. Immutable.
    class ObstacleField
    {
    public:
        ObstacleField() = default;

        /// Validates that obstacle boundaries are at least 2*delta apart.
        ObstacleField(std::vector<StarObstacle> obstacles, double delta)
            : obstacles_(std::move(obstacles)), delta_(delta)
        {
            if (!(delta > 0.0 && delta <= kPi / 2))
                throw Error(ErrorKind::Validation, "pairwise separation delta must lie in (0, pi/2]");
            for (std::size_t i = 1; i < obstacles_.size(); ++i)
                if (obstacles_[i].ambient_dim() != obstacles_[0].ambient_dim())
                    throw Error(ErrorKind::Validation, "obstacles have mixed dimensions");
            min_pairwise_ = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < obstacles_.size(); ++i)
                for (std::size_t j = i + 1; j < obstacles_.size(); ++j)
                {
                    const double s = pairwise_separation(obstacles_[i], obstacles_[j]);
                    min_pairwise_ = std::min(min_pairwise_, s);
                    if (s < 2.0 * delta)
                        throw Error(ErrorKind::Validation,
                                    "obstacles " + std::to_string(i) + " and " + std::to_string(j) +
                                        " are " + std::to_string(s) + " rad apart, need 2*delta = " +
                                        std::to_string(2.0 * delta));
                }
        }

        std::size_t size() const noexcept { return obstacles_.size(); }
        bool empty() const noexcept { return obstacles_.empty(); }
        const StarObstacle &operator[](std::size_t i) const { return obstacles_[i]; }
        const std::vector<StarObstacle> &obstacles() const noexcept { return obstacles_; }
        double delta() const noexcept { return delta_; }
        double min_pairwise_separation() const noexcept { return min_pairwise_; }

        /// Sampled minimum angle between two obstacle boundaries (0 on overlap).
        static double pairwise_separation(const StarObstacle &a, const StarObstacle &b)
        {
            if (a.is_cap() && b.is_cap())
                return std::max(0.0, angle_between(a.kernel().coords(), b.kernel().coords()) -
                                         a.profile().mean() - b.profile().mean());
            const StarObstacle &sampled = a.is_cap() ? b : a;
            const StarObstacle &other = a.is_cap() ? a : b;
            double best = std::numeric_limits<double>::infinity();
            for (int k = 0; k < kProfileCheckGrid; ++k)
            {
                const Vector p = sampled.boundary(2.0 * kPi * k / kProfileCheckGrid).point;
                best = std::min(best, other.distance(p));
            }
            return best;
        }

        /// Exact nearest obstacle, pruning with triangle-inequality bounds.
        Proximity nearest(const Vector &x, double within = 0.0) const
        {
            Proximity p;
            const std::size_t m = obstacles_.size();
            if (m == 0)
                return p;
            // Order obstacles by lower bound; m is small so a fixed array suffices.
            std::vector<std::pair<double, int>> order(m);
            for (std::size_t i = 0; i < m; ++i)
                order[i] = {obstacles_[i].distance_lower_bound(x), static_cast<int>(i)};
            std::sort(order.begin(), order.end());
            int count_within = 0;
            for (const auto &[bound, i] : order)
            {
                if (bound >= p.distance && bound >= within)
                    break;
                ClosestPoint cp = obstacles_[i].probe(x);
                const double d = cp.distance;
                if (d < within)
                    ++count_within;
                if (d < p.distance)
                {
                    p.distance = d;
                    p.index = i;
                    if (d > 0.0)
                        p.point = std::move(cp.point);
                    else
                        p.point.reset();
                }
            }
            p.inside = p.distance <= 0.0;
            p.second_within = count_within >= 2;
            return p;
        }

        std::vector<double> distances(const Vector &x) const
        {
            std::vector<double> d(obstacles_.size());
            for (std::size_t i = 0; i < obstacles_.size(); ++i)
                d[i] = obstacles_[i].distance(x);
            return d;
        }

        bool contains(const UnitPoint &x) const
        {
            for (const auto &o : obstacles_)
                if (o.contains(x))
                    return true;
            return false;
        }

        /// Separation value of the requested variant. Obstacle-free fields have
        /// infinite spherical separation.
        double separation(const Vector &x, SeparationVariant variant) const
        {
            switch (variant)
            {
            case SeparationVariant::Spherical:
                return nearest(x).distance;
            case SeparationVariant::Chordal:
            {
                const double d = nearest(x).distance;
                return std::isfinite(d) ? 1.0 - std::cos(d) : std::numeric_limits<double>::infinity();
            }
            case SeparationVariant::Product:
            {
                if (obstacles_.empty())
                    return std::numeric_limits<double>::infinity();
                double prod = 1.0;
                for (const auto &o : obstacles_)
                    prod *= o.distance(x);
                return prod;
            }
            }
            return 0.0;
        }

    private:
        std::vector<StarObstacle> obstacles_;
        double delta_ = kPi / 2;
        double min_pairwise_ = std::numeric_limits<double>::infinity();
    };

    // ---------------------------------------------------------------------
    // Free-function surface.

    inline bool contains(const StarObstacle &obs, const UnitPoint &x) { return obs.contains(x); }

    /// Result of a separation query; `infeasible` is set when x is inside U.
    struct SeparationValue
    {
        double value = 0.0;
        int index = -1;
        bool infeasible = false;
    };

    inline SeparationValue separation_spherical(const ObstacleField &field, const UnitPoint &x)
    {
        const Proximity p = field.nearest(x.coords());
        const bool strictly_inside = p.index >= 0 && p.inside && field[p.index].radial_gap(x.coords()) < 0.0;
        return {p.inside ? 0.0 : p.distance, p.index, strictly_inside};
    }

    inline SeparationValue separation_chordal(const ObstacleField &field, const UnitPoint &x)
    {
        SeparationValue s = separation_spherical(field, x);
        if (std::isfinite(s.value))
            s.value = 1.0 - std::cos(s.value);
        return s;
    }

    inline SeparationValue separation_product(const ObstacleField &field, const UnitPoint &x)
    {
        SeparationValue s = separation_spherical(field, x);
        s.value = field.separation(x.coords(), SeparationVariant::Product);
        return s;
    }

    inline SeparationValue separation(const ObstacleField &field, const UnitPoint &x, SeparationVariant v)
    {
        switch (v)
        {
        case SeparationVariant::Spherical:
            return separation_spherical(field, x);
        case SeparationVariant::Chordal:
            return separation_chordal(field, x);
        case SeparationVariant::Product:
            return separation_product(field, x);
        }
        return {};
    }

    inline ClosestPoint closest_point(const StarObstacle &obs, const UnitPoint &x) { return obs.closest(x); }

    inline constexpr double kDegenerateNormal = 1e-9;

    /// n_i(x) = P(x)(x - Pi(x)) / ||P(x)(x - Pi(x))||, pointing away from the obstacle.
    inline TangentVector outward_normal(const StarObstacle &obs, const UnitPoint &x)
    {
        const ClosestPoint cp = obs.closest(x);
        const Vector w = project_vec(x.coords(), x.coords() - cp.point.coords());
        const double wn = w.norm();
        if (wn <= kDegenerateNormal)
            throw Error(ErrorKind::DegenerateNormal, "outward_normal: x coincides with its closest point");
        return TangentVector{x, w / wn};
    }

    /// Tangential gradient of the spherical separation: the outward normal of
    /// the nearest obstacle.
    inline TangentVector separation_gradient(const ObstacleField &field, const UnitPoint &x)
    {
        const Proximity p = field.nearest(x.coords());
        if (p.index < 0)
            return TangentVector{x, Vector::Zero(x.ambient_dim())};
        if (p.inside)
            throw Error(ErrorKind::InfeasibleState, "separation_gradient: x inside an obstacle");
        return outward_normal(field[p.index], x);
    }

    struct AlignmentReport
    {
        bool ok = true;
        int checked = 0;
        double min_cosine = 1.0; // min of n_i^T P(x)(x - g_i) / ||P(x)(x - g_i)||
        std::optional<UnitPoint> violating;
    };

    /// Samples points in the tube 0 < d <= tube_width around obs and checks
    /// n_i(x)^T P(x)(x - g_i) > 0 at each one. `kernel` replaces the obstacle's
    /// own kernel as g_i when given (to test other candidate points).
    inline AlignmentReport validate_normal_alignment(const StarObstacle &obs, double tube_width, int samples,
                                                  std::uint64_t seed = 0x5eedULL,
                                                  const std::optional<UnitPoint> &kernel = std::nullopt)
    {
        if (!(tube_width > 0.0))
            throw Error(ErrorKind::Input, "validate_normal_alignment: tube width must be positive");
        AlignmentReport report;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        const Vector &g = obs.kernel().coords();
        const Matrix basis = tangent_basis(obs.kernel());
        const double lo = obs.extent_min();
        const double hi = std::min(obs.extent_max() + tube_width, kPi - 1e-6);
        int attempts = 0;
        while (report.checked < samples && attempts < 200 * samples)
        {
            ++attempts;
            Vector t(basis.cols());
            for (Eigen::Index i = 0; i < t.size(); ++i)
                t(i) = normal(rng);
            const Vector dir = (basis * t).normalized();
            const double theta = lo + (hi - lo) * unit(rng);
            const UnitPoint x(std::cos(theta) * g + std::sin(theta) * dir);
            const double d = obs.distance(x.coords());
            if (!(d > 1e-9 && d <= tube_width))
                continue;
            ++report.checked;
            const Vector n = outward_normal(obs, x).vec;
            const Vector away = project_vec(x.coords(), x.coords() - (kernel ? kernel->coords() : g));
            const double c = n.dot(away) / away.norm();
            if (c < report.min_cosine)
                report.min_cosine = c;
            if (!(c > 0.0) && report.ok)
            {
                report.ok = false;
                report.violating = x;
            }
        }
        return report;
    }

} // namespace spherectl

#endif // SPHERECTL_OBSTACLE_HPP
